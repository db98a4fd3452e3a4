#include <gtest/gtest.h>

#include <set>

#include "bonefrag/audit.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/synthetic.hpp"

using namespace bonefrag;

TEST(RandomDataset, ShapeAndFragmentStructure) {
  RandomDatasetConfig cfg;
  cfg.seed = 4;
  const FeatureTable t = generate_random_dataset(cfg);
  t.validate();
  EXPECT_EQ(t.level, TableLevel::breakage);
  EXPECT_EQ(t.size(), 1400u);
  EXPECT_EQ(t.width(), 40u);
  EXPECT_EQ(t.distinct_groups().size(), 200u);
  EXPECT_EQ(t.class_names, (std::vector<std::string>{"0", "1"}));
  double ones = 0;
  for (std::size_t r = 0; r < t.size(); r += 7) {
    for (std::size_t b = 1; b < 7; ++b) {
      ASSERT_EQ(t.group_ids[r + b], t.group_ids[r]);
      ASSERT_EQ(t.labels[r + b], t.labels[r]);
      ASSERT_EQ(t.rows.row(static_cast<Eigen::Index>(r + b)).head(34), t.rows.row(static_cast<Eigen::Index>(r)).head(34));
    }
    ones += t.labels[r];
  }
  EXPECT_GE(ones / 200.0, 0.4);
  EXPECT_LE(ones / 200.0, 0.6);
  cfg.n_fragments = 0;
  EXPECT_THROW(generate_random_dataset(cfg), ValidationError);
}

TEST(RandomDataset, FragmentViewWidth) {
  RandomDatasetConfig cfg;
  cfg.n_fragments = 10;
  cfg.seed = 1;
  const FeatureTable b = generate_random_dataset(cfg);
  const FeatureTable f = fragment_view(b, cfg);
  EXPECT_EQ(f.level, TableLevel::fragment);
  EXPECT_EQ(f.size(), 10u);
  EXPECT_EQ(f.width(), 34u + 7u * 6u);
  EXPECT_EQ(f.column_names[34], "brk1_1");
  EXPECT_EQ(f.rows(3, 34 + 6 * 2 + 1), b.rows(3 * 7 + 2, 34 + 1));
  EXPECT_EQ(generate_random_dataset(cfg).rows, b.rows);
}

TEST(BlobDataset, ShapeAndMeans) {
  const FeatureTable t = generate_blob_dataset(500, 3, 4.0, 2);
  EXPECT_EQ(t.size(), 1000u);
  EXPECT_EQ(t.width(), 3u);
  EXPECT_EQ(t.class_names, (std::vector<std::string>{"a", "b"}));
  double ma = 0, mb = 0;
  for (std::size_t r = 0; r < t.size(); ++r) (t.labels[r] ? mb : ma) += t.rows(static_cast<Eigen::Index>(r), 0) / 500.0;
  EXPECT_NEAR(ma, -2.0, 0.2);
  EXPECT_NEAR(mb, 2.0, 0.2);
  EXPECT_THROW(generate_blob_dataset(0, 3, 1.0, 1), ValidationError);
  EXPECT_THROW(generate_blob_dataset(5, 3, -1.0, 1), ValidationError);
}

namespace {

AuditConfig small_audit(unsigned threads) {
  AuditConfig c;
  c.data.n_fragments = 40;
  c.data.seed = 21;
  c.n_trials = 2;
  c.bootstrap_factor = 10;
  c.threads = threads;
  for (auto& s : c.specs)
    if (s.algorithm() == Algorithm::neural_net) {
      auto p = NeuralNetParams::compact();
      p.epochs = 3;
      s.params = p;
    }
  return c;
}

}  // namespace

TEST(LeakageAudit, CellsAndReproducibility) {
  Diagnostics diag;
  AuditConfig cfg = small_audit(1);
  cfg.diagnostics = &diag;
  const AuditReport a = run_leakage_audit(cfg);
  EXPECT_FALSE(diag.empty());
  EXPECT_EQ(a.cells.size(), 18u);
  std::set<std::pair<int, std::string>> keys;
  for (const auto& c : a.cells) {
    keys.emplace(static_cast<int>(c.protocol), c.algorithm);
    EXPECT_EQ(c.accuracies.size(), 2u);
    EXPECT_GE(c.mean_accuracy, 0.0);
    EXPECT_LE(c.mean_accuracy, 1.0);
  }
  EXPECT_EQ(keys.size(), 18u);
  const AuditReport b = run_leakage_audit(small_audit(2));
  EXPECT_EQ(audit_csv(a), audit_csv(b));
  EXPECT_NO_THROW(a.at(AuditProtocol::frag_split_proper, "knn"));
  EXPECT_THROW(a.at(AuditProtocol::frag_split_proper, "nope"), ContractViolation);
  const std::string text = audit_table_text(a);
  EXPECT_NE(text.find("random_forest"), std::string::npos);
  EXPECT_EQ(audit_csv(a).substr(0, audit_csv(a).find('\n')), "protocol,algorithm,mean_accuracy,std_accuracy,n_trials,seed");
}

TEST(LeakageAudit, ConfigValidation) {
  AuditConfig c = small_audit(1);
  c.n_trials = 0;
  EXPECT_THROW(run_leakage_audit(c), ValidationError);
  c = small_audit(1);
  c.specs.clear();
  EXPECT_THROW(run_leakage_audit(c), ValidationError);
  c = small_audit(1);
  c.test_fraction = 1.5;
  EXPECT_THROW(run_leakage_audit(c), ValidationError);
}
