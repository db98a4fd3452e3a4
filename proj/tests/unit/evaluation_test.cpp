#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>

#include "bonefrag/error.hpp"
#include "bonefrag/evaluation.hpp"
#include "bonefrag/synthetic.hpp"
#include "oracles.hpp"

using namespace bonefrag;

namespace {

std::vector<std::string> ids(int n, const std::string& prefix = "F") {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Break table whose first column is the fragment index.
FeatureTable indexed_break_table(int n_frag, int breaks_per) {
  FeatureTable t;
  t.level = TableLevel::breakage;
  t.column_names = {"frag", "noise"};
  t.rows.resize(n_frag * breaks_per, 2);
  std::vector<std::string> raw;
  for (int f = 0; f < n_frag; ++f)
    for (int b = 0; b < breaks_per; ++b) {
      const int r = f * breaks_per + b;
      t.rows(r, 0) = f;
      t.rows(r, 1) = std::sin(r * 1.7);
      raw.push_back(f % 3 == 0 ? "C" : "H");
      t.group_ids.push_back("F" + std::to_string(f));
      t.row_ids.push_back("B" + std::to_string(b));
    }
  assign_labels(t, raw);
  return t;
}

FeatureTable indexed_fragment_table(int n) {
  FeatureTable t;
  t.level = TableLevel::fragment;
  t.column_names = {"i"};
  t.rows.resize(n, 1);
  std::vector<std::string> raw;
  for (int i = 0; i < n; ++i) {
    t.rows(i, 0) = i;
    raw.push_back(i % 4 == 0 ? "x" : "y");
    t.group_ids.push_back("F" + std::to_string(i));
    t.row_ids.push_back("F" + std::to_string(i));
  }
  assign_labels(t, raw);
  return t;
}

Trainer constant_trainer(int label) {
  return [label](const FeatureTable&, std::uint64_t) {
    return Predictor([label](const Matrix& m) { return std::vector<int>(static_cast<std::size_t>(m.rows()), label); });
  };
}

}  // namespace

TEST(GroupSplit, CountsAndDisjointness) {
  const auto g = ids(100);
  const SplitPlan p = group_split(g, 0.25, 3);
  EXPECT_EQ(p.test_groups.size(), 25u);
  EXPECT_EQ(p.train_groups.size(), 75u);
  std::set<std::string> all(p.train_groups.begin(), p.train_groups.end());
  for (const auto& t : p.test_groups) EXPECT_TRUE(all.insert(t).second);
  EXPECT_EQ(all, std::set<std::string>(g.begin(), g.end()));
}

TEST(GroupSplit, SeedDeterminesPlan) {
  const auto g = ids(40);
  const SplitPlan a = group_split(g, 0.3, 17), b = group_split(g, 0.3, 17), c = group_split(g, 0.3, 18);
  EXPECT_EQ(a.test_groups, b.test_groups);
  EXPECT_EQ(a.train_groups, b.train_groups);
  EXPECT_NE(a.test_groups, c.test_groups);
  EXPECT_EQ(a.test_groups.size(), 12u);
}

TEST(GroupSplit, BothSidesNonEmptyAndErrors) {
  const auto two = ids(2);
  const SplitPlan p = group_split(two, 0.01, 1);
  EXPECT_EQ(p.test_groups.size(), 1u);
  EXPECT_EQ(p.train_groups.size(), 1u);
  EXPECT_THROW(group_split(ids(1), 0.25, 1), ContractViolation);
  EXPECT_THROW(group_split(ids(10), 0.0, 1), ContractViolation);
  EXPECT_THROW(group_split(ids(10), 1.0, 1), ContractViolation);
}

TEST(GroupSplit, NoFragmentStraddlesOverManyTrials) {
  const FeatureTable t = indexed_break_table(50, 4);
  const auto groups = t.distinct_groups();
  for (std::uint64_t s = 0; s < 300; ++s) {
    const RowSplit rs = apply_split(t, group_split(groups, 0.25, s));
    std::set<std::string> train;
    for (auto r : rs.train) train.insert(t.group_ids[r]);
    for (auto r : rs.test) ASSERT_EQ(train.count(t.group_ids[r]), 0u);
    ASSERT_EQ(rs.train.size() + rs.test.size(), t.size());
  }
}

TEST(RunExperiment, ZeroStraddlingFragmentsInPipeline) {
  const FeatureTable t = indexed_break_table(40, 3);
  std::atomic<int> straddles{0};
  std::atomic<int> trials{0};
  Trainer spy = [&](const FeatureTable& train, std::uint64_t) {
    ++trials;
    std::set<double> seen;
    for (Eigen::Index r = 0; r < train.rows.rows(); ++r) seen.insert(train.rows(r, 0));
    return Predictor([&straddles, seen](const Matrix& test) {
      for (Eigen::Index r = 0; r < test.rows(); ++r)
        if (seen.count(test(r, 0))) ++straddles;
      return std::vector<int>(static_cast<std::size_t>(test.rows()), 0);
    });
  };
  ExperimentOptions o;
  o.protocol = Protocol::break_level_voted;
  o.master_seed = 5;
  o.threads = 2;
  run_experiment(t, spy, "spy", o);
  EXPECT_EQ(trials.load(), 300);
  EXPECT_EQ(straddles.load(), 0);
}

TEST(MajorityVote, MatchesModeOracleOnAllTriples) {
  Rng rng(1);
  for (int mask = 0; mask < 8; ++mask) {
    const std::vector<int> labels{mask & 1, (mask >> 1) & 1, (mask >> 2) & 1};
    const auto out = majority_vote({{"f", labels}}, rng);
    const auto m = oracle::modes(labels);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_EQ(out.at("f"), *m.begin());
  }
  const auto hhc = majority_vote({{"a", {1, 1, 0}}}, rng);
  EXPECT_EQ(hhc.at("a"), 1);
}

TEST(MajorityVote, TiesAreReproducibleAndUniform) {
  const std::map<std::string, std::vector<int>> tie{{"f", {0, 1}}};
  int ones = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    Rng a(s), b(s);
    const int x = majority_vote(tie, a).at("f");
    EXPECT_EQ(x, majority_vote(tie, b).at("f"));
    ones += x;
  }
  EXPECT_GT(ones, 150);
  EXPECT_LT(ones, 250);
  Rng rng(0);
  const auto three = majority_vote({{"g", {2, 0, 1, 2, 0}}}, rng);
  EXPECT_TRUE(three.at("g") == 0 || three.at("g") == 2);
  EXPECT_THROW(majority_vote({{"e", {}}}, rng), ContractViolation);
}

TEST(KFold, SizesPartitionRows) {
  Rng rng(3);
  auto folds = kfold_plan(20, 10, rng);
  ASSERT_EQ(folds.size(), 10u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.test.size(), 2u);
    EXPECT_EQ(f.train.size(), 18u);
    for (auto r : f.test) EXPECT_TRUE(seen.insert(r).second);
  }
  EXPECT_EQ(seen.size(), 20u);
  folds = kfold_plan(10, 3, rng);
  std::multiset<std::size_t> sizes;
  for (const auto& f : folds) sizes.insert(f.test.size());
  EXPECT_EQ(sizes, (std::multiset<std::size_t>{3, 3, 4}));
  EXPECT_THROW(kfold_plan(10, 1, rng), ContractViolation);
  EXPECT_THROW(kfold_plan(2, 3, rng), ContractViolation);
}

TEST(Bootstrap, CopiesOfInputRows) {
  const FeatureTable t = indexed_fragment_table(10);
  Rng rng(2);
  Diagnostics diag;
  const FeatureTable b = bootstrap_inflate(t, 100, rng, &diag);
  EXPECT_FALSE(diag.empty());
  ASSERT_EQ(b.size(), 1000u);
  std::set<std::string> groups(b.group_ids.begin(), b.group_ids.end());
  EXPECT_EQ(groups.size(), 1000u);
  for (Eigen::Index r = 0; r < 1000; ++r) {
    const auto src = static_cast<Eigen::Index>(b.rows(r, 0));
    ASSERT_EQ(b.rows.row(r), t.rows.row(src));
    ASSERT_EQ(b.labels[static_cast<std::size_t>(r)], t.labels[static_cast<std::size_t>(src)]);
  }
}

TEST(Bootstrap, UniqueFractionNearOneMinusInverseE) {
  const FeatureTable t = indexed_fragment_table(200);
  Rng rng(4);
  double total = 0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) {
    const FeatureTable b = bootstrap_inflate(t, 1, rng, nullptr);
    std::set<double> u(b.rows.col(0).begin(), b.rows.col(0).end());
    total += static_cast<double>(u.size()) / 200.0;
  }
  EXPECT_NEAR(total / reps, 1.0 - std::exp(-1.0), 0.01);
}

TEST(Bootstrap, FactorHundredMissesNothing) {
  const FeatureTable t = indexed_fragment_table(10);
  Rng rng(6);
  int absent = 0;
  for (int i = 0; i < 500; ++i) {
    const FeatureTable b = bootstrap_inflate(t, 100, rng, nullptr);
    std::set<double> u(b.rows.col(0).begin(), b.rows.col(0).end());
    absent += 10 - static_cast<int>(u.size());
  }
  EXPECT_EQ(absent, 0);
}

TEST(Score, DecompositionIdentity) {
  const std::vector<int> truth{0, 0, 0, 1, 1, 2, 2, 2, 2, 1};
  const std::vector<int> pred{0, 1, 0, 1, 0, 2, 2, 0, 2, 1};
  const Score s = score_predictions(truth, pred, 4);
  EXPECT_DOUBLE_EQ(s.accuracy, 0.7);
  EXPECT_TRUE(std::isnan(s.per_class_accuracy[3]));
  double weighted = 0;
  long n = 0;
  for (int k = 0; k < 3; ++k) {
    long row = 0;
    for (long c : s.confusion[static_cast<std::size_t>(k)]) row += c;
    n += row;
    weighted += static_cast<double>(row) * s.per_class_accuracy[static_cast<std::size_t>(k)];
  }
  EXPECT_EQ(n, s.n_fragments);
  EXPECT_NEAR(weighted / static_cast<double>(n), s.accuracy, 1e-15);
}

TEST(RunExperiment, ConstantClassifierScoresMajorityFraction) {
  const FeatureTable t = indexed_fragment_table(60);
  ExperimentOptions o;
  o.n_trials = 50;
  o.master_seed = 9;
  const auto report = run_experiment(t, constant_trainer(1), "const", o);
  for (const auto& tr : report.trials) {
    long class1 = 0;
    for (long c : tr.score.confusion[1]) class1 += c;
    EXPECT_EQ(tr.score.n_fragments, 15);
    EXPECT_DOUBLE_EQ(tr.score.accuracy, static_cast<double>(class1) / 15.0);
    double weighted = 0;
    for (std::size_t k = 0; k < 2; ++k) {
      long row = 0;
      for (long c : tr.score.confusion[k]) row += c;
      if (row) weighted += static_cast<double>(row) * tr.score.per_class_accuracy[k];
    }
    EXPECT_NEAR(weighted / 15.0, tr.score.accuracy, 1e-15);
  }
}

TEST(RunExperiment, ReportIndependentOfThreadCount) {
  const FeatureTable t = generate_blob_dataset(40, 3, 2.0, 8);
  const ClassifierSpec spec = ClassifierSpec::defaults(Algorithm::random_forest, 3);
  ExperimentOptions o;
  o.n_trials = 12;
  o.master_seed = 123;
  o.threads = 1;
  const auto a = run_experiment(t, spec, o);
  o.threads = 4;
  const auto b = run_experiment(t, spec, o);
  EXPECT_EQ(reports_csv(std::vector<ExperimentReport>{a}), reports_csv(std::vector<ExperimentReport>{b}));
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    EXPECT_EQ(a.trials[i].seed, b.trials[i].seed);
    EXPECT_EQ(a.trials[i].score.accuracy, b.trials[i].score.accuracy);
  }
  o.master_seed = 124;
  EXPECT_NE(run_experiment(t, spec, o).trials[0].seed, a.trials[0].seed);
}

TEST(RunExperiment, SeparatedBlobsAreEasy) {
  const FeatureTable t = generate_blob_dataset(100, 4, 4.0, 2);
  ExperimentOptions o;
  o.n_trials = 20;
  o.master_seed = 1;
  for (Algorithm a : {Algorithm::lda, Algorithm::gaussian_nb, Algorithm::knn}) {
    const auto r = run_experiment(t, ClassifierSpec::defaults(a), o);
    EXPECT_GE(r.mean_accuracy, 0.95) << to_string(a);
    EXPECT_EQ(r.level, TableLevel::fragment);
  }
}

TEST(RunExperiment, VotedBreaksScoreFragments) {
  RandomDatasetConfig cfg;
  cfg.n_fragments = 40;
  cfg.seed = 3;
  const FeatureTable t = generate_random_dataset(cfg);
  ExperimentOptions o;
  o.protocol = Protocol::break_level_voted;
  o.n_trials = 5;
  const auto r = run_experiment(t, ClassifierSpec::defaults(Algorithm::gaussian_nb), o);
  for (const auto& tr : r.trials) EXPECT_EQ(tr.score.n_fragments, 10);
  EXPECT_GE(r.std_accuracy, 0.0);
}

TEST(RunExperiment, ProtocolMustMatchLevel) {
  const FeatureTable breaks = indexed_break_table(8, 2);
  const FeatureTable frags = indexed_fragment_table(8);
  ExperimentOptions o;
  o.n_trials = 2;
  EXPECT_THROW(run_experiment(breaks, constant_trainer(0), "c", o), ValidationError);
  o.protocol = Protocol::break_level_voted;
  EXPECT_THROW(run_experiment(frags, constant_trainer(0), "c", o), ValidationError);
  o.protocol = Protocol::fragment_level;
  o.n_trials = 0;
  EXPECT_THROW(run_experiment(frags, constant_trainer(0), "c", o), Error);
  EXPECT_THROW(parse_protocol("grouped"), ValidationError);
  EXPECT_EQ(parse_protocol("row_level_unsafe"), Protocol::row_level_unsafe);
}

TEST(RunExperiment, RowLevelUnsafeIsLabelled) {
  const FeatureTable breaks = indexed_break_table(10, 3);
  ExperimentOptions o;
  o.protocol = Protocol::row_level_unsafe;
  o.n_trials = 3;
  Diagnostics diag;
  o.diagnostics = &diag;
  const auto r = run_experiment(breaks, constant_trainer(0), "c", o);
  EXPECT_FALSE(diag.empty());
  EXPECT_EQ(r.trials[0].score.n_fragments, 8);  // round(0.25 * 30) rows
  EXPECT_NE(report_csv_row(r).find("row_level_unsafe"), std::string::npos);
}

TEST(RunExperiment, FailedTrialNamesSeed) {
  const FeatureTable t = indexed_fragment_table(20);
  Trainer bad = [](const FeatureTable&, std::uint64_t) -> Predictor { throw DataError("boom"); };
  ExperimentOptions o;
  o.n_trials = 3;
  o.master_seed = 77;
  try {
    run_experiment(t, bad, "bad", o);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("trial 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(derive_seed(77, 0))), std::string::npos) << msg;
  }
}

TEST(ReportCsv, HeaderAndRow) {
  const FeatureTable t = indexed_fragment_table(20);
  ExperimentOptions o;
  o.n_trials = 4;
  o.master_seed = 42;
  const auto r = run_experiment(t, constant_trainer(1), "const", o);
  EXPECT_EQ(report_csv_header(r.class_names),
            "algorithm,level,protocol,n_trials,mean_accuracy,std_accuracy,acc_class_x,acc_class_y,master_seed\n");
  const std::string row = report_csv_row(r);
  EXPECT_EQ(row.rfind("const,fragment,fragment_level,4,", 0), 0u) << row;
  EXPECT_EQ(row.substr(row.size() - 4), ",42\n");
  const std::string all = reports_csv(std::vector<ExperimentReport>{r, r});
  EXPECT_EQ(std::count(all.begin(), all.end(), '\n'), 3);
}
