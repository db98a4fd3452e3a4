#include "bonefrag/synthetic.hpp"

#include <string>

#include "bonefrag/error.hpp"
#include "bonefrag/seeding.hpp"

namespace bonefrag {

void RandomDatasetConfig::validate() const {
  if (n_fragments < 1 || breaks_per_fragment < 1 || n_fragment_features < 1 || n_break_features < 1) {
    throw ValidationError("random dataset counts must all be >= 1");
  }
}

FeatureTable generate_random_dataset(const RandomDatasetConfig& config) {
  config.validate();
  const int f = config.n_fragment_features;
  const int b = config.n_break_features;
  const int per = config.breaks_per_fragment;
  FeatureTable t;
  t.level = TableLevel::breakage;
  for (int j = 1; j <= f; ++j) t.column_names.push_back("frag_" + std::to_string(j));
  for (int j = 1; j <= b; ++j) t.column_names.push_back("brk_" + std::to_string(j));
  t.class_names = {"0", "1"};
  t.rows.resize(static_cast<Eigen::Index>(config.n_fragments) * per, f + b);

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Eigen::RowVectorXd fragment_values(f);
  Eigen::Index row = 0;
  for (int frag = 0; frag < config.n_fragments; ++frag) {
    const std::string id = "F" + std::to_string(frag);
    const int label = coin(rng) ? 1 : 0;
    for (int j = 0; j < f; ++j) fragment_values[j] = normal(rng);
    for (int k = 0; k < per; ++k, ++row) {
      t.rows.row(row).head(f) = fragment_values;
      for (int j = 0; j < b; ++j) t.rows(row, f + j) = normal(rng);
      t.labels.push_back(label);
      t.group_ids.push_back(id);
      t.row_ids.push_back(id + "_B" + std::to_string(k));
    }
  }
  return t;
}

FeatureTable fragment_view(const FeatureTable& breaks, const RandomDatasetConfig& config) {
  config.validate();
  const int f = config.n_fragment_features;
  const int b = config.n_break_features;
  const int per = config.breaks_per_fragment;
  if (breaks.level != TableLevel::breakage || static_cast<int>(breaks.width()) != f + b ||
      breaks.size() != static_cast<std::size_t>(config.n_fragments) * static_cast<std::size_t>(per)) {
    throw ContractViolation("fragment_view: table does not match the random dataset layout");
  }
  FeatureTable t;
  t.level = TableLevel::fragment;
  t.class_names = breaks.class_names;
  for (int j = 1; j <= f; ++j) t.column_names.push_back("frag_" + std::to_string(j));
  for (int k = 1; k <= per; ++k) {
    for (int j = 1; j <= b; ++j) t.column_names.push_back("brk" + std::to_string(k) + "_" + std::to_string(j));
  }
  t.rows.resize(config.n_fragments, f + per * b);
  for (int frag = 0; frag < config.n_fragments; ++frag) {
    const Eigen::Index first = static_cast<Eigen::Index>(frag) * per;
    t.rows.row(frag).head(f) = breaks.rows.row(first).head(f);
    for (int k = 0; k < per; ++k) t.rows.row(frag).segment(f + k * b, b) = breaks.rows.row(first + k).tail(b);
    const auto r = static_cast<std::size_t>(first);
    t.labels.push_back(breaks.labels[r]);
    t.group_ids.push_back(breaks.group_ids[r]);
    t.row_ids.push_back(breaks.group_ids[r]);
  }
  return t;
}

FeatureTable generate_blob_dataset(int n_per_class, int dims, double separation_sigmas, std::uint64_t seed) {
  if (n_per_class < 1 || dims < 1) throw ValidationError("blob dataset: n_per_class and dims must be >= 1");
  if (!(separation_sigmas >= 0.0)) throw ValidationError("blob dataset: separation must be >= 0");
  FeatureTable t;
  t.level = TableLevel::fragment;
  for (int j = 1; j <= dims; ++j) t.column_names.push_back("x" + std::to_string(j));
  t.class_names = {"a", "b"};
  t.rows.resize(2 * n_per_class, dims);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index r = 0; r < t.rows.rows(); ++r) {
    const int label = r < n_per_class ? 0 : 1;
    for (int j = 0; j < dims; ++j) t.rows(r, j) = normal(rng);
    t.rows(r, 0) += (label == 0 ? -0.5 : 0.5) * separation_sigmas;
    t.labels.push_back(label);
    t.group_ids.push_back("blob" + std::to_string(r));
    t.row_ids.push_back(t.group_ids.back());
  }
  return t;
}

}  // namespace bonefrag
