#pragma once

#include <cstdint>

#include "bonefrag/feature_table.hpp"

namespace bonefrag {

struct RandomDatasetConfig {
  int n_fragments = 200;
  int breaks_per_fragment = 7;
  int n_fragment_features = 34;
  int n_break_features = 6;
  std::uint64_t seed = 0;

  void validate() const;
};

// Break-level table of pure noise: per fragment, standard-normal fragment
// columns (repeated on each of its breaks) then per-break columns. Labels
// "0"/"1" are drawn per fragment and inherited by its breaks.
FeatureTable generate_random_dataset(const RandomDatasetConfig& config);

// One row per fragment: the fragment columns followed by every break's
// columns in break order (`brk<b>_<j>`). Expects the layout produced by
// generate_random_dataset.
FeatureTable fragment_view(const FeatureTable& breaks, const RandomDatasetConfig& config);

// Two unit-variance spherical Gaussian classes "a" and "b" whose means sit
// at -/+ separation_sigmas/2 on the first axis. Fragment level.
FeatureTable generate_blob_dataset(int n_per_class, int dims, double separation_sigmas, std::uint64_t seed);

}  // namespace bonefrag
