#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bonefrag/classifier.hpp"
#include "bonefrag/diagnostics.hpp"
#include "bonefrag/feature_table.hpp"
#include "bonefrag/seeding.hpp"

namespace bonefrag {

struct SplitPlan {
  std::vector<std::string> train_groups;
  std::vector<std::string> test_groups;
  std::uint64_t seed = 0;
};

// Uniform partition of the group ids; |test| = round(test_fraction * n),
// clamped so both sides are non-empty.
SplitPlan group_split(std::span<const std::string> group_ids, double test_fraction, std::uint64_t seed);

struct RowSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Row indices of `table` on each side of `plan`. Rows follow their group.
RowSplit apply_split(const FeatureTable& table, const SplitPlan& plan);

// Modal label per fragment; exact ties drawn uniformly from the tied labels.
std::map<std::string, int> majority_vote(const std::map<std::string, std::vector<int>>& predictions, Rng& rng);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Fold> kfold_plan(std::size_t row_count, std::size_t folds, Rng& rng);

// Leakage antipattern, kept for the audit only: factor * N rows drawn with
// replacement. Every drawn row gets its own group id (`<group>~b<i>`), so a
// later group split scatters copies of one source row across both sides.
FeatureTable bootstrap_inflate(const FeatureTable& table, std::size_t factor, Rng& rng,
                               Diagnostics* diagnostics = nullptr);

enum class Protocol { fragment_level, break_level_voted, row_level_unsafe };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view name);

// Per-fragment scoring shared by experiments and the audit.
struct Score {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // NaN where the class is absent from the test fragments
  std::vector<std::vector<long>> confusion;  // [true][predicted]
  long n_fragments = 0;
};

Score score_predictions(std::span<const int> truth, std::span<const int> predicted, int n_classes);

struct TrialResult {
  std::size_t trial_index = 0;
  std::uint64_t seed = 0;
  Score score;
};

struct ExperimentReport {
  std::string algorithm;
  TableLevel level = TableLevel::fragment;
  Protocol protocol = Protocol::fragment_level;
  std::size_t n_trials = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample std over trials
  std::vector<std::string> class_names;
  std::vector<double> per_class_mean;  // over trials where the class was tested
  std::uint64_t master_seed = 0;
  std::vector<TrialResult> trials;
};

struct ExperimentOptions {
  Protocol protocol = Protocol::fragment_level;
  std::size_t n_trials = 300;
  double test_fraction = 0.25;
  std::uint64_t master_seed = 0;
  unsigned threads = 0;
  Diagnostics* diagnostics = nullptr;
};

using Predictor = std::function<std::vector<int>(const Matrix&)>;
// Builds a predictor from the training rows of one trial.
using Trainer = std::function<Predictor(const FeatureTable& train, std::uint64_t seed)>;

Trainer make_trainer(const ClassifierSpec& spec);

ExperimentReport run_experiment(const FeatureTable& table, const ClassifierSpec& spec, const ExperimentOptions& options);
ExperimentReport run_experiment(const FeatureTable& table, const Trainer& trainer, std::string algorithm_name,
                                const ExperimentOptions& options);

// Aggregates trial scores into mean/std/per-class means.
void summarize(ExperimentReport& report);

std::string report_csv_header(std::span<const std::string> class_names);
std::string report_csv_row(const ExperimentReport& report);
// Header plus one row per report; all reports must share class names.
std::string reports_csv(std::span<const ExperimentReport> reports);

}  // namespace bonefrag
