#include "bonefrag/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/parallel.hpp"

namespace bonefrag {

SplitPlan group_split(std::span<const std::string> group_ids, double test_fraction, std::uint64_t seed) {
  const std::size_t n = group_ids.size();
  if (n < 2) throw ContractViolation("group_split: need at least 2 fragments, got " + std::to_string(n));
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ContractViolation("group_split: test_fraction must lie in (0, 1)");
  }
  std::vector<std::string> ids(group_ids.begin(), group_ids.end());
  Rng rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  SplitPlan plan;
  plan.seed = seed;
  plan.test_groups.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  plan.train_groups.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
  return plan;
}

RowSplit apply_split(const FeatureTable& table, const SplitPlan& plan) {
  const std::unordered_set<std::string> test(plan.test_groups.begin(), plan.test_groups.end());
  const std::unordered_set<std::string> train(plan.train_groups.begin(), plan.train_groups.end());
  RowSplit out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (test.count(table.group_ids[r])) {
      out.test.push_back(r);
    } else if (train.count(table.group_ids[r])) {
      out.train.push_back(r);
    } else {
      throw ContractViolation("apply_split: group '" + table.group_ids[r] + "' is in neither side of the plan");
    }
  }
  return out;
}

std::map<std::string, int> majority_vote(const std::map<std::string, std::vector<int>>& predictions, Rng& rng) {
  std::map<std::string, int> out;
  for (const auto& [fragment, labels] : predictions) {
    if (labels.empty()) throw ContractViolation("majority_vote: fragment '" + fragment + "' has no predictions");
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    int best = 0;
    for (const auto& [label, c] : counts) best = std::max(best, c);
    std::vector<int> tied;
    for (const auto& [label, c] : counts) {
      if (c == best) tied.push_back(label);
    }
    if (tied.size() == 1) {
      out[fragment] = tied.front();
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
      out[fragment] = tied[pick(rng)];
    }
  }
  return out;
}

std::vector<Fold> kfold_plan(std::size_t row_count, std::size_t folds, Rng& rng) {
  if (folds < 2) throw ContractViolation("kfold_plan: folds must be >= 2");
  if (row_count < folds) throw ContractViolation("kfold_plan: fewer rows than folds");
  std::vector<std::size_t> order(row_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Fold> out(folds);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = row_count / folds + (f < row_count % folds ? 1 : 0);
    for (std::size_t i = 0; i < row_count; ++i) {
      (i >= start && i < start + size ? out[f].test : out[f].train).push_back(order[i]);
    }
    start += size;
  }
  return out;
}

FeatureTable bootstrap_inflate(const FeatureTable& table, std::size_t factor, Rng& rng, Diagnostics* diagnostics) {
  if (factor < 1) throw ContractViolation("bootstrap_inflate: factor must be >= 1");
  if (table.size() == 0) throw ContractViolation("bootstrap_inflate: empty table");
  emit_warning(diagnostics, "WARNING: bootstrap_inflate resamples before splitting; any accuracy measured "
                            "downstream is invalid (duplicated rows leak across the split)");
  const std::size_t n = table.size();
  std::vector<std::size_t> picks(n * factor);
  std::uniform_int_distribution<std::size_t> draw(0, n - 1);
  for (auto& p : picks) p = draw(rng);
  FeatureTable out = table.subset(picks);
  for (std::size_t i = 0; i < out.size(); ++i) out.group_ids[i] += "~b" + std::to_string(i);
  if (out.level == TableLevel::fragment) {
    for (std::size_t i = 0; i < out.size(); ++i) out.row_ids[i] = out.group_ids[i];
  }
  return out;
}

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::fragment_level: return "fragment_level";
    case Protocol::break_level_voted: return "break_level_voted";
    case Protocol::row_level_unsafe: return "row_level_unsafe";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::fragment_level, Protocol::break_level_voted, Protocol::row_level_unsafe}) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown protocol '" + std::string(name) +
                        "' (expected fragment_level, break_level_voted or row_level_unsafe)");
}

Score score_predictions(std::span<const int> truth, std::span<const int> predicted, int n_classes) {
  if (truth.size() != predicted.size()) throw ContractViolation("score_predictions: length mismatch");
  if (truth.empty()) throw ContractViolation("score_predictions: nothing to score");
  Score s;
  const auto k = static_cast<std::size_t>(n_classes);
  s.confusion.assign(k, std::vector<long>(k, 0));
  long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++s.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
    if (truth[i] == predicted[i]) ++correct;
  }
  s.n_fragments = static_cast<long>(truth.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(s.n_fragments);
  s.per_class_accuracy.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const long total = std::accumulate(s.confusion[c].begin(), s.confusion[c].end(), 0L);
    s.per_class_accuracy[c] = total > 0 ? static_cast<double>(s.confusion[c][c]) / static_cast<double>(total)
                                        : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

Trainer make_trainer(const ClassifierSpec& spec) {
  spec.validate();
  return [spec](const FeatureTable& train, std::uint64_t seed) -> Predictor {
    ClassifierSpec trial_spec = spec;
    trial_spec.seed = derive_seed(seed, spec.seed);
    FittedModel model = fit(trial_spec, train);
    return [model](const Matrix& rows) { return model.predict(rows); };
  };
}

namespace {

TrialResult run_trial(const FeatureTable& table, const std::vector<std::string>& groups, const Trainer& trainer,
                      const ExperimentOptions& options, std::size_t trial) {
  TrialResult result;
  result.trial_index = trial;
  result.seed = derive_seed(options.master_seed, trial);
  const SplitPlan plan = group_split(groups, options.test_fraction, derive_seed(result.seed, 0));
  const RowSplit rows = apply_split(table, plan);
  const FeatureTable train = table.subset(rows.train);
  const FeatureTable test = table.subset(rows.test);
  const Predictor predict = trainer(train, derive_seed(result.seed, 2));
  const std::vector<int> predicted = predict(test.rows);

  if (options.protocol != Protocol::break_level_voted) {
    result.score = score_predictions(test.labels, predicted, table.n_classes());
    return result;
  }
  std::map<std::string, std::vector<int>> by_fragment;
  std::map<std::string, int> truth_of;
  for (std::size_t i = 0; i < test.size(); ++i) {
    by_fragment[test.group_ids[i]].push_back(predicted[i]);
    const auto [it, inserted] = truth_of.emplace(test.group_ids[i], test.labels[i]);
    if (!inserted && it->second != test.labels[i]) {
      throw DataError("fragment '" + test.group_ids[i] + "' has breaks with different labels");
    }
  }
  Rng vote_rng(derive_seed(result.seed, 1));
  const auto voted = majority_vote(by_fragment, vote_rng);
  std::vector<int> truth;
  std::vector<int> pred;
  for (const auto& [fragment, label] : voted) {
    truth.push_back(truth_of.at(fragment));
    pred.push_back(label);
  }
  result.score = score_predictions(truth, pred, table.n_classes());
  return result;
}

}  // namespace

void summarize(ExperimentReport& report) {
  const std::size_t n = report.trials.size();
  report.n_trials = n;
  if (n == 0) throw ContractViolation("summarize: no trials");
  double sum = 0.0;
  for (const auto& t : report.trials) sum += t.score.accuracy;
  report.mean_accuracy = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& t : report.trials) ss += (t.score.accuracy - report.mean_accuracy) * (t.score.accuracy - report.mean_accuracy);
  report.std_accuracy = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  report.per_class_mean.assign(report.class_names.size(), 0.0);
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    double s = 0.0;
    std::size_t m = 0;
    for (const auto& t : report.trials) {
      const double v = t.score.per_class_accuracy[c];
      if (!std::isnan(v)) {
        s += v;
        ++m;
      }
    }
    report.per_class_mean[c] = m > 0 ? s / static_cast<double>(m) : std::numeric_limits<double>::quiet_NaN();
  }
}

ExperimentReport run_experiment(const FeatureTable& table, const ClassifierSpec& spec,
                                const ExperimentOptions& options) {
  return run_experiment(table, make_trainer(spec), spec.name(), options);
}

ExperimentReport run_experiment(const FeatureTable& table, const Trainer& trainer, std::string algorithm_name,
                                const ExperimentOptions& options) {
  table.validate();
  if (options.n_trials == 0) throw ValidationError("n_trials must be >= 1");
  switch (options.protocol) {
    case Protocol::fragment_level:
      if (table.level != TableLevel::fragment) {
        throw ValidationError("protocol fragment_level requires a fragment-level table, got a break-level table");
      }
      break;
    case Protocol::break_level_voted:
      if (table.level != TableLevel::breakage) {
        throw ValidationError("protocol break_level_voted requires a break-level table, got a fragment-level table");
      }
      break;
    case Protocol::row_level_unsafe:
      emit_warning(options.diagnostics,
                   "WARNING: protocol row_level_unsafe splits rows, not fragments; sibling breaks may leak "
                   "across the split");
      break;
  }

  FeatureTable working = table;
  if (options.protocol == Protocol::row_level_unsafe) {
    for (std::size_t r = 0; r < working.size(); ++r) working.group_ids[r] = "row" + std::to_string(r);
  }
  const std::vector<std::string> groups = working.distinct_groups();

  ExperimentReport report;
  report.algorithm = std::move(algorithm_name);
  report.level = table.level;
  report.protocol = options.protocol;
  report.class_names = table.class_names;
  report.master_seed = options.master_seed;
  report.trials.resize(options.n_trials);
  parallel_for(options.n_trials, options.threads, [&](std::size_t t) {
    try {
      report.trials[t] = run_trial(working, groups, trainer, options, t);
    } catch (const Error& e) {
      const std::string msg = "trial " + std::to_string(t) + " (seed " +
                              std::to_string(derive_seed(options.master_seed, t)) + ") failed: " + e.what();
      if (dynamic_cast<const DataError*>(&e)) throw DataError(msg);
      if (dynamic_cast<const ValidationError*>(&e)) throw ValidationError(msg);
      if (dynamic_cast<const ContractViolation*>(&e)) throw ContractViolation(msg);
      throw Error(msg);
    }
  });
  summarize(report);
  return report;
}

std::string report_csv_header(std::span<const std::string> class_names) {
  std::vector<std::string> fields{"algorithm", "level", "protocol", "n_trials", "mean_accuracy", "std_accuracy"};
  for (const auto& c : class_names) fields.push_back("acc_class_" + c);
  fields.push_back("master_seed");
  std::ostringstream out;
  csv::write_row(out, fields);
  return out.str();
}

std::string report_csv_row(const ExperimentReport& report) {
  std::vector<std::string> fields{report.algorithm,
                                  std::string(to_string(report.level)),
                                  std::string(to_string(report.protocol)),
                                  std::to_string(report.n_trials),
                                  csv::format_double(report.mean_accuracy),
                                  csv::format_double(report.std_accuracy)};
  for (double v : report.per_class_mean) fields.push_back(std::isnan(v) ? "" : csv::format_double(v));
  fields.push_back(std::to_string(report.master_seed));
  std::ostringstream out;
  csv::write_row(out, fields);
  return out.str();
}

std::string reports_csv(std::span<const ExperimentReport> reports) {
  if (reports.empty()) throw ContractViolation("reports_csv: no reports");
  std::string out = report_csv_header(reports.front().class_names);
  for (const auto& r : reports) {
    if (r.class_names != reports.front().class_names) {
      throw ContractViolation("reports_csv: reports disagree on class names");
    }
    out += report_csv_row(r);
  }
  return out;
}

}  // namespace bonefrag
