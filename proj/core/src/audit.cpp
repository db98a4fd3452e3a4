#include "bonefrag/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "bonefrag/classifier.hpp"
#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/evaluation.hpp"
#include "bonefrag/parallel.hpp"

namespace bonefrag {

std::string_view to_string(AuditProtocol p) {
  switch (p) {
    case AuditProtocol::break_level_split: return "break_level_split";
    case AuditProtocol::frag_split_bootstrapped: return "frag_split_bootstrapped";
    case AuditProtocol::frag_split_proper: return "frag_split_proper";
  }
  return "?";
}

std::vector<ClassifierSpec> default_audit_specs() {
  return {ClassifierSpec{LdaParams{}},
          ClassifierSpec{RandomForestParams{}},
          ClassifierSpec{LinearSvmParams{}},
          ClassifierSpec{RbfSvmParams{}},
          ClassifierSpec{KnnParams{1}},
          ClassifierSpec{NeuralNetParams::compact()}};
}

void AuditConfig::validate() const {
  data.validate();
  if (n_trials < 1) throw ValidationError("n_trials must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ValidationError("test_fraction must lie in (0, 1)");
  if (bootstrap_factor < 1) throw ValidationError("bootstrap_factor must be >= 1");
  if (specs.empty()) throw ValidationError("audit needs at least one algorithm");
  for (const auto& s : specs) s.validate();
}

const AuditCell& AuditReport::at(AuditProtocol protocol, std::string_view algorithm) const {
  for (const auto& c : cells) {
    if (c.protocol == protocol && c.algorithm == algorithm) return c;
  }
  throw ContractViolation("audit report has no cell for " + std::string(to_string(protocol)) + "/" +
                          std::string(algorithm));
}

namespace {

double accuracy_of(const ClassifierSpec& spec, std::uint64_t seed, const FeatureTable& train,
                   const FeatureTable& test) {
  ClassifierSpec s = spec;
  s.seed = derive_seed(seed, spec.seed);
  const std::vector<int> predicted = fit(s, train).predict(test.rows);
  long hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == test.labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

}  // namespace

AuditReport run_leakage_audit(const AuditConfig& config) {
  config.validate();
  emit_warning(config.diagnostics,
               "WARNING: protocols break_level_split and frag_split_bootstrapped leak test information by "
               "construction; their accuracies are invalid and are reported only to expose the leak");
  const std::size_t n_specs = config.specs.size();
  const std::uint64_t master = config.data.seed;
  // [trial][protocol * n_specs + spec]
  std::vector<std::vector<double>> results(config.n_trials, std::vector<double>(3 * n_specs));

  parallel_for(config.n_trials, config.threads, [&](std::size_t trial) {
    const std::uint64_t trial_seed = derive_seed(master, trial);
    RandomDatasetConfig data = config.data;
    data.seed = derive_seed(trial_seed, 0);
    const FeatureTable breaks = generate_random_dataset(data);
    const FeatureTable fragments = fragment_view(breaks, data);

    auto run_all = [&](AuditProtocol p, const FeatureTable& train, const FeatureTable& test) {
      const auto base = static_cast<std::size_t>(p) * n_specs;
      for (std::size_t s = 0; s < n_specs; ++s) {
        results[trial][base + s] = accuracy_of(config.specs[s], derive_seed(trial_seed, 10 + s), train, test);
      }
    };

    {
      std::vector<std::string> row_groups(breaks.size());
      for (std::size_t r = 0; r < breaks.size(); ++r) row_groups[r] = "r" + std::to_string(r);
      FeatureTable by_row = breaks;
      by_row.group_ids = row_groups;
      const RowSplit split = apply_split(by_row, group_split(row_groups, config.test_fraction, derive_seed(trial_seed, 1)));
      run_all(AuditProtocol::break_level_split, breaks.subset(split.train), breaks.subset(split.test));
    }
    {
      Diagnostics quiet;
      Rng rng(derive_seed(trial_seed, 2));
      const FeatureTable inflated = bootstrap_inflate(fragments, config.bootstrap_factor, rng, &quiet);
      const RowSplit split =
          apply_split(inflated, group_split(inflated.group_ids, config.test_fraction, derive_seed(trial_seed, 3)));
      run_all(AuditProtocol::frag_split_bootstrapped, inflated.subset(split.train), inflated.subset(split.test));
    }
    {
      const RowSplit split =
          apply_split(fragments, group_split(fragments.group_ids, config.test_fraction, derive_seed(trial_seed, 4)));
      run_all(AuditProtocol::frag_split_proper, fragments.subset(split.train), fragments.subset(split.test));
    }
  });

  AuditReport report;
  report.seed = master;
  for (AuditProtocol p : kAuditProtocols) {
    for (std::size_t s = 0; s < n_specs; ++s) {
      AuditCell cell;
      cell.protocol = p;
      cell.algorithm = config.specs[s].name();
      cell.n_trials = config.n_trials;
      for (const auto& trial : results) cell.accuracies.push_back(trial[static_cast<std::size_t>(p) * n_specs + s]);
      const double n = static_cast<double>(cell.n_trials);
      cell.mean_accuracy = std::accumulate(cell.accuracies.begin(), cell.accuracies.end(), 0.0) / n;
      double ss = 0.0;
      for (double a : cell.accuracies) ss += (a - cell.mean_accuracy) * (a - cell.mean_accuracy);
      cell.std_accuracy = cell.n_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

std::string audit_csv(const AuditReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"protocol", "algorithm", "mean_accuracy", "std_accuracy", "n_trials", "seed"});
  for (const auto& c : report.cells) {
    csv::write_row(out, {std::string(to_string(c.protocol)), c.algorithm, csv::format_double(c.mean_accuracy),
                         csv::format_double(c.std_accuracy), std::to_string(c.n_trials),
                         std::to_string(report.seed)});
  }
  return out.str();
}

std::string audit_table_text(const AuditReport& report) {
  std::vector<std::string> algorithms;
  for (const auto& c : report.cells) {
    if (std::find(algorithms.begin(), algorithms.end(), c.algorithm) == algorithms.end()) {
      algorithms.push_back(c.algorithm);
    }
  }
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s %-22s %-26s %-22s\n", "algorithm", "break-level split",
                "bootstrapped frag split", "proper frag split");
  out << buf;
  for (const auto& a : algorithms) {
    std::string cols[3];
    for (AuditProtocol p : kAuditProtocols) {
      const AuditCell& c = report.at(p, a);
      char cell[64];
      std::snprintf(cell, sizeof cell, "%.1f (%.1f)", 100.0 * c.mean_accuracy, 100.0 * c.std_accuracy);
      cols[static_cast<int>(p)] = cell;
    }
    std::snprintf(buf, sizeof buf, "%-16s %-22s %-26s %-22s\n", a.c_str(), cols[0].c_str(), cols[1].c_str(),
                  cols[2].c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace bonefrag
