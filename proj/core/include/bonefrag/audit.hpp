#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bonefrag/classifier_spec.hpp"
#include "bonefrag/diagnostics.hpp"
#include "bonefrag/synthetic.hpp"

namespace bonefrag {

enum class AuditProtocol { break_level_split, frag_split_bootstrapped, frag_split_proper };

inline constexpr AuditProtocol kAuditProtocols[] = {AuditProtocol::break_level_split,
                                                    AuditProtocol::frag_split_bootstrapped,
                                                    AuditProtocol::frag_split_proper};

std::string_view to_string(AuditProtocol p);

// lda, random_forest, linear_svm, rbf_svm, knn with k = 1, compact neural_net.
std::vector<ClassifierSpec> default_audit_specs();

struct AuditConfig {
  RandomDatasetConfig data;  // data.seed is the master seed
  std::size_t n_trials = 100;
  double test_fraction = 0.25;
  std::size_t bootstrap_factor = 100;
  std::vector<ClassifierSpec> specs = default_audit_specs();
  unsigned threads = 0;
  Diagnostics* diagnostics = nullptr;

  void validate() const;
};

struct AuditCell {
  AuditProtocol protocol = AuditProtocol::break_level_split;
  std::string algorithm;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t n_trials = 0;
  std::vector<double> accuracies;  // by trial index
};

struct AuditReport {
  std::vector<AuditCell> cells;  // protocol-major, specs in config order
  std::uint64_t seed = 0;

  const AuditCell& at(AuditProtocol protocol, std::string_view algorithm) const;
};

// Each trial draws a fresh random dataset and scores every spec under:
//  A  break rows split ignoring fragments,
//  B  fragment rows bootstrapped (factor copies) and then split,
//  C  fragment rows split properly.
// Accuracies are over test rows (breaks for A, fragments for B and C).
AuditReport run_leakage_audit(const AuditConfig& config);

// `protocol,algorithm,mean_accuracy,std_accuracy,n_trials,seed`
std::string audit_csv(const AuditReport& report);
// Percentages as "mean (std)", one row per algorithm, one column per protocol.
std::string audit_table_text(const AuditReport& report);

}  // namespace bonefrag
