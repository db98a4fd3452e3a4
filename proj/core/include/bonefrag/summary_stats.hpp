#pragma once

#include <array>
#include <span>
#include <string_view>

namespace bonefrag {

// The six descriptive statistics used throughout the feature schema.
struct SummaryStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single value
  double range = 0.0;

  static constexpr std::size_t kCount = 6;
  static constexpr std::array<std::string_view, kCount> kNames{"min", "max", "mean", "median", "std", "range"};

  // Field access in kNames order.
  double get(std::size_t i) const;
  std::array<double, kCount> as_array() const;
};

// Throws ContractViolation on an empty list or non-finite value.
SummaryStats summary_stats(std::span<const double> values);

}  // namespace bonefrag
