#include "bonefrag/summary_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bonefrag/error.hpp"

namespace bonefrag {

double SummaryStats::get(std::size_t i) const {
  switch (i) {
    case 0:
      return min;
    case 1:
      return max;
    case 2:
      return mean;
    case 3:
      return median;
    case 4:
      return std;
    case 5:
      return range;
    default:
      throw ContractViolation("SummaryStats::get: index out of range");
  }
}

std::array<double, SummaryStats::kCount> SummaryStats::as_array() const {
  return {min, max, mean, median, std, range};
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("summary_stats: empty value list");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw ContractViolation("summary_stats: non-finite value");
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  SummaryStats s;
  s.min = sorted.front();
  s.max = sorted.back();
  s.range = s.max - s.min;
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  // Sorted summation keeps the result independent of input order.
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.mean = sum / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace bonefrag
