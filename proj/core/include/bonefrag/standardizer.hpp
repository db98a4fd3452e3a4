#pragma once

#include <span>

#include "bonefrag/feature_table.hpp"

namespace bonefrag {

// Per-feature z-scoring fitted on training rows only. Columns whose
// (population) standard deviation is below 1e-12 map to 0.
class Standardizer {
 public:
  static constexpr double kStdFloor = 1e-12;

  Standardizer() = default;
  static Standardizer fit(const Matrix& train_rows);

  Matrix transform(const Matrix& rows) const;
  std::size_t width() const { return static_cast<std::size_t>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Vector& std() const { return std_; }

 private:
  Vector mean_;
  Vector std_;
};

}  // namespace bonefrag
