#include "bonefrag/standardizer.hpp"

#include <cmath>

#include "bonefrag/error.hpp"

namespace bonefrag {

Standardizer Standardizer::fit(const Matrix& train_rows) {
  if (train_rows.rows() == 0) throw ContractViolation("Standardizer::fit: no rows");
  Standardizer s;
  const double n = static_cast<double>(train_rows.rows());
  s.mean_ = train_rows.colwise().sum().transpose() / n;
  s.std_.resize(train_rows.cols());
  for (Eigen::Index c = 0; c < train_rows.cols(); ++c) {
    const double var = (train_rows.col(c).array() - s.mean_(c)).square().sum() / n;
    s.std_(c) = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::transform(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != width()) {
    throw ContractViolation("Standardizer::transform: width " + std::to_string(rows.cols()) + " != fitted width " +
                            std::to_string(width()));
  }
  Matrix out(rows.rows(), rows.cols());
  for (Eigen::Index c = 0; c < rows.cols(); ++c) {
    if (std_(c) < kStdFloor) {
      out.col(c).setZero();
    } else {
      out.col(c) = (rows.col(c).array() - mean_(c)) / std_(c);
    }
  }
  return out;
}

}  // namespace bonefrag
