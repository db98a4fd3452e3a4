#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "models.hpp"

namespace bonefrag::detail {
namespace {

// Shared-covariance Gaussian discriminant:
//   score_k(x) = x . a_k - mu_k . a_k / 2 + log(prior_k),  S a_k = mu_k
class LdaModel final : public Model {
 public:
  LdaModel(Matrix coef, Vector intercept) : coef_(std::move(coef)), intercept_(std::move(intercept)) {}

  std::vector<int> predict(const Matrix& z) const override {
    const Matrix scores = (z * coef_.transpose()).rowwise() + intercept_.transpose();
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index r = 0; r < z.rows(); ++r) out[static_cast<std::size_t>(r)] = argmax(scores.row(r), static_cast<int>(scores.cols()));
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p(coef_.data(), coef_.data() + coef_.size());
    p.insert(p.end(), intercept_.data(), intercept_.data() + intercept_.size());
    return p;
  }

 private:
  Matrix coef_;       // n_classes x d
  Vector intercept_;  // n_classes
};

}  // namespace

std::shared_ptr<const Model> train_lda(const LdaParams& p, const TrainingSet& data) {
  const CompressedRows c = compress_rows(data.rows, data.labels);
  const auto d = c.rows.cols();
  const int k_classes = data.n_classes;

  Matrix means = Matrix::Zero(k_classes, d);
  Vector class_weight = Vector::Zero(k_classes);
  for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
    const int k = c.labels[static_cast<std::size_t>(r)];
    means.row(k) += c.weights[static_cast<std::size_t>(r)] * c.rows.row(r);
    class_weight(k) += c.weights[static_cast<std::size_t>(r)];
  }
  int present = 0;
  for (int k = 0; k < k_classes; ++k) {
    if (class_weight(k) > 0) {
      means.row(k) /= class_weight(k);
      ++present;
    }
  }
  const double total = class_weight.sum();

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
    const Eigen::VectorXd diff = (c.rows.row(r) - means.row(c.labels[static_cast<std::size_t>(r)])).transpose();
    cov.noalias() += c.weights[static_cast<std::size_t>(r)] * diff * diff.transpose();
  }
  const double dof = total - present > 0 ? total - present : total;
  cov /= dof;
  const double ridge = std::max(p.shrinkage * cov.trace() / static_cast<double>(d), 1e-12);
  cov.diagonal().array() += ridge;

  const Eigen::LDLT<Eigen::MatrixXd> solver(cov);
  Matrix coef = Matrix::Zero(k_classes, d);
  Vector intercept = Vector::Constant(k_classes, -std::numeric_limits<double>::infinity());
  for (int k = 0; k < k_classes; ++k) {
    if (class_weight(k) <= 0) continue;
    const Eigen::VectorXd mu = means.row(k).transpose();
    const Eigen::VectorXd a = solver.solve(mu);
    coef.row(k) = a.transpose();
    intercept(k) = -0.5 * mu.dot(a) + std::log(class_weight(k) / total);
  }
  return std::make_shared<LdaModel>(std::move(coef), std::move(intercept));
}

}  // namespace bonefrag::detail
