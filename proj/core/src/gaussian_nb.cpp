#include <cmath>
#include <limits>
#include <numbers>

#include "models.hpp"

namespace bonefrag::detail {
namespace {

class GaussianNbModel final : public Model {
 public:
  GaussianNbModel(Matrix means, Matrix vars, Vector log_prior)
      : means_(std::move(means)), vars_(std::move(vars)), log_prior_(std::move(log_prior)) {}

  std::vector<int> predict(const Matrix& z) const override {
    const int k_classes = static_cast<int>(means_.rows());
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    std::vector<double> scores(static_cast<std::size_t>(k_classes));
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      for (int k = 0; k < k_classes; ++k) {
        if (!std::isfinite(log_prior_(k))) {
          scores[static_cast<std::size_t>(k)] = -std::numeric_limits<double>::infinity();
          continue;
        }
        const auto diff = z.row(r) - means_.row(k);
        double ll = log_prior_(k);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
          const double v = vars_(k, j);
          ll -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + diff(j) * diff(j) / v);
        }
        scores[static_cast<std::size_t>(k)] = ll;
      }
      out[static_cast<std::size_t>(r)] = argmax(scores, k_classes);
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p(means_.data(), means_.data() + means_.size());
    p.insert(p.end(), vars_.data(), vars_.data() + vars_.size());
    p.insert(p.end(), log_prior_.data(), log_prior_.data() + log_prior_.size());
    return p;
  }

 private:
  Matrix means_;
  Matrix vars_;
  Vector log_prior_;
};

}  // namespace

std::shared_ptr<const Model> train_gaussian_nb(const GaussianNbParams& p, const TrainingSet& data) {
  const CompressedRows c = compress_rows(data.rows, data.labels);
  const auto d = c.rows.cols();
  const int k_classes = data.n_classes;
  Matrix means = Matrix::Zero(k_classes, d);
  Matrix vars = Matrix::Zero(k_classes, d);
  Vector weight = Vector::Zero(k_classes);
  for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
    const int k = c.labels[static_cast<std::size_t>(r)];
    means.row(k) += c.weights[static_cast<std::size_t>(r)] * c.rows.row(r);
    weight(k) += c.weights[static_cast<std::size_t>(r)];
  }
  for (int k = 0; k < k_classes; ++k) {
    if (weight(k) > 0) means.row(k) /= weight(k);
  }
  for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
    const int k = c.labels[static_cast<std::size_t>(r)];
    vars.row(k) += c.weights[static_cast<std::size_t>(r)] * (c.rows.row(r) - means.row(k)).array().square().matrix();
  }
  // Floor relative to the widest feature over all training rows.
  const double total = weight.sum();
  Eigen::RowVectorXd overall_mean = Eigen::RowVectorXd::Zero(d);
  for (Eigen::Index r = 0; r < c.rows.rows(); ++r) overall_mean += c.weights[static_cast<std::size_t>(r)] * c.rows.row(r);
  overall_mean /= total;
  double max_var = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    double v = 0.0;
    for (Eigen::Index r = 0; r < c.rows.rows(); ++r) {
      const double diff = c.rows(r, j) - overall_mean(j);
      v += c.weights[static_cast<std::size_t>(r)] * diff * diff;
    }
    max_var = std::max(max_var, v / total);
  }
  const double floor = std::max(p.var_smoothing * max_var, 1e-12);
  Vector log_prior(k_classes);
  for (int k = 0; k < k_classes; ++k) {
    if (weight(k) > 0) {
      vars.row(k) /= weight(k);
      log_prior(k) = std::log(weight(k) / total);
    } else {
      log_prior(k) = -std::numeric_limits<double>::infinity();
    }
    vars.row(k) = vars.row(k).cwiseMax(floor);
  }
  return std::make_shared<GaussianNbModel>(std::move(means), std::move(vars), std::move(log_prior));
}

}  // namespace bonefrag::detail
