#include <algorithm>
#include <cmath>
#include <numeric>

#include "bonefrag/seeding.hpp"
#include "models.hpp"

namespace bonefrag::detail {
namespace {

// Weights per binary problem; the last coefficient multiplies a constant 1.
using Weights = Eigen::VectorXd;

class LinearSvmModel final : public Model {
 public:
  LinearSvmModel(std::vector<Weights> w, int n_classes) : w_(std::move(w)), n_classes_(n_classes) {}

  std::vector<int> predict(const Matrix& z) const override {
    const Eigen::Index d = z.cols();
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    std::vector<double> scores(w_.size());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      for (std::size_t k = 0; k < w_.size(); ++k) {
        scores[k] = z.row(r).dot(w_[k].head(d)) + w_[k][d];
      }
      out[static_cast<std::size_t>(r)] =
          n_classes_ == 2 ? (scores[0] > 0 ? 1 : 0) : argmax(scores, static_cast<int>(scores.size()));
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p;
    for (const auto& w : w_) p.insert(p.end(), w.data(), w.data() + w.size());
    return p;
  }

 private:
  std::vector<Weights> w_;
  int n_classes_;
};

Weights pegasos(const Matrix& x, const std::vector<double>& y, double c, int epochs, Rng& rng) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double lambda = 1.0 / (c * static_cast<double>(n));
  const long long total = static_cast<long long>(epochs) * n;
  Weights w = Weights::Zero(d + 1);
  Weights avg = Weights::Zero(d + 1);
  long long averaged = 0;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  long long t = 0;
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double yi = y[static_cast<std::size_t>(i)];
      const double margin = yi * (x.row(i).dot(w.head(d)) + w[d]);
      w *= 1.0 - eta * lambda;
      if (margin < 1.0) {
        w.head(d).noalias() += (eta * yi) * x.row(i).transpose();
        w[d] += eta * yi;
      }
      const double norm = w.norm();
      const double radius = 1.0 / std::sqrt(lambda);
      if (norm > radius) w *= radius / norm;
      if (2 * t > total) {
        avg += w;
        ++averaged;
      }
    }
  }
  if (averaged > 0) avg /= static_cast<double>(averaged);
  return avg;
}

}  // namespace

std::shared_ptr<const Model> train_linear_svm(const LinearSvmParams& p, const TrainingSet& data,
                                              std::uint64_t seed) {
  const int problems = data.n_classes == 2 ? 1 : data.n_classes;
  std::vector<Weights> weights;
  std::vector<double> y(data.labels.size());
  for (int k = 0; k < problems; ++k) {
    const int positive = data.n_classes == 2 ? 1 : k;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.labels[i] == positive ? 1.0 : -1.0;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    weights.push_back(pegasos(data.rows, y, p.c, p.epochs, rng));
  }
  return std::make_shared<LinearSvmModel>(std::move(weights), data.n_classes);
}

}  // namespace bonefrag::detail
