#include <algorithm>
#include <cmath>
#include <limits>

#include "models.hpp"

namespace bonefrag::detail {
namespace {

constexpr double kTau = 1e-12;
constexpr Eigen::Index kPrecomputeLimit = 4000;

class Kernel {
 public:
  Kernel(const Matrix& x, double gamma) : x_(x), gamma_(gamma), norms_(x.rowwise().squaredNorm()) {
    if (x.rows() <= kPrecomputeLimit) {
      full_ = Eigen::MatrixXd(x.rows(), x.rows());
      for (Eigen::Index i = 0; i < x.rows(); ++i) full_.col(i) = compute(i);
    }
  }

  Eigen::VectorXd row(Eigen::Index i) const { return full_.size() > 0 ? Eigen::VectorXd(full_.col(i)) : compute(i); }

 private:
  Eigen::VectorXd compute(Eigen::Index i) const {
    Eigen::VectorXd dots = x_ * x_.row(i).transpose();
    Eigen::VectorXd k(x_.rows());
    for (Eigen::Index t = 0; t < x_.rows(); ++t) {
      k[t] = std::exp(-gamma_ * std::max(0.0, norms_[t] + norms_[i] - 2.0 * dots[t]));
    }
    return k;
  }

  const Matrix& x_;
  double gamma_;
  Eigen::VectorXd norms_;
  Eigen::MatrixXd full_;
};

struct BinarySolution {
  Eigen::VectorXd coef;  // alpha_i * y_i
  double rho = 0.0;
};

// SMO with second-order working set selection, no shrinking. Box bounds
// differ per row because a merged row carries the weight of its copies.
BinarySolution solve(const Kernel& kernel, const std::vector<double>& y, const std::vector<double>& upper,
                     double tolerance, long long max_iterations) {
  const auto n = static_cast<Eigen::Index>(y.size());
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);
  auto at_upper = [&](Eigen::Index t) { return alpha[t] >= upper[static_cast<std::size_t>(t)]; };
  auto at_lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };
  auto in_up = [&](Eigen::Index t) { return y[static_cast<std::size_t>(t)] > 0 ? !at_upper(t) : !at_lower(t); };
  auto in_low = [&](Eigen::Index t) { return y[static_cast<std::size_t>(t)] > 0 ? !at_lower(t) : !at_upper(t); };

  for (long long iter = 0; iter < max_iterations; ++iter) {
    Eigen::Index i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_up(t)) continue;
      const double v = -y[static_cast<std::size_t>(t)] * grad[t];
      if (v > gmax) {
        gmax = v;
        i = t;
      }
    }
    if (i < 0) break;
    const Eigen::VectorXd ki = kernel.row(i);
    Eigen::Index j = -1;
    double gmin = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[static_cast<std::size_t>(t)] * grad[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b <= 0) continue;
      double a = ki[i] + 1.0 - 2.0 * ki[t];  // K(t,t) = 1 for the RBF kernel
      if (a <= 0) a = kTau;
      const double obj = -(b * b) / a;
      if (obj < best_obj) {
        best_obj = obj;
        j = t;
      }
    }
    if (j < 0 || gmax - gmin < tolerance) break;
    const Eigen::VectorXd kj = kernel.row(j);

    const double yi = y[static_cast<std::size_t>(i)];
    const double yj = y[static_cast<std::size_t>(j)];
    const double ci = upper[static_cast<std::size_t>(i)];
    const double cj = upper[static_cast<std::size_t>(j)];
    const double qij = yi * yj * ki[j];
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double ai = old_ai;
    double aj = old_aj;
    if (yi != yj) {
      double quad = ki[i] + kj[j] + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > ci - cj) {
        if (ai > ci) {
          ai = ci;
          aj = ci - diff;
        }
      } else if (aj > cj) {
        aj = cj;
        ai = cj + diff;
      }
    } else {
      double quad = ki[i] + kj[j] - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) {
          ai = ci;
          aj = sum - ci;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > cj) {
        if (aj > cj) {
          aj = cj;
          ai = sum - cj;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    alpha[i] = ai;
    alpha[j] = aj;
    const double dai = ai - old_ai;
    const double daj = aj - old_aj;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yt = y[static_cast<std::size_t>(t)];
      grad[t] += yt * (yi * ki[t] * dai + yj * kj[t] * daj);
    }
  }

  int n_free = 0;
  double sum_free = 0.0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yt = y[static_cast<std::size_t>(t)];
    const double yg = yt * grad[t];
    if (at_upper(t)) {
      if (yt < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (yt > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  BinarySolution s;
  s.rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  s.coef = alpha.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(y.data(), n));
  return s;
}

class RbfSvmModel final : public Model {
 public:
  RbfSvmModel(Matrix support, Eigen::MatrixXd coef, Eigen::VectorXd rho, double gamma, int n_classes)
      : support_(std::move(support)), coef_(std::move(coef)), rho_(std::move(rho)), gamma_(gamma),
        n_classes_(n_classes), norms_(support_.rowwise().squaredNorm()) {}

  std::vector<int> predict(const Matrix& z) const override {
    std::vector<int> out(static_cast<std::size_t>(z.rows()));
    Eigen::VectorXd k(support_.rows());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const double zn = z.row(r).squaredNorm();
      const Eigen::VectorXd dots = support_ * z.row(r).transpose();
      for (Eigen::Index t = 0; t < support_.rows(); ++t) {
        k[t] = std::exp(-gamma_ * std::max(0.0, norms_[t] + zn - 2.0 * dots[t]));
      }
      const Eigen::VectorXd scores = coef_.transpose() * k - rho_;
      out[static_cast<std::size_t>(r)] =
          n_classes_ == 2 ? (scores[0] > 0 ? 1 : 0) : argmax(scores, static_cast<int>(scores.size()));
    }
    return out;
  }

  std::vector<double> parameters() const override {
    std::vector<double> p(support_.data(), support_.data() + support_.size());
    p.insert(p.end(), coef_.data(), coef_.data() + coef_.size());
    p.insert(p.end(), rho_.data(), rho_.data() + rho_.size());
    p.push_back(gamma_);
    return p;
  }

 private:
  Matrix support_;
  Eigen::MatrixXd coef_;
  Eigen::VectorXd rho_;
  double gamma_;
  int n_classes_;
  Eigen::VectorXd norms_;
};

}  // namespace

std::shared_ptr<const Model> train_rbf_svm(const RbfSvmParams& p, const TrainingSet& data) {
  const CompressedRows c = compress_rows(data.rows, data.labels);
  const Eigen::Index n = c.rows.rows();
  const Eigen::Index d = c.rows.cols();

  double gamma = p.gamma;
  if (gamma <= 0) {
    // Variance over every entry of the (uncompressed) training matrix.
    double total = 0.0;
    double sum = 0.0;
    double sq = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double w = c.weights[static_cast<std::size_t>(r)];
      total += w * static_cast<double>(d);
      sum += w * c.rows.row(r).sum();
      sq += w * c.rows.row(r).squaredNorm();
    }
    const double mean = sum / total;
    const double var = sq / total - mean * mean;
    gamma = var > 1e-12 ? 1.0 / (static_cast<double>(d) * var) : 1.0;
  }

  const Kernel kernel(c.rows, gamma);
  std::vector<double> upper(c.weights.size());
  for (std::size_t t = 0; t < upper.size(); ++t) upper[t] = p.c * c.weights[t];

  const int problems = data.n_classes == 2 ? 1 : data.n_classes;
  Eigen::MatrixXd coef(n, problems);
  Eigen::VectorXd rho(problems);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int k = 0; k < problems; ++k) {
    const int positive = data.n_classes == 2 ? 1 : k;
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t t = 0; t < y.size(); ++t) {
      y[t] = c.labels[t] == positive ? 1.0 : -1.0;
      (y[t] > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
      // Class absent from the training rows: never the top score.
      coef.col(k).setZero();
      rho[k] = has_pos ? -1.0 : 1.0;
      continue;
    }
    const BinarySolution s = solve(kernel, y, upper, p.tolerance, p.max_iterations);
    coef.col(k) = s.coef;
    rho[k] = s.rho;
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (coef.row(t).cwiseAbs().maxCoeff() > 0) keep.push_back(t);
  }
  Matrix support(static_cast<Eigen::Index>(keep.size()), d);
  Eigen::MatrixXd kept_coef(static_cast<Eigen::Index>(keep.size()), problems);
  for (std::size_t s = 0; s < keep.size(); ++s) {
    support.row(static_cast<Eigen::Index>(s)) = c.rows.row(keep[s]);
    kept_coef.row(static_cast<Eigen::Index>(s)) = coef.row(keep[s]);
  }
  return std::make_shared<RbfSvmModel>(std::move(support), std::move(kept_coef), std::move(rho), gamma,
                                       data.n_classes);
}

}  // namespace bonefrag::detail
