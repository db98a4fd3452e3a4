#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "bonefrag/classifier.hpp"
#include "bonefrag/classifier_spec.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/standardizer.hpp"

using namespace bonefrag;

namespace {

ClassifierSpec small_spec(Algorithm a, std::uint64_t seed = 11) {
  ClassifierSpec s = ClassifierSpec::defaults(a, seed);
  if (a == Algorithm::neural_net) {
    auto p = NeuralNetParams::compact();
    p.hidden = {16, 16};
    p.epochs = 5;
    s.params = p;
  } else if (a == Algorithm::random_forest) {
    s.params = RandomForestParams{25, 1, 0};
  } else if (a == Algorithm::knn) {
    s.params = KnnParams{5};
  }
  return s;
}

struct Data {
  Matrix x;
  std::vector<int> y;
};

// Two noisy classes, shifted along every axis.
Data noisy(std::size_t n, std::size_t d, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Data out{Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d)), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    out.y.push_back(label);
    for (std::size_t j = 0; j < d; ++j)
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g(rng) + (label ? shift : -shift) + 3.0 * j;
  }
  return out;
}

double accuracy(const std::vector<int>& p, const std::vector<int>& y) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hit += p[i] == y[i];
  return static_cast<double>(hit) / static_cast<double>(y.size());
}

class EveryLearner : public ::testing::TestWithParam<Algorithm> {};

std::string algo_name(const ::testing::TestParamInfo<Algorithm>& info) { return std::string(to_string(info.param)); }

}  // namespace

TEST(Standardizer, TrainOnlyAndConstantColumns) {
  Matrix x(3, 2);
  x << 1, 5, 2, 5, 3, 5;
  const Standardizer s = Standardizer::fit(x);
  EXPECT_DOUBLE_EQ(s.mean()(0), 2.0);
  EXPECT_NEAR(s.std()(0), std::sqrt(2.0 / 3.0), 1e-15);
  const Matrix z = s.transform(x);
  EXPECT_EQ(z(0, 1), 0.0);
  EXPECT_EQ(z(2, 1), 0.0);
  EXPECT_NEAR(z(2, 0), 1.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_THROW(s.transform(Matrix::Zero(1, 3)), ContractViolation);
}

TEST(Knn, OneNeighbourMemorizes) {
  const Data d = noisy(120, 4, 0.1, 3);
  ClassifierSpec s = ClassifierSpec::defaults(Algorithm::knn);
  s.params = KnnParams{1};
  const FittedModel m = fit(s, d.x, d.y, 2);
  EXPECT_EQ(accuracy(m.predict(d.x), d.y), 1.0);
}

TEST(Lda, SymmetricPairPredictsNearSide) {
  Matrix x(10, 2);
  std::vector<int> y;
  for (int r = 0; r < 5; ++r) {
    const double e = 1e-3 * (r - 2);
    x.row(2 * r) << -1.0 + e, e;
    x.row(2 * r + 1) << 1.0 - e, -e;
    y.push_back(0);
    y.push_back(1);
  }
  const FittedModel m = fit(ClassifierSpec::defaults(Algorithm::lda), x, y, 2);
  Matrix q(2, 2);
  q << -2.0, 0.0, 2.0, 0.0;
  EXPECT_EQ(m.predict(q), (std::vector<int>{0, 1}));
}

namespace {

// Hand-computed Gaussian NB log posteriors (up to the shared evidence term)
// on z-scored data, with the floor 1e-9 * max feature variance.
std::vector<double> nb_oracle(const std::vector<double>& xs, const std::vector<int>& ys, double q) {
  const double n = static_cast<double>(xs.size());
  double mu = 0, var = 0;
  for (double v : xs) mu += v / n;
  for (double v : xs) var += (v - mu) * (v - mu) / n;
  const double sd = std::sqrt(var);
  std::vector<double> out;
  for (int k = 0; k < 2; ++k) {
    double m = 0, c = 0, v = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (ys[i] == k) m += (xs[i] - mu) / sd, ++c;
    m /= c;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (ys[i] == k) v += std::pow((xs[i] - mu) / sd - m, 2) / c;
    v = std::max(v, std::max(1e-9 * 1.0, 1e-12));
    const double z = (q - mu) / sd;
    out.push_back(std::log(c / n) - 0.5 * std::log(2 * std::numbers::pi * v) - 0.5 * (z - m) * (z - m) / v);
  }
  return out;
}

}  // namespace

TEST(GaussianNb, MatchesHandPosteriors) {
  const std::vector<double> xs{-1.1, -0.9, 0.9, 1.1};
  const std::vector<int> ys{0, 0, 1, 1};
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x(i, 0) = xs[static_cast<std::size_t>(i)];
  const FittedModel m = fit(ClassifierSpec::defaults(Algorithm::gaussian_nb), x, ys, 2);
  const auto post = nb_oracle(xs, ys, 0.9);
  ASSERT_GT(post[1], post[0]);
  Matrix q(1, 1);
  q(0, 0) = 0.9;
  EXPECT_EQ(m.predict(q), std::vector<int>{1});
  // standardizer mean/std, class means, then class variances: 0.01 / 1.01
  // in z units with the floor inactive
  const auto p = m.parameters();
  EXPECT_NEAR(p[4], 0.01 / 1.01, 1e-12);
  EXPECT_NEAR(p[5], 0.01 / 1.01, 1e-12);
}

TEST(GaussianNb, FloorEngagesOnZeroClassVariance) {
  const std::vector<double> xs{-1, -1, 1, 1};
  const std::vector<int> ys{0, 0, 1, 1};
  Matrix x(4, 1);
  x << -1, -1, 1, 1;
  const FittedModel m = fit(ClassifierSpec::defaults(Algorithm::gaussian_nb), x, ys, 2);
  const auto p = m.parameters();
  EXPECT_DOUBLE_EQ(p[4], 1e-9);
  EXPECT_DOUBLE_EQ(p[5], 1e-9);
  const auto post = nb_oracle(xs, ys, 0.9);
  EXPECT_TRUE(std::isfinite(post[0]) && std::isfinite(post[1]));
  Matrix q(1, 1);
  q(0, 0) = 0.9;
  EXPECT_EQ(m.predict(q), std::vector<int>{post[1] > post[0] ? 1 : 0});
}

TEST(RandomForest, FitsItsTrainingRows) {
  const Data d = noisy(300, 6, 0.3, 5);
  const FittedModel m = fit(ClassifierSpec::defaults(Algorithm::random_forest, 2), d.x, d.y, 2);
  EXPECT_GE(accuracy(m.predict(d.x), d.y), 0.99);
}

TEST(LinearSvm, SeparableHasNoTrainingErrors) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  Matrix x(200, 2);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 200;) {
    const double a = u(rng), b = u(rng);
    const double margin = a + 0.5 * b - 1.0;
    if (std::abs(margin) < 0.5) continue;
    x.row(i++) << a, b;
    y.push_back(margin > 0);
  }
  const FittedModel m = fit(ClassifierSpec::defaults(Algorithm::linear_svm, 4), x, y, 2);
  EXPECT_EQ(accuracy(m.predict(x), y), 1.0);
}

TEST_P(EveryLearner, TestRowsNeverReachParameters) {
  Data d = noisy(80, 3, 0.7, 21);
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < 60; ++i) train_idx.push_back(i);
  auto fit_train = [&](const Data& data) {
    Matrix tx(60, data.x.cols());
    std::vector<int> ty;
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      tx.row(static_cast<Eigen::Index>(i)) = data.x.row(static_cast<Eigen::Index>(train_idx[i]));
      ty.push_back(data.y[train_idx[i]]);
    }
    return fit(small_spec(GetParam()), tx, ty, 2);
  };
  const auto before = fit_train(d).parameters();
  for (Eigen::Index r = 60; r < 80; ++r) d.x.row(r) *= 1e6;
  const auto after = fit_train(d).parameters();
  ASSERT_FALSE(before.empty());
  EXPECT_EQ(before, after);
}

TEST_P(EveryLearner, Deterministic) {
  const Data d = noisy(60, 3, 0.5, 8);
  const FittedModel a = fit(small_spec(GetParam()), d.x, d.y, 2);
  const FittedModel b = fit(small_spec(GetParam()), d.x, d.y, 2);
  EXPECT_EQ(a.parameters(), b.parameters());
  const Data probe = noisy(40, 3, 0.5, 99);
  EXPECT_EQ(a.predict(probe.x), b.predict(probe.x));
}

TEST_P(EveryLearner, ConstantFeatureStaysFinite) {
  Data d = noisy(60, 3, 1.0, 12);
  d.x.col(1).setConstant(4.0);
  const FittedModel m = fit(small_spec(GetParam()), d.x, d.y, 2);
  for (double p : m.parameters()) ASSERT_TRUE(std::isfinite(p));
  const auto pred = m.predict(d.x);
  EXPECT_EQ(pred.size(), 60u);
  EXPECT_GT(accuracy(pred, d.y), 0.5);
}

TEST_P(EveryLearner, RejectsBadInput) {
  const Data d = noisy(20, 3, 1.0, 1);
  const FittedModel m = fit(small_spec(GetParam()), d.x, d.y, 2);
  EXPECT_THROW(m.predict(Matrix::Zero(2, 4)), ContractViolation);
  const std::vector<int> one_class(20, 1);
  EXPECT_THROW(fit(small_spec(GetParam()), d.x, one_class, 2), ContractViolation);
  Matrix bad = d.x;
  bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fit(small_spec(GetParam()), bad, d.y, 2), Error);
}

TEST_P(EveryLearner, SpecJsonRoundTrip) {
  const ClassifierSpec s = small_spec(GetParam(), 77);
  const nlohmann::json j = spec_to_json(s);
  const ClassifierSpec back = spec_from_json(j);
  EXPECT_EQ(back.algorithm(), s.algorithm());
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(spec_to_json(back), j);
}

INSTANTIATE_TEST_SUITE_P(All, EveryLearner, ::testing::ValuesIn(kAllAlgorithms), algo_name);

class ScaleInvariant : public ::testing::TestWithParam<Algorithm> {};

TEST_P(ScaleInvariant, ColumnTimesThousand) {
  const Data train = noisy(100, 4, 0.4, 31);
  const Data test = noisy(50, 4, 0.4, 32);
  ClassifierSpec s = ClassifierSpec::defaults(GetParam(), 5);
  const auto base = fit(s, train.x, train.y, 2).predict(test.x);
  Matrix tx = train.x, qx = test.x;
  tx.col(2) *= 1000.0;
  qx.col(2) *= 1000.0;
  EXPECT_EQ(fit(s, tx, train.y, 2).predict(qx), base);
}

INSTANTIATE_TEST_SUITE_P(ZScored, ScaleInvariant,
                         ::testing::Values(Algorithm::knn, Algorithm::lda, Algorithm::linear_svm), algo_name);

TEST(ClassifierSpec, ValidationAndParsing) {
  ClassifierSpec s = ClassifierSpec::defaults(Algorithm::knn);
  s.params = KnnParams{0};
  EXPECT_THROW(s.validate(), ValidationError);
  s.params = NeuralNetParams{{8}, 1.0};
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(parse_algorithm("svm"), ValidationError);
  EXPECT_THROW(spec_from_json(nlohmann::json{{"algorithm", "knn"}, {"params", {{"kk", 3}}}}), ValidationError);
  const ClassifierSpec c = spec_from_json(nlohmann::json{{"algorithm", "neural_net"}, {"params", {{"profile", "compact"}}}});
  EXPECT_EQ(std::get<NeuralNetParams>(c.params).hidden, (std::vector<int>{64, 64}));
  EXPECT_EQ(std::get<KnnParams>(ClassifierSpec::defaults(Algorithm::knn).params).k, 25);
}
