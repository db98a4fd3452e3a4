#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bonefrag {

enum class Algorithm { random_forest, linear_svm, rbf_svm, neural_net, lda, gaussian_nb, knn };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::random_forest, Algorithm::linear_svm,
                                               Algorithm::rbf_svm,       Algorithm::neural_net,
                                               Algorithm::lda,           Algorithm::gaussian_nb,
                                               Algorithm::knn};

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct RandomForestParams {
  int n_trees = 100;
  int min_leaf = 1;
  int max_features = 0;  // 0 selects floor(sqrt(d))
};

// L2-regularised hinge loss, C * sum(hinge) + ||w||^2 / 2, trained by
// averaged stochastic subgradient descent.
struct LinearSvmParams {
  double c = 1.0;
  int epochs = 20;
};

struct RbfSvmParams {
  double c = 1.0;
  double gamma = 0.0;  // 0 selects 1 / (d * mean feature variance)
  double tolerance = 1e-3;
  long long max_iterations = 10'000'000;
};

struct NeuralNetParams {
  std::vector<int> hidden{100, 1000, 5000};
  double dropout = 0.4;
  int epochs = 100;
  int batch_size = 32;
  double learning_rate = 1.0;
  double lr_decay = 0.9;  // learning rate multiplier applied after every epoch
  double rho = 0.9;
  double eps = 1e-6;

  // Two 64-unit hidden layers and 30 epochs: the profile used by the
  // randomized audit and the test suites.
  static NeuralNetParams compact();
};

struct LdaParams {
  double shrinkage = 1e-6;  // added to the pooled covariance diagonal, times trace / d
};

struct GaussianNbParams {
  double var_smoothing = 1e-9;  // floor relative to the largest feature variance
};

struct KnnParams {
  int k = 25;
};

// Alternative order mirrors Algorithm.
using Hyperparameters = std::variant<RandomForestParams, LinearSvmParams, RbfSvmParams, NeuralNetParams,
                                     LdaParams, GaussianNbParams, KnnParams>;

struct ClassifierSpec {
  Hyperparameters params;
  std::uint64_t seed = 0;

  Algorithm algorithm() const { return static_cast<Algorithm>(params.index()); }
  std::string name() const { return std::string(to_string(algorithm())); }

  // Throws ValidationError when a hyperparameter leaves its domain.
  void validate() const;

  static ClassifierSpec defaults(Algorithm algorithm, std::uint64_t seed = 0);
};

// {"algorithm": "...", "params": {...}, "seed": n}; params not given take
// the defaults, unknown keys are rejected.
ClassifierSpec spec_from_json(const nlohmann::json& j, std::string_view path = "spec");
nlohmann::json spec_to_json(const ClassifierSpec& spec);

}  // namespace bonefrag
