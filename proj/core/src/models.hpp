#pragma once

#include <memory>
#include <span>

#include "bonefrag/classifier.hpp"

namespace bonefrag::detail {

struct TrainingSet {
  const Matrix& rows;  // standardized
  std::span<const int> labels;
  int n_classes;
};

std::shared_ptr<const Model> train_random_forest(const RandomForestParams& p, const TrainingSet& data,
                                                 std::uint64_t seed);
std::shared_ptr<const Model> train_linear_svm(const LinearSvmParams& p, const TrainingSet& data, std::uint64_t seed);
std::shared_ptr<const Model> train_rbf_svm(const RbfSvmParams& p, const TrainingSet& data);
std::shared_ptr<const Model> train_neural_net(const NeuralNetParams& p, const TrainingSet& data, std::uint64_t seed);
std::shared_ptr<const Model> train_lda(const LdaParams& p, const TrainingSet& data);
std::shared_ptr<const Model> train_gaussian_nb(const GaussianNbParams& p, const TrainingSet& data);
std::shared_ptr<const Model> train_knn(const KnnParams& p, const TrainingSet& data);

// Index of the largest score; the lowest index wins exact ties.
template <typename Scores>
int argmax(const Scores& scores, int n) {
  int best = 0;
  for (int k = 1; k < n; ++k) {
    if (scores[k] > scores[best]) best = k;
  }
  return best;
}

}  // namespace bonefrag::detail
