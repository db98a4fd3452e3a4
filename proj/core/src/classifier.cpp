#include "bonefrag/classifier.hpp"

#include <cstring>
#include <set>
#include <string>
#include <unordered_map>

#include "bonefrag/error.hpp"
#include "models.hpp"

namespace bonefrag {

FittedModel::FittedModel(ClassifierSpec spec, Standardizer standardizer, int n_classes,
                         std::shared_ptr<const Model> model)
    : spec_(std::move(spec)), standardizer_(std::move(standardizer)), n_classes_(n_classes), model_(std::move(model)) {}

std::vector<int> FittedModel::predict(const Matrix& rows) const {
  if (static_cast<std::size_t>(rows.cols()) != width()) {
    throw ContractViolation("predict: row width " + std::to_string(rows.cols()) + " does not match training width " +
                            std::to_string(width()));
  }
  if (rows.rows() == 0) return {};
  return model_->predict(standardizer_.transform(rows));
}

std::vector<double> FittedModel::parameters() const {
  std::vector<double> out(standardizer_.mean().data(), standardizer_.mean().data() + standardizer_.mean().size());
  out.insert(out.end(), standardizer_.std().data(), standardizer_.std().data() + standardizer_.std().size());
  const auto inner = model_->parameters();
  out.insert(out.end(), inner.begin(), inner.end());
  return out;
}

FittedModel fit(const ClassifierSpec& spec, const Matrix& rows, std::span<const int> labels, int n_classes) {
  spec.validate();
  if (static_cast<std::size_t>(rows.rows()) != labels.size()) {
    throw ContractViolation("fit: " + std::to_string(rows.rows()) + " rows but " + std::to_string(labels.size()) +
                            " labels");
  }
  if (rows.cols() == 0) throw ContractViolation("fit: zero-width feature matrix");
  if (!rows.allFinite()) throw ContractViolation("fit: non-finite feature value in training rows");
  std::set<int> present;
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw ContractViolation("fit: label index out of range");
    present.insert(l);
  }
  if (present.size() < 2) throw ContractViolation("fit: training data must contain at least two classes");

  Standardizer standardizer = Standardizer::fit(rows);
  const Matrix z = standardizer.transform(rows);
  const detail::TrainingSet data{z, labels, n_classes};

  std::shared_ptr<const Model> model;
  switch (spec.algorithm()) {
    case Algorithm::random_forest:
      model = detail::train_random_forest(std::get<RandomForestParams>(spec.params), data, spec.seed);
      break;
    case Algorithm::linear_svm:
      model = detail::train_linear_svm(std::get<LinearSvmParams>(spec.params), data, spec.seed);
      break;
    case Algorithm::rbf_svm:
      model = detail::train_rbf_svm(std::get<RbfSvmParams>(spec.params), data);
      break;
    case Algorithm::neural_net:
      model = detail::train_neural_net(std::get<NeuralNetParams>(spec.params), data, spec.seed);
      break;
    case Algorithm::lda:
      model = detail::train_lda(std::get<LdaParams>(spec.params), data);
      break;
    case Algorithm::gaussian_nb:
      model = detail::train_gaussian_nb(std::get<GaussianNbParams>(spec.params), data);
      break;
    case Algorithm::knn:
      model = detail::train_knn(std::get<KnnParams>(spec.params), data);
      break;
  }
  return FittedModel(spec, std::move(standardizer), n_classes, std::move(model));
}

FittedModel fit(const ClassifierSpec& spec, const FeatureTable& training_rows) {
  return fit(spec, training_rows.rows, training_rows.labels, training_rows.n_classes());
}

std::vector<int> predict(const FittedModel& model, const Matrix& rows) { return model.predict(rows); }

CompressedRows compress_rows(const Matrix& rows, std::span<const int> labels) {
  CompressedRows out;
  const auto n = rows.rows();
  const auto d = rows.cols();
  std::unordered_map<std::string, std::size_t> index;
  std::vector<Eigen::Index> firsts;
  out.unique_of_row.resize(static_cast<std::size_t>(n));
  std::string key(static_cast<std::size_t>(d) * sizeof(double) + sizeof(int), '\0');
  for (Eigen::Index r = 0; r < n; ++r) {
    std::memcpy(key.data(), rows.row(r).data(), static_cast<std::size_t>(d) * sizeof(double));
    std::memcpy(key.data() + d * sizeof(double), &labels[static_cast<std::size_t>(r)], sizeof(int));
    auto [it, inserted] = index.try_emplace(key, firsts.size());
    if (inserted) {
      firsts.push_back(r);
      out.weights.push_back(0.0);
      out.labels.push_back(labels[static_cast<std::size_t>(r)]);
    }
    out.weights[it->second] += 1.0;
    out.unique_of_row[static_cast<std::size_t>(r)] = it->second;
  }
  out.rows.resize(static_cast<Eigen::Index>(firsts.size()), d);
  for (std::size_t u = 0; u < firsts.size(); ++u) out.rows.row(static_cast<Eigen::Index>(u)) = rows.row(firsts[u]);
  return out;
}

}  // namespace bonefrag
