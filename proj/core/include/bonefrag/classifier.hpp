#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bonefrag/classifier_spec.hpp"
#include "bonefrag/feature_table.hpp"
#include "bonefrag/standardizer.hpp"

namespace bonefrag {

// Algorithm-specific trained state. Operates on standardized rows.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::vector<int> predict(const Matrix& standardized_rows) const = 0;
  // Every learned number, flattened. Used to prove that fitting never
  // depends on rows outside the training set.
  virtual std::vector<double> parameters() const = 0;
};

// Immutable result of fit(); cheap to copy and safe to share across threads.
class FittedModel {
 public:
  FittedModel(ClassifierSpec spec, Standardizer standardizer, int n_classes, std::shared_ptr<const Model> model);

  const ClassifierSpec& spec() const { return spec_; }
  const Standardizer& standardizer() const { return standardizer_; }
  int n_classes() const { return n_classes_; }
  std::size_t width() const { return standardizer_.width(); }

  std::vector<int> predict(const Matrix& rows) const;
  std::vector<double> parameters() const;

 private:
  ClassifierSpec spec_;
  Standardizer standardizer_;
  int n_classes_;
  std::shared_ptr<const Model> model_;
};

// Fits on exactly the rows given. Labels are class indices in
// [0, n_classes); at least two distinct classes must be present.
FittedModel fit(const ClassifierSpec& spec, const Matrix& rows, std::span<const int> labels, int n_classes);
FittedModel fit(const ClassifierSpec& spec, const FeatureTable& training_rows);

std::vector<int> predict(const FittedModel& model, const Matrix& rows);

// Identical (row, label) pairs merged into one weighted row, in order of
// first occurrence. Several learners train on this exact equivalent of the
// duplicated data.
struct CompressedRows {
  Matrix rows;
  std::vector<int> labels;
  std::vector<double> weights;
  std::vector<std::size_t> unique_of_row;  // original row -> compressed row
};

CompressedRows compress_rows(const Matrix& rows, std::span<const int> labels);

}  // namespace bonefrag
