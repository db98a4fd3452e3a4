#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bonefrag {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class TableLevel { breakage, fragment };

std::string_view to_string(TableLevel level);

// Labelled numeric matrix with one group (fragment) id per row. Every
// learner and protocol consumes this.
struct FeatureTable {
  TableLevel level = TableLevel::fragment;
  std::vector<std::string> column_names;
  Matrix rows;
  std::vector<int> labels;               // indices into class_names
  std::vector<std::string> class_names;  // sorted
  std::vector<std::string> group_ids;    // fragment id of each row
  std::vector<std::string> row_ids;      // break id (break level) or fragment id

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(rows.cols()); }
  int n_classes() const { return static_cast<int>(class_names.size()); }

  // Throws ContractViolation if any structural invariant fails.
  void validate() const;

  FeatureTable subset(std::span<const std::size_t> row_indices) const;

  // Distinct group ids in order of first appearance.
  std::vector<std::string> distinct_groups() const;
};

// Builds class_names (sorted unique) and label indices from raw label strings.
void assign_labels(FeatureTable& table, std::span<const std::string> raw_labels);

// Features CSV: `fragment_id[,break_id],label,<columns...>`; the break_id
// column is present exactly for break-level tables. Values are written in
// shortest round-trip form, so reading back is bit-exact.
void write_features_csv(const FeatureTable& table, const std::filesystem::path& path);
std::string features_csv_text(const FeatureTable& table);
FeatureTable read_features_csv(const std::filesystem::path& path);
FeatureTable parse_features_csv(std::string_view text, std::string_view source_name = "<memory>");

}  // namespace bonefrag
