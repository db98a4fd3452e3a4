#include "bonefrag/feature_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"

namespace bonefrag {

std::string_view to_string(TableLevel level) { return level == TableLevel::breakage ? "break" : "fragment"; }

void FeatureTable::validate() const {
  const std::size_t n = size();
  if (column_names.size() != width()) {
    throw ContractViolation("FeatureTable: " + std::to_string(column_names.size()) + " column names for width " +
                            std::to_string(width()));
  }
  if (labels.size() != n || group_ids.size() != n || row_ids.size() != n) {
    throw ContractViolation("FeatureTable: labels/group_ids/row_ids must have one entry per row");
  }
  for (int label : labels) {
    if (label < 0 || label >= n_classes()) throw ContractViolation("FeatureTable: label index out of range");
  }
  if (!rows.allFinite()) throw ContractViolation("FeatureTable: non-finite feature value");
  if (level == TableLevel::fragment) {
    std::unordered_set<std::string> seen;
    for (const auto& g : group_ids) {
      if (!seen.insert(g).second) {
        throw ContractViolation("FeatureTable: fragment-level table repeats group id '" + g + "'");
      }
    }
  }
}

FeatureTable FeatureTable::subset(std::span<const std::size_t> row_indices) const {
  FeatureTable out;
  out.level = level;
  out.column_names = column_names;
  out.class_names = class_names;
  out.rows.resize(static_cast<Eigen::Index>(row_indices.size()), rows.cols());
  out.labels.reserve(row_indices.size());
  out.group_ids.reserve(row_indices.size());
  out.row_ids.reserve(row_indices.size());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    const std::size_t r = row_indices[i];
    if (r >= size()) throw ContractViolation("FeatureTable::subset: row index out of range");
    out.rows.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(r));
    out.labels.push_back(labels[r]);
    out.group_ids.push_back(group_ids[r]);
    out.row_ids.push_back(row_ids[r]);
  }
  return out;
}

std::vector<std::string> FeatureTable::distinct_groups() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& g : group_ids) {
    if (seen.insert(g).second) out.push_back(g);
  }
  return out;
}

void assign_labels(FeatureTable& table, std::span<const std::string> raw_labels) {
  std::set<std::string> unique(raw_labels.begin(), raw_labels.end());
  table.class_names.assign(unique.begin(), unique.end());
  table.labels.clear();
  table.labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) {
    const auto it = std::lower_bound(table.class_names.begin(), table.class_names.end(), l);
    table.labels.push_back(static_cast<int>(it - table.class_names.begin()));
  }
}

std::string features_csv_text(const FeatureTable& table) {
  table.validate();
  std::ostringstream out;
  std::vector<std::string> header{"fragment_id"};
  if (table.level == TableLevel::breakage) header.push_back("break_id");
  header.push_back("label");
  header.insert(header.end(), table.column_names.begin(), table.column_names.end());
  csv::write_row(out, header);
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> fields{table.group_ids[r]};
    if (table.level == TableLevel::breakage) fields.push_back(table.row_ids[r]);
    fields.push_back(table.class_names[static_cast<std::size_t>(table.labels[r])]);
    for (Eigen::Index c = 0; c < table.rows.cols(); ++c) {
      fields.push_back(csv::format_double(table.rows(static_cast<Eigen::Index>(r), c)));
    }
    csv::write_row(out, fields);
  }
  return out.str();
}

void write_features_csv(const FeatureTable& table, const std::filesystem::path& path) {
  const std::string text = features_csv_text(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write features CSV '" + path.string() + "'");
  out << text;
}

FeatureTable parse_features_csv(std::string_view text, std::string_view source_name) {
  const csv::Document doc = csv::parse(text, source_name);
  const std::string src(source_name);
  if (doc.header.size() < 2 || doc.header[0] != "fragment_id") {
    throw DataError(src + ": features CSV must start with 'fragment_id'");
  }
  FeatureTable table;
  std::size_t first_feature = 2;
  if (doc.header[1] == "break_id") {
    table.level = TableLevel::breakage;
    first_feature = 3;
  }
  if (doc.header.size() < first_feature || doc.header[first_feature - 1] != "label") {
    throw DataError(src + ": features CSV missing 'label' column");
  }
  table.column_names.assign(doc.header.begin() + static_cast<std::ptrdiff_t>(first_feature), doc.header.end());
  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  const auto d = static_cast<Eigen::Index>(table.column_names.size());
  table.rows.resize(n, d);
  std::vector<std::string> raw_labels;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = doc.rows[static_cast<std::size_t>(r)];
    table.group_ids.push_back(row[0]);
    table.row_ids.push_back(table.level == TableLevel::breakage ? row[1] : row[0]);
    raw_labels.push_back(row[first_feature - 1]);
    for (Eigen::Index c = 0; c < d; ++c) {
      double v = 0.0;
      const auto& field = row[first_feature + static_cast<std::size_t>(c)];
      if (!csv::parse_double(field, v)) {
        throw DataError(src + ":" + std::to_string(doc.line_numbers[static_cast<std::size_t>(r)]) + ": column '" +
                        table.column_names[static_cast<std::size_t>(c)] + "': unparseable number '" + field + "'");
      }
      table.rows(r, c) = v;
    }
  }
  assign_labels(table, raw_labels);
  try {
    table.validate();
  } catch (const ContractViolation& e) {
    throw DataError(src + ": " + e.what());
  }
  return table;
}

FeatureTable read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open features CSV '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_features_csv(buffer.str(), path.string());
}

}  // namespace bonefrag
