#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bonefrag/feature_table.hpp"

namespace bonefrag {

enum class ColumnKind { numeric, boolean, categorical, label, group, drop };

struct ColumnRule {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // Keep a boolean column even when it holds out-of-domain tokens.
  bool force_keep = false;
};

struct SchemaConfig {
  std::vector<ColumnRule> columns;
  TableLevel level = TableLevel::breakage;
};

// {"level": "break"|"fragment", "columns": [{"name": ..., "kind": ..., "force_keep": bool}, ...]}
SchemaConfig schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const SchemaConfig& schema);

enum class Disposition { kept, one_hot, label, group, dropped_redundant, dropped_corrupted, kept_corrupted, ignored };

std::string_view to_string(Disposition d);

struct ColumnReport {
  std::string column;
  Disposition disposition = Disposition::kept;
  std::vector<std::string> offending_tokens;  // sorted, corrupted booleans only
  std::vector<std::string> output_columns;
};

struct CleaningReport {
  std::vector<ColumnReport> columns;
  std::size_t rows_read = 0;
  std::vector<std::size_t> rejected_lines;  // rows with missing required fields
  bool row_level_groups = false;            // no group column: every row is its own group

  std::string to_text() const;
};

struct IngestResult {
  FeatureTable table;
  CleaningReport report;
};

// Booleans map present/true -> 1 and absent/false -> 0 (case-insensitive).
// A boolean column with any other token is reported corrupted and excluded
// unless force_keep is set. Categoricals are one-hot encoded; a two-level
// categorical collapses to one indicator for the later level. Rows missing
// a required field are rejected and listed in the report, never imputed.
IngestResult ingest_tabular_csv(const std::filesystem::path& path, const SchemaConfig& schema);
IngestResult ingest_tabular_text(std::string_view text, const SchemaConfig& schema,
                                 std::string_view source_name = "<memory>");

}  // namespace bonefrag
