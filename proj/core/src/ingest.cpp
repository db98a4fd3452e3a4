#include "bonefrag/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"

namespace bonefrag {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::optional<double> boolean_value(std::string_view token) {
  const std::string t = lower(trim(token));
  if (t == "present" || t == "true") return 1.0;
  if (t == "absent" || t == "false") return 0.0;
  return std::nullopt;
}

ColumnKind parse_kind(const std::string& s) {
  if (s == "numeric") return ColumnKind::numeric;
  if (s == "boolean") return ColumnKind::boolean;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "label") return ColumnKind::label;
  if (s == "group") return ColumnKind::group;
  if (s == "drop") return ColumnKind::drop;
  throw ValidationError("schema: unknown column kind '" + s + "'");
}

std::string kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::numeric:
      return "numeric";
    case ColumnKind::boolean:
      return "boolean";
    case ColumnKind::categorical:
      return "categorical";
    case ColumnKind::label:
      return "label";
    case ColumnKind::group:
      return "group";
    case ColumnKind::drop:
      return "drop";
  }
  return "numeric";
}

}  // namespace

std::string_view to_string(Disposition d) {
  switch (d) {
    case Disposition::kept:
      return "kept";
    case Disposition::one_hot:
      return "one-hot";
    case Disposition::label:
      return "label";
    case Disposition::group:
      return "group";
    case Disposition::dropped_redundant:
      return "dropped-redundant";
    case Disposition::dropped_corrupted:
      return "dropped-corrupted";
    case Disposition::kept_corrupted:
      return "kept-corrupted (forced)";
    case Disposition::ignored:
      return "ignored (undeclared)";
  }
  return "kept";
}

SchemaConfig schema_from_json(const nlohmann::json& j) {
  SchemaConfig schema;
  if (!j.is_object()) throw ValidationError("schema: expected a JSON object");
  if (j.contains("level")) {
    const auto level = j.at("level").get<std::string>();
    if (level == "break") {
      schema.level = TableLevel::breakage;
    } else if (level == "fragment") {
      schema.level = TableLevel::fragment;
    } else {
      throw ValidationError("schema.level: expected 'break' or 'fragment', got '" + level + "'");
    }
  }
  if (!j.contains("columns") || !j.at("columns").is_array()) {
    throw ValidationError("schema.columns: expected an array");
  }
  std::size_t i = 0;
  for (const auto& c : j.at("columns")) {
    const std::string path = "schema.columns[" + std::to_string(i++) + "]";
    if (!c.is_object() || !c.contains("name") || !c.contains("kind")) {
      throw ValidationError(path + ": needs 'name' and 'kind'");
    }
    ColumnRule rule;
    rule.name = c.at("name").get<std::string>();
    try {
      rule.kind = parse_kind(c.at("kind").get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".kind: " + e.what());
    }
    rule.force_keep = c.value("force_keep", false);
    schema.columns.push_back(std::move(rule));
  }
  const auto labels = std::count_if(schema.columns.begin(), schema.columns.end(),
                                    [](const auto& r) { return r.kind == ColumnKind::label; });
  if (labels != 1) throw ValidationError("schema.columns: exactly one 'label' column required");
  const auto groups = std::count_if(schema.columns.begin(), schema.columns.end(),
                                    [](const auto& r) { return r.kind == ColumnKind::group; });
  if (groups > 1) throw ValidationError("schema.columns: at most one 'group' column allowed");
  return schema;
}

nlohmann::json schema_to_json(const SchemaConfig& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& r : schema.columns) {
    nlohmann::json c{{"name", r.name}, {"kind", kind_name(r.kind)}};
    if (r.force_keep) c["force_keep"] = true;
    cols.push_back(c);
  }
  return {{"level", std::string(to_string(schema.level))}, {"columns", cols}};
}

std::string CleaningReport::to_text() const {
  std::ostringstream out;
  out << "rows read: " << rows_read << "\n";
  out << "rows rejected (missing required fields): " << rejected_lines.size() << "\n";
  if (!rejected_lines.empty()) {
    out << "  lines:";
    for (auto l : rejected_lines) out << ' ' << l;
    out << "\n";
  }
  if (row_level_groups) {
    out << "WARNING: no group column; every row is its own group (row_level_unsafe protocol only)\n";
  }
  out << "columns:\n";
  for (const auto& c : columns) {
    out << "  " << c.column << ": " << to_string(c.disposition);
    if (!c.offending_tokens.empty()) {
      out << " [offending tokens:";
      for (const auto& t : c.offending_tokens) out << " '" << t << "'";
      out << "]";
    }
    if (c.disposition == Disposition::one_hot) {
      out << " ->";
      for (const auto& o : c.output_columns) out << ' ' << o;
    }
    out << "\n";
  }
  return out.str();
}

IngestResult ingest_tabular_text(std::string_view text, const SchemaConfig& schema, std::string_view source) {
  const csv::Document doc = csv::parse(text, source);
  const std::string src(source);

  std::vector<std::size_t> col_index;
  for (const auto& rule : schema.columns) {
    const int idx = doc.column(rule.name);
    if (idx < 0) throw DataError(src + ": declared column '" + rule.name + "' not found in header");
    col_index.push_back(static_cast<std::size_t>(idx));
  }

  IngestResult result;
  CleaningReport& report = result.report;
  report.rows_read = doc.rows.size();

  // Pass 1: decide each column's disposition from the full column contents.
  struct Plan {
    Disposition disposition;
    std::vector<std::string> levels;  // categorical
  };
  std::vector<Plan> plans;
  for (std::size_t k = 0; k < schema.columns.size(); ++k) {
    const auto& rule = schema.columns[k];
    const std::size_t c = col_index[k];
    ColumnReport cr;
    cr.column = rule.name;
    Plan plan{Disposition::kept, {}};
    switch (rule.kind) {
      case ColumnKind::numeric:
        cr.output_columns = {rule.name};
        break;
      case ColumnKind::boolean: {
        std::set<std::string> bad;
        for (const auto& row : doc.rows) {
          const std::string v = trim(row[c]);
          if (!v.empty() && !boolean_value(v)) bad.insert(v);
        }
        if (!bad.empty()) {
          plan.disposition = rule.force_keep ? Disposition::kept_corrupted : Disposition::dropped_corrupted;
          cr.offending_tokens.assign(bad.begin(), bad.end());
        }
        if (plan.disposition != Disposition::dropped_corrupted) cr.output_columns = {rule.name};
        break;
      }
      case ColumnKind::categorical: {
        std::set<std::string> levels;
        for (const auto& row : doc.rows) {
          const std::string v = trim(row[c]);
          if (!v.empty()) levels.insert(v);
        }
        plan.disposition = Disposition::one_hot;
        plan.levels.assign(levels.begin(), levels.end());
        if (plan.levels.size() == 2) {
          cr.output_columns = {rule.name + "=" + plan.levels[1]};
        } else {
          for (const auto& l : plan.levels) cr.output_columns.push_back(rule.name + "=" + l);
        }
        break;
      }
      case ColumnKind::label:
        plan.disposition = Disposition::label;
        break;
      case ColumnKind::group:
        plan.disposition = Disposition::group;
        break;
      case ColumnKind::drop:
        plan.disposition = Disposition::dropped_redundant;
        break;
    }
    cr.disposition = plan.disposition;
    report.columns.push_back(std::move(cr));
    plans.push_back(std::move(plan));
  }
  for (const auto& h : doc.header) {
    if (std::none_of(schema.columns.begin(), schema.columns.end(), [&](const auto& r) { return r.name == h; })) {
      report.columns.push_back({h, Disposition::ignored, {}, {}});
    }
  }

  FeatureTable& table = result.table;
  table.level = schema.level;
  for (std::size_t k = 0; k < schema.columns.size(); ++k) {
    for (const auto& o : report.columns[k].output_columns) table.column_names.push_back(o);
  }
  const bool has_group = std::any_of(schema.columns.begin(), schema.columns.end(),
                                     [](const auto& r) { return r.kind == ColumnKind::group; });
  report.row_level_groups = !has_group;

  // Pass 2: convert rows.
  std::vector<std::vector<double>> values;
  std::vector<std::string> raw_labels;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::size_t line = doc.line_numbers[r];
    std::vector<double> out;
    std::string label;
    std::string group = "row_" + std::to_string(line);
    bool missing = false;
    for (std::size_t k = 0; k < schema.columns.size() && !missing; ++k) {
      const auto& rule = schema.columns[k];
      const auto& plan = plans[k];
      const std::string v = trim(row[col_index[k]]);
      const bool required = plan.disposition != Disposition::dropped_corrupted &&
                            plan.disposition != Disposition::dropped_redundant;
      if (required && v.empty()) {
        missing = true;
        break;
      }
      const std::string at = src + ":" + std::to_string(line) + ": column '" + rule.name + "'";
      switch (plan.disposition) {
        case Disposition::kept:
          if (rule.kind == ColumnKind::boolean) {
            out.push_back(*boolean_value(v));
          } else {
            double d = 0.0;
            if (!csv::parse_double(v, d)) throw DataError(at + ": unparseable number '" + v + "'");
            out.push_back(d);
          }
          break;
        case Disposition::kept_corrupted: {
          if (auto b = boolean_value(v)) {
            out.push_back(*b);
          } else {
            double d = 0.0;
            if (!csv::parse_double(v, d)) throw DataError(at + ": forced boolean has non-numeric token '" + v + "'");
            out.push_back(d);
          }
          break;
        }
        case Disposition::one_hot:
          if (plan.levels.size() == 2) {
            out.push_back(v == plan.levels[1] ? 1.0 : 0.0);
          } else {
            for (const auto& l : plan.levels) out.push_back(v == l ? 1.0 : 0.0);
          }
          break;
        case Disposition::label:
          label = v;
          break;
        case Disposition::group:
          group = v;
          break;
        default:
          break;
      }
    }
    if (missing) {
      report.rejected_lines.push_back(line);
      continue;
    }
    values.push_back(std::move(out));
    raw_labels.push_back(std::move(label));
    table.group_ids.push_back(std::move(group));
    table.row_ids.push_back("row_" + std::to_string(line));
  }
  if (values.empty()) throw DataError(src + ": no usable rows after cleaning");

  table.rows.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(table.column_names.size()));
  for (std::size_t r = 0; r < values.size(); ++r) {
    for (std::size_t c = 0; c < values[r].size(); ++c) {
      table.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r][c];
    }
  }
  if (table.level == TableLevel::fragment) table.row_ids = table.group_ids;
  assign_labels(table, raw_labels);
  try {
    table.validate();
  } catch (const ContractViolation& e) {
    throw DataError(src + ": " + e.what());
  }
  return result;
}

IngestResult ingest_tabular_csv(const std::filesystem::path& path, const SchemaConfig& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ingest_tabular_text(buffer.str(), schema, path.string());
}

}  // namespace bonefrag
