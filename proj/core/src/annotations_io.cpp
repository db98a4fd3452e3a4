#include "bonefrag/annotations_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"

namespace bonefrag {
namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

double number(std::string_view field, std::string_view source, std::size_t line, std::string_view column) {
  double v = 0.0;
  if (!csv::parse_double(field, v)) {
    throw DataError(where(source, line) + ": column '" + std::string(column) + "': unparseable number '" +
                    std::string(field) + "'");
  }
  return v;
}

bool flag(std::string_view field, std::string_view source, std::size_t line, std::string_view column) {
  bool v = false;
  if (!parse_bool_token(field, v)) {
    throw DataError(where(source, line) + ": column '" + std::string(column) + "': expected true/false, got '" +
                    std::string(field) + "'");
  }
  return v;
}

}  // namespace

bool parse_bool_token(std::string_view token, bool& out) {
  const std::string t = lower(token);
  if (t == "true") {
    out = true;
    return true;
  }
  if (t == "false") {
    out = false;
    return true;
  }
  return false;
}

std::vector<BreakCurve> parse_break_curves(std::string_view text, std::string_view source) {
  const auto doc = csv::parse(text, source);
  const std::string ctx(source);
  const auto c_frag = doc.require_column("fragment_id", ctx);
  const auto c_break = doc.require_column("break_id", ctx);
  const auto c_idx = doc.require_column("point_index", ctx);
  const auto c_x = doc.require_column("x", ctx);
  const auto c_y = doc.require_column("y", ctx);
  const auto c_z = doc.require_column("z", ctx);
  const auto c_angle = doc.require_column("angle_deg", ctx);
  const auto c_end = doc.require_column("is_endpoint", ctx);

  struct PointRow {
    long long index;
    Vec3 point;
    bool endpoint;
    std::string angle;
    std::size_t line;
  };
  std::map<std::pair<std::string, std::string>, std::vector<PointRow>> grouped;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::size_t line = doc.line_numbers[r];
    const double idx = number(row[c_idx], source, line, "point_index");
    if (idx != static_cast<double>(static_cast<long long>(idx))) {
      throw DataError(where(source, line) + ": point_index must be an integer");
    }
    PointRow p{static_cast<long long>(idx),
               Vec3(number(row[c_x], source, line, "x"), number(row[c_y], source, line, "y"),
                    number(row[c_z], source, line, "z")),
               flag(row[c_end], source, line, "is_endpoint"), row[c_angle], line};
    if (row[c_frag].empty() || row[c_break].empty()) {
      throw DataError(where(source, line) + ": empty fragment_id or break_id");
    }
    grouped[{row[c_frag], row[c_break]}].push_back(std::move(p));
  }

  std::vector<BreakCurve> curves;
  for (auto& [key, pts] : grouped) {
    const std::string who = ctx + ": break '" + key.first + "/" + key.second + "'";
    std::sort(pts.begin(), pts.end(), [](const PointRow& a, const PointRow& b) { return a.index < b.index; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].index == pts[i - 1].index) {
        throw DataError(who + ": duplicate point_index " + std::to_string(pts[i].index));
      }
    }
    if (pts.size() < 2) throw DataError(who + ": needs both endpoints");
    std::vector<Vec3> points;
    std::vector<double> angles;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const bool should_be_endpoint = i == 0 || i + 1 == pts.size();
      if (pts[i].endpoint != should_be_endpoint) {
        throw DataError(where(source, pts[i].line) + ": point " + std::to_string(pts[i].index) + " of " +
                        key.first + "/" + key.second +
                        (should_be_endpoint ? " must be flagged as an endpoint" : " is flagged as an endpoint but is interior"));
      }
      if (pts[i].endpoint) {
        if (!pts[i].angle.empty()) {
          throw DataError(where(source, pts[i].line) + ": endpoint rows must leave angle_deg empty");
        }
      } else {
        angles.push_back(number(pts[i].angle, source, pts[i].line, "angle_deg"));
      }
      points.push_back(pts[i].point);
    }
    if (!points_in_curve_order(points)) throw DataError(who + ": points are not in along-curve order");
    try {
      curves.emplace_back(key.first, key.second, std::move(points), std::move(angles));
    } catch (const ContractViolation& e) {
      throw DataError(ctx + ": " + e.what());
    }
  }
  return curves;
}

std::vector<BreakCurve> read_break_curves(const std::filesystem::path& path) {
  return parse_break_curves(slurp(path), path.string());
}

std::vector<BreakAnnotations> parse_break_metadata(std::string_view text, std::string_view source) {
  const auto doc = csv::parse(text, source);
  const std::string ctx(source);
  const auto c_frag = doc.require_column("fragment_id", ctx);
  const auto c_break = doc.require_column("break_id", ctx);
  const auto c_edge = doc.require_column("interior_edge", ctx);
  const auto c_int = doc.require_column("interrupted", ctx);
  const auto c_ridge = doc.require_column("ridge_notch", ctx);
  const auto c_inotch = doc.require_column("interior_notch", ctx);
  std::vector<BreakAnnotations> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::size_t line = doc.line_numbers[r];
    BreakAnnotations a;
    a.fragment_id = row[c_frag];
    a.break_id = row[c_break];
    if (!seen.insert({a.fragment_id, a.break_id}).second) {
      throw DataError(where(source, line) + ": duplicate metadata for break '" + a.fragment_id + "/" + a.break_id + "'");
    }
    try {
      a.interior_edge = parse_interior_edge(row[c_edge]);
    } catch (const DataError& e) {
      throw DataError(where(source, line) + ": " + e.what());
    }
    a.interrupted = flag(row[c_int], source, line, "interrupted");
    a.ridge_notch = flag(row[c_ridge], source, line, "ridge_notch");
    a.interior_notch = flag(row[c_inotch], source, line, "interior_notch");
    out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.fragment_id, a.break_id) < std::tie(b.fragment_id, b.break_id);
  });
  return out;
}

std::vector<BreakAnnotations> read_break_metadata(const std::filesystem::path& path) {
  return parse_break_metadata(slurp(path), path.string());
}

std::vector<FragmentMeta> parse_fragment_metadata(std::string_view text, std::string_view source) {
  const auto doc = csv::parse(text, source);
  const std::string ctx(source);
  const auto c_frag = doc.require_column("fragment_id", ctx);
  const auto c_label = doc.require_column("label", ctx);
  const auto c_trab = doc.require_column("trabecula", ctx);
  std::vector<FragmentMeta> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::size_t line = doc.line_numbers[r];
    FragmentMeta m{row[c_frag], row[c_label], flag(row[c_trab], source, line, "trabecula")};
    if (m.fragment_id.empty() || m.label.empty()) {
      throw DataError(where(source, line) + ": empty fragment_id or label");
    }
    if (!seen.insert(m.fragment_id).second) {
      throw DataError(where(source, line) + ": duplicate fragment '" + m.fragment_id + "'");
    }
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.fragment_id < b.fragment_id; });
  return out;
}

std::vector<FragmentMeta> read_fragment_metadata(const std::filesystem::path& path) {
  return parse_fragment_metadata(slurp(path), path.string());
}

}  // namespace bonefrag
