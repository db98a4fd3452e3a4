#include "bonefrag/fragment_features.hpp"

#include <algorithm>

#include "bonefrag/error.hpp"

namespace bonefrag {

MeshFeatures mesh_features(const TriangleMesh& mesh) {
  MeshFeatures f;
  f.volume = enclosed_volume(mesh).volume;
  f.surface_area = surface_area(mesh);
  f.bbox = bounding_box_dims(mesh, principal_frame(mesh));
  return f;
}

FragmentRecord build_fragment_record(const FragmentMeta& meta, const MeshFeatures& mesh_feats,
                                     std::span<const BreakRecord> breaks) {
  if (breaks.empty()) {
    throw ContractViolation("build_fragment_record: fragment '" + meta.fragment_id + "' has no breaks");
  }
  for (const auto& b : breaks) {
    if (b.fragment_id != meta.fragment_id) {
      throw ContractViolation("build_fragment_record: break '" + b.fragment_id + "/" + b.break_id +
                              "' does not belong to fragment '" + meta.fragment_id + "'");
    }
  }
  FragmentRecord r;
  r.fragment_id = meta.fragment_id;
  r.label = meta.label;
  r.num_breaks = static_cast<int>(breaks.size());
  r.trabecula = meta.trabecula ? 1 : 0;
  r.volume = mesh_feats.volume;
  r.surface_area = mesh_feats.surface_area;
  r.bbox = mesh_feats.bbox;

  std::vector<double> column(breaks.size());
  for (std::size_t inner = 0; inner < SummaryStats::kCount; ++inner) {
    for (std::size_t b = 0; b < breaks.size(); ++b) column[b] = breaks[b].angle_stats.get(inner);
    const SummaryStats outer = summary_stats(column);
    for (std::size_t o = 0; o < SummaryStats::kCount; ++o) r.angle_meta_stats[o][inner] = outer.get(o);
  }

  for (const auto& b : breaks) {
    r.count_interior_edge_break += b.interior_edge_is_break;
    r.count_interrupted += b.interrupted;
    r.count_ridge_notch += b.ridge_notch;
    r.count_interior_notch += b.interior_notch;
  }
  r.count_interior_edge_endosteal = r.num_breaks - r.count_interior_edge_break;

  auto stats_of = [&](auto field) {
    for (std::size_t b = 0; b < breaks.size(); ++b) column[b] = breaks[b].*field;
    return summary_stats(column);
  };
  r.chord_stats = stats_of(&BreakRecord::chord_length);
  r.arclen_stats = stats_of(&BreakRecord::arc_length);
  r.arcangle_stats = stats_of(&BreakRecord::arc_angle);
  return r;
}

const std::vector<std::string>& FragmentRecord::column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"num_breaks", "trabecula", "volume", "surface_area",
                               "bbox_length", "bbox_width", "bbox_depth"};
    for (auto outer : SummaryStats::kNames) {
      for (auto inner : SummaryStats::kNames) {
        n.push_back("angle_" + std::string(outer) + "_of_" + std::string(inner));
      }
    }
    n.insert(n.end(), {"count_interior_edge_break", "count_interior_edge_endosteal", "count_interrupted",
                       "count_ridge_notch", "count_interior_notch"});
    for (const char* prefix : {"chord_", "arclen_", "arcangle_"}) {
      for (auto s : SummaryStats::kNames) n.push_back(prefix + std::string(s));
    }
    return n;
  }();
  return names;
}

std::array<double, FragmentRecord::kFeatureCount> FragmentRecord::features() const {
  std::array<double, kFeatureCount> f{};
  std::size_t i = 0;
  f[i++] = num_breaks;
  f[i++] = trabecula;
  f[i++] = volume;
  f[i++] = surface_area;
  f[i++] = bbox.length;
  f[i++] = bbox.width;
  f[i++] = bbox.depth;
  for (const auto& row : angle_meta_stats) {
    for (double v : row) f[i++] = v;
  }
  f[i++] = count_interior_edge_break;
  f[i++] = count_interior_edge_endosteal;
  f[i++] = count_interrupted;
  f[i++] = count_ridge_notch;
  f[i++] = count_interior_notch;
  for (const SummaryStats* s : {&chord_stats, &arclen_stats, &arcangle_stats}) {
    for (double v : s->as_array()) f[i++] = v;
  }
  return f;
}

namespace {

template <std::size_t N>
void put_row(Matrix& m, Eigen::Index r, const std::array<double, N>& values) {
  for (std::size_t c = 0; c < N; ++c) m(r, static_cast<Eigen::Index>(c)) = values[c];
}

}  // namespace

FeatureTable assemble_break_table(std::span<const BreakRecord> records,
                                  const std::map<std::string, std::string>& label_of_fragment) {
  if (records.empty()) throw ContractViolation("assemble_table: no records");
  FeatureTable t;
  t.level = TableLevel::breakage;
  t.column_names = BreakRecord::column_names();
  t.rows.resize(static_cast<Eigen::Index>(records.size()), BreakRecord::kFeatureCount);
  std::vector<std::string> raw;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto it = label_of_fragment.find(rec.fragment_id);
    if (it == label_of_fragment.end()) {
      throw ContractViolation("assemble_table: no label for fragment '" + rec.fragment_id + "'");
    }
    put_row(t.rows, static_cast<Eigen::Index>(i), rec.features());
    raw.push_back(it->second);
    t.group_ids.push_back(rec.fragment_id);
    t.row_ids.push_back(rec.break_id);
  }
  assign_labels(t, raw);
  t.validate();
  return t;
}

FeatureTable assemble_fragment_table(std::span<const FragmentRecord> records) {
  if (records.empty()) throw ContractViolation("assemble_table: no records");
  FeatureTable t;
  t.level = TableLevel::fragment;
  t.column_names = FragmentRecord::column_names();
  t.rows.resize(static_cast<Eigen::Index>(records.size()), FragmentRecord::kFeatureCount);
  std::vector<std::string> raw;
  for (std::size_t i = 0; i < records.size(); ++i) {
    put_row(t.rows, static_cast<Eigen::Index>(i), records[i].features());
    raw.push_back(records[i].label);
    t.group_ids.push_back(records[i].fragment_id);
    t.row_ids.push_back(records[i].fragment_id);
  }
  assign_labels(t, raw);
  t.validate();
  return t;
}

FeatureTable assemble_table(std::span<const LevelRecord> records,
                            const std::map<std::string, std::string>& label_of_fragment) {
  if (records.empty()) throw ContractViolation("assemble_table: no records");
  const bool breaks = std::holds_alternative<BreakRecord>(records.front());
  std::vector<BreakRecord> b;
  std::vector<FragmentRecord> f;
  for (const auto& r : records) {
    if (std::holds_alternative<BreakRecord>(r) != breaks) {
      throw ContractViolation("assemble_table: mixed break-level and fragment-level records");
    }
    if (breaks) {
      b.push_back(std::get<BreakRecord>(r));
    } else {
      f.push_back(std::get<FragmentRecord>(r));
    }
  }
  return breaks ? assemble_break_table(b, label_of_fragment) : assemble_fragment_table(f);
}

}  // namespace bonefrag
