#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bonefrag/break_features.hpp"
#include "bonefrag/feature_table.hpp"
#include "bonefrag/mesh_geometry.hpp"
#include "bonefrag/summary_stats.hpp"

namespace bonefrag {

struct FragmentMeta {
  std::string fragment_id;
  std::string label;
  bool trabecula = false;
};

struct MeshFeatures {
  double volume = 0.0;
  double surface_area = 0.0;
  BoxDims bbox;
};

// Mesh-derived fragment quantities; the principal frame is computed once.
MeshFeatures mesh_features(const TriangleMesh& mesh);

struct FragmentRecord {
  std::string fragment_id;
  std::string label;
  int num_breaks = 0;
  int trabecula = 0;
  double volume = 0.0;
  double surface_area = 0.0;
  BoxDims bbox;
  // angle_meta_stats[outer][inner]: outer statistic taken over the breaks'
  // inner angle statistic, both indexed in SummaryStats::kNames order.
  std::array<std::array<double, SummaryStats::kCount>, SummaryStats::kCount> angle_meta_stats{};
  int count_interior_edge_break = 0;
  int count_interior_edge_endosteal = 0;
  int count_interrupted = 0;
  int count_ridge_notch = 0;
  int count_interior_notch = 0;
  SummaryStats chord_stats;
  SummaryStats arclen_stats;
  SummaryStats arcangle_stats;

  static constexpr std::size_t kFeatureCount = 66;
  static const std::vector<std::string>& column_names();
  std::array<double, kFeatureCount> features() const;
};

// Aggregates per-break records into the fragment row. Angle statistics are
// statistics of the per-break statistics, never of pooled raw angles.
FragmentRecord build_fragment_record(const FragmentMeta& meta, const MeshFeatures& mesh_feats,
                                     std::span<const BreakRecord> breaks);

using LevelRecord = std::variant<BreakRecord, FragmentRecord>;

// Break records take their label from `label_of_fragment`; fragment records
// carry their own. Mixed levels or an empty list are contract violations.
FeatureTable assemble_table(std::span<const LevelRecord> records,
                            const std::map<std::string, std::string>& label_of_fragment = {});
FeatureTable assemble_break_table(std::span<const BreakRecord> records,
                                  const std::map<std::string, std::string>& label_of_fragment);
FeatureTable assemble_fragment_table(std::span<const FragmentRecord> records);

}  // namespace bonefrag
