#include "extract.hpp"

#include <map>
#include <set>
#include <sstream>

#include "bonefrag/annotations_io.hpp"
#include "bonefrag/csv.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/fragment_features.hpp"
#include "bonefrag/ply.hpp"

namespace bonefrag::cli {

ExtractResult extract_features(const ExtractInputs& inputs, Diagnostics& diagnostics) {
  std::map<std::string, FragmentMeta> fragments;
  for (auto& m : read_fragment_metadata(inputs.fragment_meta)) {
    const std::string id = m.fragment_id;
    if (!fragments.emplace(id, std::move(m)).second) {
      throw DataError(inputs.fragment_meta.string() + ": duplicate fragment_id '" + id + "'");
    }
  }

  std::map<std::pair<std::string, std::string>, BreakAnnotations> annotations;
  for (auto& a : read_break_metadata(inputs.break_meta)) {
    auto key = std::make_pair(a.fragment_id, a.break_id);
    if (!annotations.emplace(key, std::move(a)).second) {
      throw DataError(inputs.break_meta.string() + ": duplicate break '" + key.first + "/" + key.second + "'");
    }
  }

  const std::vector<BreakCurve> curves = read_break_curves(inputs.annotations);
  std::map<std::string, std::vector<const BreakCurve*>> curves_of;
  for (const auto& c : curves) {
    if (!fragments.count(c.fragment_id())) {
      throw DataError(inputs.annotations.string() + ": annotation references unknown fragment_id '" +
                      c.fragment_id() + "'");
    }
    if (!annotations.count({c.fragment_id(), c.break_id()})) {
      throw DataError(inputs.break_meta.string() + ": no metadata row for break '" + c.fragment_id() + "/" +
                      c.break_id() + "'");
    }
    curves_of[c.fragment_id()].push_back(&c);
  }
  for (const auto& [key, a] : annotations) {
    if (!curves_of.count(key.first) ||
        std::none_of(curves_of[key.first].begin(), curves_of[key.first].end(),
                     [&](const BreakCurve* c) { return c->break_id() == key.second; })) {
      throw DataError(inputs.annotations.string() + ": break '" + key.first + "/" + key.second +
                      "' has metadata but no curve points");
    }
  }

  std::ostringstream manifest;
  manifest << "# extraction manifest\n";
  csv::write_row(manifest, {"fragment_id", "vertices", "faces", "watertight", "volume", "surface_area", "breaks"});

  std::vector<BreakRecord> break_records;
  std::vector<FragmentRecord> fragment_records;
  std::map<std::string, std::string> label_of;
  for (const auto& [id, meta] : fragments) {
    const auto it = curves_of.find(id);
    if (it == curves_of.end()) {
      diagnostics.warn("fragment '" + id + "' has no annotated breaks; skipped");
      continue;
    }
    const std::filesystem::path mesh_path = inputs.mesh_dir / (id + ".ply");
    if (!std::filesystem::exists(mesh_path)) {
      throw DataError("no mesh for annotated fragment '" + id + "' (expected " + mesh_path.string() + ")");
    }
    const TriangleMesh mesh = load_mesh(mesh_path, id);
    const PrincipalFrame frame = principal_frame(mesh);
    const VolumeResult vol = enclosed_volume(mesh);
    if (!vol.watertight) diagnostics.warn("mesh for fragment '" + id + "' is not watertight; volume may be unreliable");
    const MeshFeatures mf{vol.volume, surface_area(mesh), bounding_box_dims(mesh, frame)};

    std::vector<BreakRecord> own;
    for (const BreakCurve* c : it->second) {
      own.push_back(build_break_record(*c, annotations.at({id, c->break_id()}), frame.axes[0]));
    }
    fragment_records.push_back(build_fragment_record(meta, mf, own));
    break_records.insert(break_records.end(), own.begin(), own.end());
    label_of[id] = meta.label;
    csv::write_row(manifest, {id, std::to_string(mesh.vertices().size()), std::to_string(mesh.faces().size()),
                              vol.watertight ? "true" : "false", csv::format_double(vol.volume),
                              csv::format_double(mf.surface_area), std::to_string(own.size())});
  }
  if (fragment_records.empty()) throw DataError("no annotated fragments to extract");

  ExtractResult out;
  out.breaks = assemble_break_table(break_records, label_of);
  out.fragments = assemble_fragment_table(fragment_records);
  manifest << "# warnings\n";
  for (const auto& w : diagnostics.messages()) manifest << "warning: " << w << '\n';
  out.manifest = manifest.str();
  return out;
}

}  // namespace bonefrag::cli
