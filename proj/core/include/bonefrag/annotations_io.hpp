#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "bonefrag/break_features.hpp"
#include "bonefrag/fragment_features.hpp"

namespace bonefrag {

// Break-annotation CSV, one row per point:
//   fragment_id,break_id,point_index,x,y,z,angle_deg,is_endpoint
// Points are ordered by point_index; the first and last must be endpoints
// (empty angle_deg), every interior point carries an angle. Curves whose
// points are not in along-curve order are rejected. Output is sorted by
// (fragment_id, break_id).
std::vector<BreakCurve> read_break_curves(const std::filesystem::path& path);
std::vector<BreakCurve> parse_break_curves(std::string_view text, std::string_view source_name = "<memory>");

// fragment_id,break_id,interior_edge{break|endosteal},interrupted,ridge_notch,interior_notch
std::vector<BreakAnnotations> read_break_metadata(const std::filesystem::path& path);
std::vector<BreakAnnotations> parse_break_metadata(std::string_view text, std::string_view source_name = "<memory>");

// fragment_id,label,trabecula{true|false}
std::vector<FragmentMeta> read_fragment_metadata(const std::filesystem::path& path);
std::vector<FragmentMeta> parse_fragment_metadata(std::string_view text, std::string_view source_name = "<memory>");

bool parse_bool_token(std::string_view token, bool& out);

}  // namespace bonefrag
