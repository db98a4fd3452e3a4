#pragma once

#include <filesystem>
#include <string>

#include "bonefrag/mesh_geometry.hpp"

namespace bonefrag {

enum class PlyFormat { ascii, binary_little_endian };

// Reads an ASCII 1.0 or binary_little_endian 1.0 PLY file. The `vertex`
// element must carry x/y/z; the `face` element a list property named
// vertex_indices (or vertex_index). Polygons with more than three corners
// are fan-triangulated; other elements and properties are skipped.
// Errors are DataError with the element/byte offset, or ContractViolation
// from TriangleMesh validation (e.g. index out of range).
TriangleMesh load_mesh(const std::filesystem::path& path, std::string fragment_id = {});
TriangleMesh parse_ply(const std::string& bytes, std::string fragment_id = {},
                       const std::string& source_name = "<memory>");

void write_ply(const TriangleMesh& mesh, const std::filesystem::path& path,
               PlyFormat format = PlyFormat::ascii);
std::string to_ply(const TriangleMesh& mesh, PlyFormat format = PlyFormat::ascii);

}  // namespace bonefrag
