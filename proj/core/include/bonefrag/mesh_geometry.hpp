#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bonefrag {

using Vec3 = Eigen::Vector3d;
using Face = std::array<std::uint32_t, 3>;

// Triangle mesh of one scanned fragment, in millimetres.
//
// Construction validates: >= 3 vertices, >= 1 face, every index in range and
// no face repeating a vertex. Instances are immutable afterwards.
class TriangleMesh {
 public:
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::string fragment_id = {});

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::string& fragment_id() const { return fragment_id_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::string fragment_id_;
};

// Centroid plus orthonormal axes ordered by descending variance.
struct PrincipalFrame {
  Vec3 centroid = Vec3::Zero();
  std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  std::array<double, 3> variances{0.0, 0.0, 0.0};
};

struct VolumeResult {
  double volume = 0.0;
  bool watertight = false;
};

struct BoxDims {
  double length = 0.0;
  double width = 0.0;
  double depth = 0.0;
};

double surface_area(const TriangleMesh& mesh);

// |sum det(v0, v1, v2)| / 6 over faces. `watertight` is true iff every
// undirected edge is used by exactly two faces; otherwise the value is still
// reported and the caller decides whether to trust it.
VolumeResult enclosed_volume(const TriangleMesh& mesh);

// Vertex-mean PCA. Axes are sign-normalised so that the component of largest
// magnitude is positive; exactly tied variances are ordered by descending
// lexicographic comparison of the axes. Throws DegenerateGeometry when the
// vertices are coincident or collinear.
PrincipalFrame principal_frame(const TriangleMesh& mesh);
PrincipalFrame principal_frame(const std::vector<Vec3>& points);

// Extents of the vertices projected on the frame axes, sorted descending.
BoxDims bounding_box_dims(const TriangleMesh& mesh, const PrincipalFrame& frame);

// Flips `v` so that its largest-magnitude component (first on ties) is positive.
Vec3 sign_normalized(const Vec3& v);

}  // namespace bonefrag
