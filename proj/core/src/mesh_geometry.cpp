#include "bonefrag/mesh_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <Eigen/Eigenvalues>

#include "bonefrag/error.hpp"

namespace bonefrag {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces, std::string fragment_id)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), fragment_id_(std::move(fragment_id)) {
  if (vertices_.size() < 3) {
    throw ContractViolation("mesh '" + fragment_id_ + "': needs at least 3 vertices, got " +
                            std::to_string(vertices_.size()));
  }
  if (faces_.empty()) throw ContractViolation("mesh '" + fragment_id_ + "': needs at least 1 face");
  const auto n = vertices_.size();
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const auto& face = faces_[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw ContractViolation("mesh '" + fragment_id_ + "': face " + std::to_string(f) +
                                " index " + std::to_string(idx) + " out of range (vertex count " +
                                std::to_string(n) + ")");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw ContractViolation("mesh '" + fragment_id_ + "': face " + std::to_string(f) +
                              " repeats a vertex index");
    }
  }
  for (const auto& v : vertices_) {
    if (!v.allFinite()) throw ContractViolation("mesh '" + fragment_id_ + "': non-finite vertex");
  }
}

double surface_area(const TriangleMesh& mesh) {
  const auto& v = mesh.vertices();
  double area = 0.0;
  for (const auto& f : mesh.faces()) {
    area += 0.5 * (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm();
  }
  return area;
}

VolumeResult enclosed_volume(const TriangleMesh& mesh) {
  const auto& v = mesh.vertices();
  double six_volume = 0.0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use;
  for (const auto& f : mesh.faces()) {
    six_volume += v[f[0]].dot(v[f[1]].cross(v[f[2]]));
    for (int e = 0; e < 3; ++e) {
      auto a = f[e];
      auto b = f[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_use[{a, b}];
    }
  }
  const bool watertight =
      std::all_of(edge_use.begin(), edge_use.end(), [](const auto& kv) { return kv.second == 2; });
  return {std::abs(six_volume) / 6.0, watertight};
}

Vec3 sign_normalized(const Vec3& v) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return v[best] < 0.0 ? Vec3(-v) : v;
}

namespace {

bool lexicographically_greater(const Vec3& a, const Vec3& b) {
  for (int i = 0; i < 3; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

}  // namespace

PrincipalFrame principal_frame(const std::vector<Vec3>& points) {
  if (points.size() < 3) throw DegenerateGeometry("principal_frame: need at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) throw DegenerateGeometry("principal_frame: eigen solver failed");

  const double largest = solver.eigenvalues()(2);
  const double scale = std::max(1.0, centroid.squaredNorm());
  if (largest <= 1e-24 * scale) throw DegenerateGeometry("principal_frame: vertices are coincident");
  if (solver.eigenvalues()(1) <= 1e-12 * largest) {
    throw DegenerateGeometry("principal_frame: vertices are collinear");
  }

  std::array<int, 3> order{2, 1, 0};
  std::array<Vec3, 3> axes;
  for (int i = 0; i < 3; ++i) axes[i] = sign_normalized(solver.eigenvectors().col(i));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = solver.eigenvalues()(a);
    const double vb = solver.eigenvalues()(b);
    if (va != vb) return va > vb;
    return lexicographically_greater(axes[a], axes[b]);
  });

  PrincipalFrame frame;
  frame.centroid = centroid;
  for (int i = 0; i < 3; ++i) {
    frame.axes[i] = axes[order[i]];
    frame.variances[i] = std::max(0.0, solver.eigenvalues()(order[i]));
  }
  return frame;
}

PrincipalFrame principal_frame(const TriangleMesh& mesh) { return principal_frame(mesh.vertices()); }

BoxDims bounding_box_dims(const TriangleMesh& mesh, const PrincipalFrame& frame) {
  std::array<double, 3> lo;
  std::array<double, 3> hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& p : mesh.vertices()) {
    const Vec3 d = p - frame.centroid;
    for (int i = 0; i < 3; ++i) {
      const double t = d.dot(frame.axes[i]);
      lo[i] = std::min(lo[i], t);
      hi[i] = std::max(hi[i], t);
    }
  }
  std::array<double, 3> ext{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
  std::sort(ext.begin(), ext.end(), std::greater<>());
  return {ext[0], ext[1], ext[2]};
}

}  // namespace bonefrag
