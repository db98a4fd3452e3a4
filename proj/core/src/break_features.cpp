#include "bonefrag/break_features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "bonefrag/error.hpp"

namespace bonefrag {

BreakCurve::BreakCurve(std::string fragment_id, std::string break_id, std::vector<Vec3> points,
                       std::vector<double> angles_deg)
    : fragment_id_(std::move(fragment_id)),
      break_id_(std::move(break_id)),
      points_(std::move(points)),
      angles_deg_(std::move(angles_deg)) {
  const std::string who = "break '" + fragment_id_ + "/" + break_id_ + "'";
  if (points_.size() < 2) throw ContractViolation(who + ": needs at least 2 points (the endpoints)");
  if (angles_deg_.empty()) throw ContractViolation(who + ": needs at least 1 angle measurement");
  for (double a : angles_deg_) {
    if (!(a > 0.0 && a < 360.0)) {
      throw ContractViolation(who + ": angle " + std::to_string(a) + " outside (0, 360)");
    }
  }
  for (const auto& p : points_) {
    if (!p.allFinite()) throw ContractViolation(who + ": non-finite point");
  }
}

double chord_length(const BreakCurve& curve) {
  return (curve.points().back() - curve.points().front()).norm();
}

double arc_length(const BreakCurve& curve) {
  const auto& pts = curve.points();
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  return total;
}

Vec3 best_fit_direction(std::span<const Vec3> points) {
  if (points.size() < 2) throw DegenerateGeometry("best_fit_direction: need at least 2 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double spread = 0.0;
  for (const auto& p : points) {
    const Vec3 d = p - centroid;
    cov.noalias() += d * d.transpose();
    spread = std::max(spread, d.norm());
  }
  if (spread <= 1e-12 * std::max(1.0, centroid.norm())) {
    throw DegenerateGeometry("best_fit_direction: all points coincide");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  return sign_normalized(solver.eigenvectors().col(2).normalized());
}

double arc_angle(const BreakCurve& curve, const Vec3& principal_axis) {
  const double norm = principal_axis.norm();
  if (std::abs(norm - 1.0) > 1e-6) throw ContractViolation("arc_angle: principal axis must be a unit vector");
  const Vec3 d = best_fit_direction(curve.points());
  const double c = std::clamp(std::abs(d.dot(principal_axis / norm)), 0.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

int encode(InteriorEdge edge) { return edge == InteriorEdge::breakage ? 1 : 0; }

InteriorEdge parse_interior_edge(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "break") return InteriorEdge::breakage;
  if (lower == "endosteal") return InteriorEdge::endosteal;
  throw DataError("interior_edge must be 'break' or 'endosteal', got '" + std::string(token) + "'");
}

BreakRecord build_break_record(const BreakCurve& curve, const BreakAnnotations& annotations,
                               const Vec3& principal_axis) {
  if (curve.fragment_id() != annotations.fragment_id || curve.break_id() != annotations.break_id) {
    throw ContractViolation("build_break_record: curve '" + curve.fragment_id() + "/" + curve.break_id() +
                            "' does not match annotations '" + annotations.fragment_id + "/" +
                            annotations.break_id + "'");
  }
  BreakRecord r;
  r.fragment_id = curve.fragment_id();
  r.break_id = curve.break_id();
  r.num_angles = static_cast<int>(curve.angles_deg().size());
  r.angle_stats = summary_stats(curve.angles_deg());
  r.interior_edge_is_break = encode(annotations.interior_edge);
  r.interrupted = annotations.interrupted ? 1 : 0;
  r.ridge_notch = annotations.ridge_notch ? 1 : 0;
  r.interior_notch = annotations.interior_notch ? 1 : 0;
  r.chord_length = chord_length(curve);
  r.arc_length = arc_length(curve);
  r.arc_angle = arc_angle(curve, principal_axis);
  return r;
}

const std::vector<std::string>& BreakRecord::column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"num_angles"};
    for (auto s : SummaryStats::kNames) n.push_back("angle_" + std::string(s));
    n.insert(n.end(), {"interior_edge_is_break", "interrupted", "ridge_notch", "interior_notch",
                       "chord_length", "arc_length", "arc_angle"});
    return n;
  }();
  return names;
}

std::array<double, BreakRecord::kFeatureCount> BreakRecord::features() const {
  return {static_cast<double>(num_angles),
          angle_stats.min,
          angle_stats.max,
          angle_stats.mean,
          angle_stats.median,
          angle_stats.std,
          angle_stats.range,
          static_cast<double>(interior_edge_is_break),
          static_cast<double>(interrupted),
          static_cast<double>(ridge_notch),
          static_cast<double>(interior_notch),
          chord_length,
          arc_length,
          arc_angle};
}

bool points_in_curve_order(std::span<const Vec3> points) {
  if (points.size() < 3) return true;
  const Vec3& first = points.front();
  const Vec3& last = points.back();
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const Vec3& p = points[i];
    const double far = std::max((p - first).norm(), (p - last).norm());
    const double slack = 1e-9 * std::max(1.0, far);
    if ((p - points[i - 1]).norm() > far + slack || (p - points[i + 1]).norm() > far + slack) return false;
  }
  return true;
}

}  // namespace bonefrag
