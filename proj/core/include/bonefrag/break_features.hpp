#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bonefrag/mesh_geometry.hpp"
#include "bonefrag/summary_stats.hpp"

namespace bonefrag {

// One annotated break ridge: endpoints first and last, goniometer
// measurement locations in between, in along-curve order.
class BreakCurve {
 public:
  // Requires >= 2 points, >= 1 angle, every angle in (0, 360) degrees.
  BreakCurve(std::string fragment_id, std::string break_id, std::vector<Vec3> points,
             std::vector<double> angles_deg);

  const std::string& fragment_id() const { return fragment_id_; }
  const std::string& break_id() const { return break_id_; }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<double>& angles_deg() const { return angles_deg_; }

 private:
  std::string fragment_id_;
  std::string break_id_;
  std::vector<Vec3> points_;
  std::vector<double> angles_deg_;
};

enum class InteriorEdge { endosteal = 0, breakage = 1 };

struct BreakAnnotations {
  std::string fragment_id;
  std::string break_id;
  InteriorEdge interior_edge = InteriorEdge::endosteal;
  bool interrupted = false;
  bool ridge_notch = false;
  bool interior_notch = false;
};

struct BreakRecord {
  std::string fragment_id;
  std::string break_id;
  int num_angles = 0;
  SummaryStats angle_stats;
  int interior_edge_is_break = 0;
  int interrupted = 0;
  int ridge_notch = 0;
  int interior_notch = 0;
  double chord_length = 0.0;
  double arc_length = 0.0;
  double arc_angle = 0.0;  // degrees, [0, 90]

  static constexpr std::size_t kFeatureCount = 14;
  static const std::vector<std::string>& column_names();
  std::array<double, kFeatureCount> features() const;
};

double chord_length(const BreakCurve& curve);
double arc_length(const BreakCurve& curve);

// First principal component of the centred points, sign-normalised.
// Throws DegenerateGeometry when all points coincide.
Vec3 best_fit_direction(std::span<const Vec3> points);

// Angle in degrees between the curve's best-fit line and `principal_axis`,
// using |d . a| so the result lies in [0, 90].
double arc_angle(const BreakCurve& curve, const Vec3& principal_axis);

BreakRecord build_break_record(const BreakCurve& curve, const BreakAnnotations& annotations,
                               const Vec3& principal_axis);

// True when every interior point is no farther from its list neighbours than
// from the farther endpoint; a cheap guard against shuffled annotations.
bool points_in_curve_order(std::span<const Vec3> points);

int encode(InteriorEdge edge);
InteriorEdge parse_interior_edge(std::string_view token);

}  // namespace bonefrag
