#include "ristrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ristrack {

void validate(const ArraySpec& spec) {
  if (spec.n_rows < 1 || spec.n_cols < 1) {
    throw Error(ErrorKind::kInvalidConfig, "array counts must be positive");
  }
  if (!(spec.element_spacing > 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "array element spacing must be > 0");
  }
  if (spec.kind == ArrayKind::kUla && spec.n_rows != 1 && spec.n_cols != 1) {
    throw Error(ErrorKind::kInvalidConfig, "ULA must have a single row or column");
  }
  constexpr double tol = 1e-9;
  if (std::abs(spec.row_axis.norm() - 1.0) > tol || std::abs(spec.col_axis.norm() - 1.0) > tol ||
      std::abs(spec.row_axis.dot(spec.col_axis)) > tol) {
    throw Error(ErrorKind::kInvalidConfig, "array axes must be orthonormal");
  }
  if (spec.orientation_error_std_deg < 0.0) {
    throw Error(ErrorKind::kInvalidConfig, "orientation error std must be >= 0");
  }
}

Vec3 direction(double elevation, double azimuth) {
  return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth),
          std::cos(elevation)};
}

Spherical spherical_from_cartesian(const Vec3& p, const Vec3& origin) {
  const Vec3 d = p - origin;
  const double r = d.norm();
  if (r == 0.0) {
    throw Error(ErrorKind::kDegenerateGeometry, "coincident points have no direction");
  }
  Spherical s;
  s.distance = r;
  s.elevation = std::acos(std::clamp(d.z() / r, -1.0, 1.0));
  // Pole convention: azimuth is 0 when the point lies on the z axis.
  s.azimuth = (d.x() == 0.0 && d.y() == 0.0) ? 0.0 : std::atan2(d.y(), d.x());
  if (s.azimuth == -kPi) s.azimuth = kPi;
  return s;
}

Vec3 cartesian_from_spherical(const Spherical& s, const Vec3& origin) {
  return origin + s.distance * direction(s.elevation, s.azimuth);
}

std::vector<Vec3> element_positions(const ArraySpec& spec) {
  validate(spec);
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(spec.size()));
  const double row_mid = 0.5 * (spec.n_rows - 1);
  const double col_mid = 0.5 * (spec.n_cols - 1);
  for (int r = 0; r < spec.n_rows; ++r) {
    for (int c = 0; c < spec.n_cols; ++c) {
      out.push_back(spec.reference_position +
                    (r - row_mid) * spec.element_spacing * spec.row_axis +
                    (c - col_mid) * spec.element_spacing * spec.col_axis);
    }
  }
  return out;
}

double pairwise_distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

double distance_from_spherical(const Spherical& a, const Spherical& b) {
  const double cos_angle =
      std::sin(a.elevation) * std::sin(b.elevation) * std::cos(a.azimuth - b.azimuth) +
      std::cos(a.elevation) * std::cos(b.elevation);
  const double sq = a.distance * a.distance + b.distance * b.distance -
                    2.0 * a.distance * b.distance * cos_angle;
  return std::sqrt(std::max(sq, 0.0));
}

double radiation_pattern(double theta, const RadiationPattern& pattern) {
  if (theta < 0.0 || theta > 0.5 * kPi) return 0.0;
  const double c = std::max(std::cos(theta), 0.0);
  return std::pow(c, pattern.exponent);
}

double off_broadside_angle(const Vec3& element, const Vec3& normal, const Vec3& target) {
  const Vec3 d = target - element;
  const double r = d.norm();
  if (r == 0.0) {
    throw Error(ErrorKind::kDegenerateGeometry, "target coincides with array element");
  }
  return std::acos(std::clamp(normal.dot(d) / r, -1.0, 1.0));
}

ArraySpec rotated_about_z(const ArraySpec& spec, double angle_rad) {
  const Eigen::AngleAxisd rot(angle_rad, Vec3::UnitZ());
  ArraySpec out = spec;
  out.row_axis = rot * spec.row_axis;
  out.col_axis = rot * spec.col_axis;
  return out;
}

}  // namespace ristrack
