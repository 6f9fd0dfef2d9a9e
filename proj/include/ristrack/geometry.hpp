#pragma once

#include <vector>

#include "ristrack/types.hpp"

namespace ristrack {

enum class ArrayKind { kUla, kUra };

// Planar array description. Element (row, col) sits at
//   reference_position + (row - (n_rows-1)/2) * spacing * row_axis
//                      + (col - (n_cols-1)/2) * spacing * col_axis
// so the array is centred on reference_position. The broadside normal is
// row_axis x col_axis.
struct ArraySpec {
  ArrayKind kind = ArrayKind::kUra;
  int n_rows = 1;
  int n_cols = 1;
  double element_spacing = 0.0;  // meters
  Vec3 reference_position = Vec3::Zero();
  Vec3 row_axis = Vec3::UnitY();
  Vec3 col_axis = Vec3::UnitZ();
  double orientation_error_std_deg = 0.0;

  int size() const { return n_rows * n_cols; }
  Vec3 normal() const { return row_axis.cross(col_axis); }
};

// Throws kInvalidConfig when counts, spacing or axes are not admissible.
void validate(const ArraySpec& spec);

struct Spherical {
  double distance = 0.0;   // >= 0
  double elevation = 0.0;  // [0, pi], measured from +z
  double azimuth = 0.0;    // (-pi, pi], measured from +x
};

struct RadiationPattern {
  double exponent = 1.0;  // q
  double cell_gain = 1.0;  // G_c
  double tx_gain = 1.0;    // G_i
  double rx_gain = 1.0;    // G_r
};

// Unit direction for the given elevation/azimuth.
Vec3 direction(double elevation, double azimuth);

Spherical spherical_from_cartesian(const Vec3& p, const Vec3& origin);

Vec3 cartesian_from_spherical(const Spherical& s, const Vec3& origin);

std::vector<Vec3> element_positions(const ArraySpec& spec);

double pairwise_distance(const Vec3& a, const Vec3& b);

// Distance between two points given by spherical coordinates about a common
// origin, via the spherical law of cosines.
double distance_from_spherical(const Spherical& a, const Spherical& b);

// Normalised power pattern: cos^q(theta) on [0, pi/2], zero behind the array.
double radiation_pattern(double theta, const RadiationPattern& pattern);

// Off-broadside angle of `target` seen from an element at `element` on an
// array whose broadside normal is `normal` (unit).
double off_broadside_angle(const Vec3& element, const Vec3& normal, const Vec3& target);

// Rotation of `spec` about the z axis through its reference position.
ArraySpec rotated_about_z(const ArraySpec& spec, double angle_rad);

}  // namespace ristrack
