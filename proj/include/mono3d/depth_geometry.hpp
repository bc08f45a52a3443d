#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace mono3d::depth_geometry {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity();
  static Mat3 rotation_x(double angle);
  static Mat3 rotation_y(double angle);
  Mat3 transpose() const;
  Mat3 operator*(const Mat3& rhs) const;
  Vec3 operator*(const Vec3& v) const;
  bool is_orthonormal(double tol = 1e-9) const;
};

/// Pinhole camera: intrinsics (f, cu, cv), extrinsics (R, T), mounting
/// height H above the ground plane y = H (+y points toward the
/// ground), optional pitch delta.
struct CameraModel {
  double f = 707.0;
  double cu = 600.0;
  double cv = 180.0;
  Mat3 rotation = Mat3::identity();
  Vec3 translation{};
  double height = 1.65;
  double pitch = 0.0;
  double image_h = 375.0;

  void validate() const;  // throws std::invalid_argument
  /// A = R^-1 K^-1.
  Mat3 a_matrix() const;
  /// B = -R^-1 T.
  Vec3 b_vector() const;
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double z = 0.0;
};

/// Exact pinhole projection with depth. Throws std::domain_error when
/// the point lands behind the camera (z <= 0 after extrinsics).
Projection project(const CameraModel& cam, const Vec3& point);

/// Closed-form ground-plane depth of a pixel, pitched form
///   z = (H - b2 cos d - b3 sin d) / ((a21 u + a22 v + a23) cos d +
///       (a31 u + a32 v + a33) sin d)
/// with ReLU applied to the numerator. Returns nullopt at or above the
/// horizon (denominator <= 0).
std::optional<double> ground_depth(const CameraModel& cam, double u, double v);

/// Ray through pixel (u, v) intersected with the plane y = H; test
/// oracle for ground_depth (no ReLU, no pitch).
std::optional<double> ray_plane_depth_oracle(const CameraModel& cam, double u, double v);

struct DetectionGeom {
  double uc = 0.0;     // projected 3D center
  double vc = 0.0;
  double uc2d = 0.0;   // 2D box center
  double vc2d = 0.0;
  double h2d = 0.0;    // 2D box height, > 0
  double alpha = 0.0;  // shift coefficient
  double z_reg = 0.0;  // regressed depth estimate
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

/// Projected bottom 3D center:
///   u_b = u_c; v_b = v_c + h2d/2 + alpha (v_c - v_c2d).
Pixel bottom_center(const DetectionGeom& det);

/// Arithmetic mean of the two estimates; an invalid ground depth falls
/// back to the regressed one.
double merge_depth(double z_reg, std::optional<double> z_ground);

enum class TrendKind { ground, regressed };

struct TrendQuery {
  double dh = 0.0;    // camera height change (m)
  double vb = 0.0;    // bottom-center row (ground kind)
  double beta = 0.0;  // regression slope parameter (regressed kind), > 0
  double z = 0.0;     // object depth (regressed kind), > 0
};

/// First-order mean depth error under a height change:
///   ground:    ReLU(1 / (v_b - cv)) * f * dH
///   regressed: -(beta / z) * f * dH
double predicted_trend(TrendKind kind, const CameraModel& cam, const TrendQuery& query);

/// Linear depth-regression slope (z_max - z_min)/(image_h - cv).
double default_beta(const CameraModel& cam, double z_max = 60.0, double z_min = 0.0);

struct TrendSimConfig {
  std::vector<double> height_deltas;
  std::vector<double> object_depths;  // defaults to 24 depths in [10, 30]
  double beta = 0.0;                  // <= 0 means default_beta(cam)
  double noise_sigma = 0.5;
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
};

struct TrendRow {
  double dh = 0.0;
  double mean_err_ground = 0.0;
  double mean_err_regressed = 0.0;
  double mean_err_merged = 0.0;
  double se_ground = 0.0;
  double se_regressed = 0.0;
  double se_merged = 0.0;
};

/// Monte-Carlo check of the trend theorems: objects live on the ground
/// plane, a height change shifts their pixels by f dH / z, and the
/// ground / regressed / merged estimators are evaluated per trial.
std::vector<TrendRow> trend_sim(const CameraModel& cam, const TrendSimConfig& config);

/// Normalized focal length 2 f / image height.
double normalized_focal(double f, double image_h);

/// Cross-dataset depth correction: ratio of normalized focal lengths.
double focal_scale(double f_src, double h_src, double f_dst, double h_dst);

}  // namespace mono3d::depth_geometry
