#include "mono3d/depth_geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "mono3d/rng.hpp"

namespace mono3d::depth_geometry {

Mat3 Mat3::identity() {
  Mat3 out;
  for (int i = 0; i < 3; ++i) out.m[i][i] = 1.0;
  return out;
}

Mat3 Mat3::rotation_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 out = identity();
  out.m[1][1] = c;
  out.m[1][2] = -s;
  out.m[2][1] = s;
  out.m[2][2] = c;
  return out;
}

Mat3 Mat3::rotation_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 out = identity();
  out.m[0][0] = c;
  out.m[0][2] = s;
  out.m[2][0] = -s;
  out.m[2][2] = c;
  return out;
}

Mat3 Mat3::transpose() const {
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.m[i][j] = m[j][i];
  return out;
}

Mat3 Mat3::operator*(const Mat3& rhs) const {
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += m[i][k] * rhs.m[k][j];
      out.m[i][j] = acc;
    }
  return out;
}

Vec3 Mat3::operator*(const Vec3& v) const {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

bool Mat3::is_orthonormal(double tol) const {
  const Mat3 prod = *this * transpose();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      if (std::fabs(prod.m[i][j] - want) > tol) return false;
    }
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  return std::fabs(det - 1.0) <= 1e-6;
}

void CameraModel::validate() const {
  if (!(f > 0.0)) throw std::invalid_argument("CameraModel: focal length must be > 0");
  if (!(height > 0.0)) throw std::invalid_argument("CameraModel: mounting height must be > 0");
  if (!rotation.is_orthonormal()) {
    throw std::invalid_argument("CameraModel: rotation must be orthonormal with det 1");
  }
}

Mat3 CameraModel::a_matrix() const {
  // K^-1 for an upper-triangular pinhole K.
  Mat3 kinv;
  kinv.m[0][0] = 1.0 / f;
  kinv.m[0][2] = -cu / f;
  kinv.m[1][1] = 1.0 / f;
  kinv.m[1][2] = -cv / f;
  kinv.m[2][2] = 1.0;
  return rotation.transpose() * kinv;
}

Vec3 CameraModel::b_vector() const {
  const Vec3 rt = rotation.transpose() * translation;
  return {-rt.x, -rt.y, -rt.z};
}

Projection project(const CameraModel& cam, const Vec3& point) {
  const Vec3 rotated = cam.rotation * point;
  const Vec3 p{rotated.x + cam.translation.x, rotated.y + cam.translation.y,
               rotated.z + cam.translation.z};
  if (!(p.z > 0.0)) {
    throw std::domain_error("project: point is behind the camera");
  }
  return {cam.f * p.x / p.z + cam.cu, cam.f * p.y / p.z + cam.cv, p.z};
}

std::optional<double> ground_depth(const CameraModel& cam, double u, double v) {
  const Mat3 a = cam.a_matrix();
  const Vec3 b = cam.b_vector();
  const double cd = std::cos(cam.pitch);
  const double sd = std::sin(cam.pitch);
  const double numerator = std::max(cam.height - b.y * cd - b.z * sd, 0.0);
  const double denominator = (a.m[1][0] * u + a.m[1][1] * v + a.m[1][2]) * cd +
                             (a.m[2][0] * u + a.m[2][1] * v + a.m[2][2]) * sd;
  if (!(denominator > 0.0)) return std::nullopt;  // pixel at or above the horizon
  return numerator / denominator;
}

std::optional<double> ray_plane_depth_oracle(const CameraModel& cam, double u, double v) {
  // Parametric ray: world = A [u v 1]^T z + B; intersect with y = H.
  const Mat3 a = cam.a_matrix();
  const Vec3 b = cam.b_vector();
  const double dir_y = a.m[1][0] * u + a.m[1][1] * v + a.m[1][2];
  if (std::fabs(dir_y) < 1e-300) return std::nullopt;
  const double z = (cam.height - b.y) / dir_y;
  if (!(z > 0.0)) return std::nullopt;
  return z;
}

Pixel bottom_center(const DetectionGeom& det) {
  if (!(det.h2d > 0.0)) throw std::invalid_argument("bottom_center: h2d must be > 0");
  return {det.uc, det.vc + 0.5 * det.h2d + det.alpha * (det.vc - det.vc2d)};
}

double merge_depth(double z_reg, std::optional<double> z_ground) {
  if (!(z_reg >= 0.0) || !std::isfinite(z_reg)) {
    throw std::invalid_argument("merge_depth: regressed depth must be finite and >= 0");
  }
  if (!z_ground.has_value() || !std::isfinite(*z_ground) || *z_ground < 0.0) {
    return z_reg;
  }
  return 0.5 * (z_reg + *z_ground);
}

double predicted_trend(TrendKind kind, const CameraModel& cam, const TrendQuery& query) {
  switch (kind) {
    case TrendKind::ground: {
      const double denom = query.vb - cam.cv;
      const double factor = denom > 0.0 ? 1.0 / denom : 0.0;  // ReLU of 1/(vb - cv)
      return factor * cam.f * query.dh;
    }
    case TrendKind::regressed: {
      if (!(query.beta > 0.0)) throw std::invalid_argument("predicted_trend: beta must be > 0");
      if (!(query.z > 0.0)) throw std::invalid_argument("predicted_trend: z must be > 0");
      return -(query.beta / query.z) * cam.f * query.dh;
    }
  }
  throw std::invalid_argument("predicted_trend: unknown kind");
}

double default_beta(const CameraModel& cam, double z_max, double z_min) {
  const double span = cam.image_h - cam.cv;
  if (!(span > 0.0)) throw std::invalid_argument("default_beta: image_h must exceed cv");
  return (z_max - z_min) / span;
}

std::vector<TrendRow> trend_sim(const CameraModel& cam, const TrendSimConfig& config) {
  cam.validate();
  TrendSimConfig cfg = config;
  if (cfg.object_depths.empty()) {
    for (int i = 0; i < 24; ++i) cfg.object_depths.push_back(10.0 + 20.0 * i / 23.0);
  }
  if (cfg.beta <= 0.0) cfg.beta = default_beta(cam);
  if (cfg.trials < 2) throw std::invalid_argument("trend_sim: trials must be >= 2");
  double max_abs_dh = 0.0;
  for (const double dh : cfg.height_deltas) max_abs_dh = std::max(max_abs_dh, std::fabs(dh));
  for (const double z : cfg.object_depths) {
    if (!(z > max_abs_dh)) {
      throw std::invalid_argument("trend_sim: object depths must exceed the height change");
    }
  }

  std::vector<TrendRow> rows;
  rows.reserve(cfg.height_deltas.size());
  for (std::size_t di = 0; di < cfg.height_deltas.size(); ++di) {
    const double dh = cfg.height_deltas[di];
    CameraModel test_cam = cam;
    test_cam.height = cam.height + dh;

    std::vector<double> g_means(cfg.trials), r_means(cfg.trials), m_means(cfg.trials);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      auto gen = rng::engine(rng::sub_seed(cfg.seed, di * cfg.trials + trial));
      std::normal_distribution<double> noise(0.0, 1.0);

      double g_acc = 0.0, r_acc = 0.0, m_acc = 0.0;
      for (const double z : cfg.object_depths) {
        const double eta_g = cfg.noise_sigma * noise(gen);
        const double eta_r = cfg.noise_sigma * noise(gen);

        // The ground branch measures the bottom pixel at train height
        // with depth noise, then queries the ground plane for the new
        // camera height at that pixel (the theorem's model keeps the
        // train-height pixel in the denominator).
        const double z_train = std::max(z + eta_g, 0.5);
        const double vb_meas = cam.cv + cam.f * cam.height / z_train;
        const auto z_ground = ground_depth(test_cam, cam.cu, vb_meas);

        // The regressed branch sees the shifted pixel f dH / z.
        const double dv = cam.f * dh / z;
        const double z_regressed = z + eta_r - cfg.beta * dv;

        const double merged = merge_depth(std::max(z_regressed, 0.0), z_ground);
        g_acc += (z_ground.value_or(z) - z);
        r_acc += (z_regressed - z);
        m_acc += (merged - z);
      }
      const double count = static_cast<double>(cfg.object_depths.size());
      g_means[trial] = g_acc / count;
      r_means[trial] = r_acc / count;
      m_means[trial] = m_acc / count;
    }

    const auto mean_se = [&](const std::vector<double>& xs, double& mean, double& se) {
      double sum = 0.0;
      for (const double x : xs) sum += x;
      mean = sum / static_cast<double>(xs.size());
      double ss = 0.0;
      for (const double x : xs) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) /
                     static_cast<double>(xs.size()));
    };
    TrendRow row;
    row.dh = dh;
    mean_se(g_means, row.mean_err_ground, row.se_ground);
    mean_se(r_means, row.mean_err_regressed, row.se_regressed);
    mean_se(m_means, row.mean_err_merged, row.se_merged);
    rows.push_back(row);
  }
  return rows;
}

double normalized_focal(double f, double image_h) {
  if (!(f > 0.0) || !(image_h > 0.0)) {
    throw std::invalid_argument("normalized_focal: inputs must be > 0");
  }
  return 2.0 * f / image_h;
}

double focal_scale(double f_src, double h_src, double f_dst, double h_dst) {
  return normalized_focal(f_src, h_src) / normalized_focal(f_dst, h_dst);
}

}  // namespace mono3d::depth_geometry
