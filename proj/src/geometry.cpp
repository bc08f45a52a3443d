#include "mono3d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mono3d::geometry {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.z - o.z) - (a.z - o.z) * (b.x - o.x);
}

// Intersection of segment (a,b) with the infinite line through (p,q).
Vec2 line_intersection(const Vec2& a, const Vec2& b, const Vec2& p, const Vec2& q) {
  const double a1 = b.z - a.z;
  const double b1 = a.x - b.x;
  const double c1 = a1 * a.x + b1 * a.z;
  const double a2 = q.z - p.z;
  const double b2 = p.x - q.x;
  const double c2 = a2 * p.x + b2 * p.z;
  const double det = a1 * b2 - a2 * b1;
  return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

double interval_overlap(double min1, double max1, double min2, double max2) {
  return std::max(0.0, std::min(max1, max2) - std::max(min1, min2));
}

}  // namespace

std::array<Vec2, 4> bev_corners(const Box3D& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  // Local offsets (dx, dz) rotated into the BEV plane; CCW order.
  const std::array<std::array<double, 2>, 4> local = {{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<Vec2, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    const double dx = local[i][0];
    const double dz = local[i][1];
    out[i] = {b.cx + dx * c - dz * s, b.cz + dx * s + dz * c};
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    acc += p.x * q.z - q.x * p.z;
  }
  return 0.5 * std::fabs(acc);
}

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon output = subject;
  const std::size_t n = clip.size();
  for (std::size_t i = 0; i < n && !output.empty(); ++i) {
    const Vec2& p = clip[i];
    const Vec2& q = clip[(i + 1) % n];
    Polygon input;
    input.swap(output);
    const std::size_t m = input.size();
    for (std::size_t j = 0; j < m; ++j) {
      const Vec2& cur = input[j];
      const Vec2& nxt = input[(j + 1) % m];
      // Keep points on the left side of edge p->q (CCW clip polygon).
      const bool cur_in = cross(p, q, cur) >= 0.0;
      const bool nxt_in = cross(p, q, nxt) >= 0.0;
      if (cur_in) {
        output.push_back(cur);
        if (!nxt_in) output.push_back(line_intersection(cur, nxt, p, q));
      } else if (nxt_in) {
        output.push_back(line_intersection(cur, nxt, p, q));
      }
    }
  }
  return output;
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  const Polygon pa(ca.begin(), ca.end());
  const Polygon pb(cb.begin(), cb.end());
  return polygon_area(clip_convex(pa, pb));
}

double iou2d(const Box2D& a, const Box2D& b) {
  const double iw = interval_overlap(a.x1, a.x2, b.x1, b.x2);
  const double ih = interval_overlap(a.y1, a.y2, b.y1, b.y2);
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

namespace {

double intersection_volume(const Box3D& a, const Box3D& b) {
  const double dy = interval_overlap(a.cy - 0.5 * a.h, a.cy + 0.5 * a.h,
                                     b.cy - 0.5 * b.h, b.cy + 0.5 * b.h);
  if (dy <= 0.0) return 0.0;
  return bev_intersection_area(a, b) * dy;
}

}  // namespace

double iou3d(const Box3D& a, const Box3D& b) {
  const double va = a.volume();
  const double vb = b.volume();
  if (va <= 0.0 || vb <= 0.0) return 0.0;
  const double inter = intersection_volume(a, b);
  const double uni = va + vb - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double giou3d(const Box3D& a, const Box3D& b) {
  const double va = a.volume();
  const double vb = b.volume();
  const double inter = intersection_volume(a, b);
  const double uni = va + vb - inter;

  // Hull of the de-rotated footprints: axis-aligned l x w rectangles
  // at each center, then the bounding rectangle of both.
  const double x_min = std::min(a.cx - 0.5 * a.l, b.cx - 0.5 * b.l);
  const double x_max = std::max(a.cx + 0.5 * a.l, b.cx + 0.5 * b.l);
  const double z_min = std::min(a.cz - 0.5 * a.w, b.cz - 0.5 * b.w);
  const double z_max = std::max(a.cz + 0.5 * a.w, b.cz + 0.5 * b.w);
  const double y_min = std::min(a.cy - 0.5 * a.h, b.cy - 0.5 * b.h);
  const double y_max = std::max(a.cy + 0.5 * a.h, b.cy + 0.5 * b.h);
  const double hull = (x_max - x_min) * (z_max - z_min) * (y_max - y_min);
  if (hull <= 0.0 || uni <= 0.0) {
    throw std::invalid_argument("giou3d: degenerate hull or union volume");
  }
  return inter / uni + uni / hull - 1.0;
}

namespace {

bool point_in_box_bev(const Box3D& b, double x, double z) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = x - b.cx;
  const double dz = z - b.cz;
  // Rotate into the box frame.
  const double lx = dx * c + dz * s;
  const double lz = -dx * s + dz * c;
  return std::fabs(lx) <= 0.5 * b.l && std::fabs(lz) <= 0.5 * b.w;
}

}  // namespace

double voxel_iou3d_oracle(const Box3D& a, const Box3D& b, int resolution) {
  if (resolution < 16) {
    throw std::invalid_argument("voxel_iou3d_oracle: resolution must be >= 16");
  }
  if (a.volume() <= 0.0 || b.volume() <= 0.0) return 0.0;

  // Joint bounding region over both rotated boxes.
  double x_min = 1e300, x_max = -1e300, z_min = 1e300, z_max = -1e300;
  for (const Box3D* box : {&a, &b}) {
    for (const Vec2& c : bev_corners(*box)) {
      x_min = std::min(x_min, c.x);
      x_max = std::max(x_max, c.x);
      z_min = std::min(z_min, c.z);
      z_max = std::max(z_max, c.z);
    }
  }
  const double y_min = std::min(a.cy - 0.5 * a.h, b.cy - 0.5 * b.h);
  const double y_max = std::max(a.cy + 0.5 * a.h, b.cy + 0.5 * b.h);

  const double step = 1.0 / resolution;
  const auto cells = [step](double lo, double hi) {
    return static_cast<long>(std::ceil((hi - lo) / step));
  };
  const long nx = cells(x_min, x_max);
  const long ny = cells(y_min, y_max);
  const long nz = cells(z_min, z_max);

  long long n_inter = 0;
  long long n_union = 0;
  for (long ix = 0; ix < nx; ++ix) {
    const double x = x_min + (ix + 0.5) * step;
    for (long iz = 0; iz < nz; ++iz) {
      const double z = z_min + (iz + 0.5) * step;
      const bool in_a_bev = point_in_box_bev(a, x, z);
      const bool in_b_bev = point_in_box_bev(b, x, z);
      if (!in_a_bev && !in_b_bev) continue;
      for (long iy = 0; iy < ny; ++iy) {
        const double y = y_min + (iy + 0.5) * step;
        const bool in_a = in_a_bev && std::fabs(y - a.cy) <= 0.5 * a.h;
        const bool in_b = in_b_bev && std::fabs(y - b.cy) <= 0.5 * b.h;
        n_inter += (in_a && in_b);
        n_union += (in_a || in_b);
      }
    }
  }
  if (n_union == 0) return 0.0;
  return static_cast<double>(n_inter) / static_cast<double>(n_union);
}

}  // namespace mono3d::geometry
