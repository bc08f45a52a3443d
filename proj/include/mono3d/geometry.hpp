#pragma once

#include <array>
#include <vector>

namespace mono3d::geometry {

/// Axis-aligned 2D box in pixel coordinates, corners (x1,y1)-(x2,y2).
struct Box2D {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

/// 7-DoF 3D box: center (cx,cy,cz) in meters, dimensions l x w x h,
/// yaw about the vertical (y) axis. The BEV footprint lives in the
/// (x,z) plane; the vertical extent is [cy - h/2, cy + h/2].
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;
  double yaw = 0.0;
  double score = 0.0;
  Box2D box2d{};

  double volume() const { return l * w * h; }
};

/// Point in the BEV (x,z) plane.
struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

using Polygon = std::vector<Vec2>;

/// Counter-clockwise BEV footprint corners of a yaw-rotated box.
std::array<Vec2, 4> bev_corners(const Box3D& b);

/// Signed-area-free polygon area (shoelace, absolute value).
double polygon_area(const Polygon& poly);

/// Intersection of two convex polygons (Sutherland-Hodgman clipping).
Polygon clip_convex(const Polygon& subject, const Polygon& clip);

/// Intersection area of the two rotated BEV rectangles.
double bev_intersection_area(const Box3D& a, const Box3D& b);

/// 2D intersection over union. Degenerate (zero-area) inputs give 0.
double iou2d(const Box2D& a, const Box2D& b);

/// 3D IoU: rotated-BEV polygon intersection times vertical interval
/// overlap, over the union volume. Degenerate boxes give 0.
double iou3d(const Box3D& a, const Box3D& b);

/// Generalized 3D IoU: V(inter)/V(union) + V(union)/V_hull - 1.
/// The hull is the axis-aligned bounding box of both de-rotated BEV
/// footprints times the vertical hull extent. Negative for disjoint
/// boxes. Throws std::invalid_argument if the hull is degenerate.
double giou3d(const Box3D& a, const Box3D& b);

/// Brute-force IoU3D oracle: counts voxel centers on a grid with
/// `resolution` cells per meter. Throws if resolution < 16.
double voxel_iou3d_oracle(const Box3D& a, const Box3D& b, int resolution);

}  // namespace mono3d::geometry
