#pragma once

#include <string>
#include <vector>

#include "mono3d/geometry.hpp"

namespace mono3d::box_io {

/// Reads a JSON array of box records
///   {cx, cy, cz, l, w, h, yaw, score, box2d: [x1, y1, x2, y2]}
/// Throws std::runtime_error with line/column information on malformed
/// input.
std::vector<geometry::Box3D> read_boxes_json(const std::string& path);
std::vector<geometry::Box3D> parse_boxes_json(const std::string& text);

std::string boxes_to_json(const std::vector<geometry::Box3D>& boxes);
void write_boxes_json(const std::string& path, const std::vector<geometry::Box3D>& boxes);

}  // namespace mono3d::box_io
