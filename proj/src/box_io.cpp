#include "mono3d/box_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mono3d::box_io {

namespace {

using nlohmann::json;

geometry::Box3D box_from_json(const json& rec) {
  geometry::Box3D box;
  box.cx = rec.at("cx").get<double>();
  box.cy = rec.at("cy").get<double>();
  box.cz = rec.at("cz").get<double>();
  box.l = rec.at("l").get<double>();
  box.w = rec.at("w").get<double>();
  box.h = rec.at("h").get<double>();
  box.yaw = rec.at("yaw").get<double>();
  box.score = rec.value("score", 0.0);
  if (rec.contains("box2d")) {
    const auto& b = rec.at("box2d");
    if (!b.is_array() || b.size() != 4) {
      throw std::runtime_error("box2d must be an array [x1, y1, x2, y2]");
    }
    box.box2d = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  }
  return box;
}

}  // namespace

std::vector<geometry::Box3D> parse_boxes_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "parse error at line L, column C: ..." already.
    throw std::runtime_error(std::string("box JSON: ") + e.what());
  }
  if (!doc.is_array()) throw std::runtime_error("box JSON: top level must be an array");
  std::vector<geometry::Box3D> boxes;
  boxes.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      boxes.push_back(box_from_json(doc[i]));
    } catch (const json::exception& e) {
      std::ostringstream msg;
      msg << "box JSON: record " << i << ": " << e.what();
      throw std::runtime_error(msg.str());
    }
  }
  return boxes;
}

std::vector<geometry::Box3D> read_boxes_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open box file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_boxes_json(buf.str());
}

std::string boxes_to_json(const std::vector<geometry::Box3D>& boxes) {
  json arr = json::array();
  for (const auto& b : boxes) {
    arr.push_back({{"cx", b.cx},
                   {"cy", b.cy},
                   {"cz", b.cz},
                   {"l", b.l},
                   {"w", b.w},
                   {"h", b.h},
                   {"yaw", b.yaw},
                   {"score", b.score},
                   {"box2d", {b.box2d.x1, b.box2d.y1, b.box2d.x2, b.box2d.y2}}});
  }
  return arr.dump(2);
}

void write_boxes_json(const std::string& path, const std::vector<geometry::Box3D>& boxes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write box file: " + path);
  out << boxes_to_json(boxes) << "\n";
}

}  // namespace mono3d::box_io
