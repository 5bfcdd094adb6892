#include "openable/ingest/frames.hpp"

#include <cmath>
#include <set>

#include "openable/core/json_util.hpp"
#include "openable/ingest/mesh_io.hpp"

namespace openable {

namespace fs = std::filesystem;

namespace {

// (x, y, z) in a y-up scene becomes (x, -z, y).
const Mat3& y_up_to_z_up() {
  static const Mat3 m = (Mat3() << 1, 0, 0, 0, 0, -1, 0, 1, 0).finished();
  return m;
}

CalibratedFrame parse_frame(const Json& rec, const fs::path& base, std::size_t index) {
  CalibratedFrame frame;
  if (!rec.is_object() || !rec.contains("frame_id")) {
    throw LoadError("frame record " + std::to_string(index) + " has no frame_id");
  }
  frame.frame_id = rec["frame_id"].get<std::string>();
  const std::string& id = frame.frame_id;
  try {
    const auto& pose = rec.at("pose");
    const auto& intr = rec.at("intrinsics");
    if (!pose.is_array() || pose.size() != 16) throw LoadError("pose needs 16 numbers", id);
    if (!intr.is_array() || intr.size() != 4) throw LoadError("intrinsics needs 4 numbers", id);
    Mat4 m;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m(r, c) = pose[4 * r + c].get<double>();
    }
    try {
      frame.pose = Se3Pose::from_matrix(m, 1e-4);
    } catch (const InvalidInput& e) {
      throw LoadError("frame " + id + ": " + e.what(), id);
    }
    frame.intrinsics = Intrinsics{intr[0].get<double>(), intr[1].get<double>(),
                                  intr[2].get<double>(), intr[3].get<double>(),
                                  rec.at("width").get<int>(), rec.at("height").get<int>()};
  } catch (const Json::exception& e) {
    throw LoadError("frame " + id + ": " + e.what(), id);
  }
  if (!frame.intrinsics.valid()) throw LoadError("frame " + id + ": invalid intrinsics", id);

  const auto depth_mm = [&] {
    try {
      return read_png_gray16(base / rec.at("depth").get<std::string>());
    } catch (const Error& e) {
      throw LoadError("frame " + id + ": " + e.what(), id);
    } catch (const Json::exception& e) {
      throw LoadError("frame " + id + ": " + e.what(), id);
    }
  }();
  if (depth_mm.width() != frame.intrinsics.width || depth_mm.height() != frame.intrinsics.height) {
    throw LoadError("frame " + id + ": depth size differs from intrinsics", id);
  }
  frame.depth = DepthMap(depth_mm.width(), depth_mm.height());
  for (std::size_t i = 0; i < depth_mm.size(); ++i) {
    frame.depth[i] = static_cast<float>(depth_mm[i]) / 1000.0f;
  }
  if (rec.contains("color") && !rec["color"].is_null()) {
    try {
      frame.color = read_png_rgb8(base / rec["color"].get<std::string>());
    } catch (const Error& e) {
      throw LoadError("frame " + id + ": " + e.what(), id);
    }
    if (frame.color->width != frame.intrinsics.width ||
        frame.color->height != frame.intrinsics.height) {
      throw LoadError("frame " + id + ": color size differs from intrinsics", id);
    }
  }
  return frame;
}

}  // namespace

float quantize_depth_mm(double meters) {
  if (!(meters > 0) || meters * 1000.0 > 65535.0) return 0.0f;
  return static_cast<float>(std::round(meters * 1000.0)) / 1000.0f;
}

SceneInput load_scene(const fs::path& mesh_path, const fs::path& manifest_path) {
  SceneInput scene;
  scene.mesh = read_mesh(mesh_path);
  scene.mesh.ensure_colors();

  const Json manifest = read_json_file(manifest_path);
  const Json* records = &manifest;
  bool y_up = false;
  if (manifest.is_object()) {
    if (!manifest.contains("frames")) throw LoadError("manifest object has no \"frames\"");
    records = &manifest["frames"];
    const std::string up = manifest.value("up", std::string("z"));
    if (up == "y") {
      y_up = true;
    } else if (up != "z") {
      throw LoadError("manifest \"up\" must be \"y\" or \"z\"");
    }
  }
  if (!records->is_array()) throw LoadError("manifest frames must be an array");

  const fs::path base = manifest_path.parent_path();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records->size(); ++i) {
    CalibratedFrame f = parse_frame((*records)[i], base, i);
    if (!seen.insert(f.frame_id).second) {
      throw LoadError("duplicate frame_id " + f.frame_id, f.frame_id);
    }
    scene.frames.push_back(std::move(f));
  }

  if (y_up) {
    const Mat3& r = y_up_to_z_up();
    for (auto& v : scene.mesh.vertices) v = r * v;
    for (auto& f : scene.frames) {
      f.pose.rotation = r * f.pose.rotation;
      f.pose.translation = r * f.pose.translation;
    }
  }
  return scene;
}

fs::path save_scene(const fs::path& dir, const SceneInput& scene) {
  fs::create_directories(dir / "depth");
  write_ply(dir / "mesh.ply", scene.mesh);
  Json frames = Json::array();
  for (const auto& f : scene.frames) {
    Raster<std::uint16_t> mm(f.depth.width(), f.depth.height());
    for (std::size_t i = 0; i < mm.size(); ++i) {
      const float q = quantize_depth_mm(f.depth[i]);
      mm[i] = static_cast<std::uint16_t>(std::lround(q * 1000.0));
    }
    const std::string depth_rel = "depth/" + f.frame_id + ".png";
    write_png_gray16(dir / depth_rel, mm);
    Json pose = Json::array();
    const Mat4 m = f.pose.matrix();
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) pose.push_back(m(r, c));
    }
    Json rec{{"frame_id", f.frame_id},
             {"depth", depth_rel},
             {"pose", pose},
             {"intrinsics", {f.intrinsics.fx, f.intrinsics.fy, f.intrinsics.cx, f.intrinsics.cy}},
             {"width", f.intrinsics.width},
             {"height", f.intrinsics.height}};
    if (f.color) {
      fs::create_directories(dir / "color");
      const std::string color_rel = "color/" + f.frame_id + ".png";
      write_png_rgb8(dir / color_rel, *f.color);
      rec["color"] = color_rel;
    }
    frames.push_back(std::move(rec));
  }
  const fs::path manifest = dir / "frames.json";
  write_json_file(manifest, frames);
  return manifest;
}

const CalibratedFrame* find_frame(const std::vector<CalibratedFrame>& frames,
                                  const std::string& frame_id) {
  for (const auto& f : frames) {
    if (f.frame_id == frame_id) return &f;
  }
  return nullptr;
}

}  // namespace openable
