#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "openable/core/png_io.hpp"
#include "openable/core/raster.hpp"
#include "openable/core/types.hpp"

namespace openable {

using DepthMap = Raster<float>;  // meters, 0 = invalid

struct CalibratedFrame {
  std::string frame_id;
  std::optional<Rgb8Image> color;
  DepthMap depth;
  Se3Pose pose;  // camera-to-world
  Intrinsics intrinsics;

  /// Camera forward axis in world coordinates.
  Vec3 view_direction() const { return pose.rotation.col(2); }
  Vec3 position() const { return pose.translation; }
};

struct SceneInput {
  TriMesh mesh;
  std::vector<CalibratedFrame> frames;
};

/// Loads the scene mesh and the frames manifest. The manifest is either a
/// JSON array of frame records or {"up": "y"|"z", "frames": [...]}; y-up
/// scenes are rotated to z-up. Throws LoadError naming the frame on bad
/// poses, missing rasters or size mismatches.
SceneInput load_scene(const std::filesystem::path& mesh_path,
                      const std::filesystem::path& manifest_path);

/// Writes mesh.ply, frames.json and depth/<id>.png (+ color/<id>.png) into dir.
/// Depth is quantized to millimeters. Returns the manifest path.
std::filesystem::path save_scene(const std::filesystem::path& dir, const SceneInput& scene);

/// Round to the nearest millimeter (what a 16-bit mm PNG can hold).
float quantize_depth_mm(double meters);

const CalibratedFrame* find_frame(const std::vector<CalibratedFrame>& frames,
                                  const std::string& frame_id);

}  // namespace openable
