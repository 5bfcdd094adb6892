#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "openable/core/json_util.hpp"
#include "openable/ingest/detections.hpp"
#include "openable/ingest/frames.hpp"
#include "openable/ingest/ground_truth.hpp"

namespace openable {

enum class UnitType { kDrawerStack, kHingedCabinet, kDoor };
enum class HingeSide { kLeft, kRight, kTop, kBottom };

/// One piece of furniture standing against a wall. Local frame: x along the
/// wall, y out of the wall (the front is at y = depth), z up.
struct FurnitureUnit {
  UnitType type = UnitType::kDrawerStack;
  int wall = 0;            // 0: y = 0, 1: x = Lx, 2: y = Ly, 3: x = 0
  double offset = 0.5;     // along the wall from its start corner
  double elevation = 0.0;  // bottom of the unit above the floor
  double width = 0.8;
  double depth = 0.5;      // also the interior depth
  double height = 0.8;
  int count = 1;           // drawers, or doors (1 or 2) for cabinets
  HingeSide hinge = HingeSide::kLeft;
  double range = 0.0;      // 0 = default (0.8 * depth, or pi / 2)
};

struct SyntheticCameras {
  int width = 256;
  int height = 192;
  double focal = 200.0;
  int views_per_unit = 4;
  double yaw_span_deg = 30.0;
};

struct DetectorNoise {
  double sigma_axis_deg = 0.0;
  double sigma_origin = 0.0;
  double type_flip_prob = 0.0;
};

struct SyntheticSceneSpec {
  Vec3 room{5.0, 6.0, 2.6};
  std::vector<FurnitureUnit> units;
  SyntheticCameras cameras;
  DetectorNoise noise;
  int min_mask_pixels = 50;
  std::uint64_t seed = 1;
};

struct SyntheticScene {
  SceneInput scene;
  std::vector<DetectionRecord> detections;
  GroundTruth ground_truth;
  std::vector<std::vector<int>> part_faces;     // per ground-truth part, ascending
  std::vector<std::vector<Vec3>> open_vertices;  // per part, at state = range, in vertex_indices order
};

inline constexpr double kRail = 0.03;
inline constexpr double kPanelProud = 0.006;

/// Throws SpecError for non-positive dimensions, units leaving the room or
/// overlapping each other, and unsupported part counts.
SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec);

/// A valid random layout with between min_parts and max_parts movable parts.
SyntheticSceneSpec random_scene_spec(std::uint64_t seed, int min_parts = 3, int max_parts = 6);

Json to_json(const SyntheticSceneSpec& spec);
SyntheticSceneSpec synthetic_spec_from_json(const Json& j);

/// save_scene plus detections.json, ground_truth.json and spec.json.
void write_synthetic(const std::filesystem::path& dir, const SyntheticScene& s,
                     const SyntheticSceneSpec& spec);

}  // namespace openable
