#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "openable/core/articulation.hpp"

namespace openable {

struct GroundTruthPart {
  std::string part_id;
  std::vector<int> vertex_indices;  // ascending, into the scene mesh
  Articulation articulation;        // world frame
};

struct GroundTruth {
  std::string scene_mesh;  // optional reference, relative to the file
  std::vector<GroundTruthPart> parts;
};

/// vertex_count < 0 skips the bounds check. Throws LoadError.
GroundTruth load_ground_truth(const std::filesystem::path& path, long long vertex_count = -1);
void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

}  // namespace openable
