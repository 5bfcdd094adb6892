#include "openable/ingest/ground_truth.hpp"

#include <algorithm>

#include "openable/core/json_util.hpp"

namespace openable {

GroundTruth load_ground_truth(const std::filesystem::path& path, long long vertex_count) {
  const Json doc = read_json_file(path);
  GroundTruth gt;
  try {
    gt.scene_mesh = doc.value("scene_mesh", std::string());
    for (const auto& p : doc.at("parts")) {
      GroundTruthPart part;
      part.part_id = p.at("part_id").get<std::string>();
      part.vertex_indices = p.at("vertex_indices").get<std::vector<int>>();
      part.articulation = articulation_from_json(p.at("articulation"));
      if (part.vertex_indices.empty()) {
        throw LoadError("ground-truth part " + part.part_id + " has no vertices");
      }
      std::sort(part.vertex_indices.begin(), part.vertex_indices.end());
      part.vertex_indices.erase(std::unique(part.vertex_indices.begin(), part.vertex_indices.end()),
                                part.vertex_indices.end());
      if (part.vertex_indices.front() < 0 ||
          (vertex_count >= 0 && part.vertex_indices.back() >= vertex_count)) {
        throw LoadError("ground-truth part " + part.part_id + " has out-of-range vertex indices");
      }
      gt.parts.push_back(std::move(part));
    }
  } catch (const Json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return gt;
}

void save_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
  Json parts = Json::array();
  for (const auto& p : gt.parts) {
    parts.push_back(Json{{"part_id", p.part_id},
                         {"vertex_indices", p.vertex_indices},
                         {"articulation", to_json(p.articulation)}});
  }
  Json doc{{"parts", std::move(parts)}};
  if (!gt.scene_mesh.empty()) doc["scene_mesh"] = gt.scene_mesh;
  write_json_file(path, doc);
}

}  // namespace openable
