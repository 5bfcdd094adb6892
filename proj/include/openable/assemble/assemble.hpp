#pragma once

#include <string>
#include <vector>

#include "openable/cavity/cavity.hpp"
#include "openable/core/json_util.hpp"

namespace openable {

struct InteractiveObject {
  std::string object_id;
  ValidatedPart part;
  InnerBox inner_box;

  /// Scene-vertex indices of the part, ascending.
  std::vector<int> point_set() const;
};

struct PruneRecord {
  std::string object_id;
  std::string stage;  // "pairwise" or "subdivision"
  std::vector<std::string> explained_by;
  double iou = 0.0;
};

struct CarveRecord {
  std::vector<int> removed_vertices;  // scene indices, ascending
  std::vector<int> removed_faces;
};

struct InteractiveScene {
  TriMesh background;
  std::vector<InteractiveObject> objects;  // sorted by object_id
  std::vector<PruneRecord> pruned;
  CarveRecord carved;
};

/// Exact index IoU of ascending index sets; 0 when both are empty.
double pointset_iou(const std::vector<int>& a, const std::vector<int>& b);

/// Greedy nearest-first one-to-one matching within match_radius.
double pointset_iou(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double match_radius);

struct DedupOptions {
  double tau_dup = 0.7;
  double tau_low = 0.1;
  int max_subset = 4;
};

struct DedupResult {
  std::vector<InteractiveObject> kept;  // sorted by object_id
  std::vector<PruneRecord> pruned;
};

/// Dedup on plain index sets; returns the indices of the kept sets (ascending)
/// and the prune log with ids = the given names.
struct SetDedup {
  std::vector<int> kept;
  std::vector<PruneRecord> pruned;
};
SetDedup dedup_sets(const std::vector<std::vector<int>>& sets, const std::vector<std::string>& ids,
                    const DedupOptions& opts);

DedupResult dedup(std::vector<InteractiveObject> objects, const DedupOptions& opts);

/// Removes scene vertices inside any object's part OBB (grown by margin) and
/// their incident faces.
TriMesh carve_background(const TriMesh& scene, const std::vector<InteractiveObject>& objects,
                         double margin, CarveRecord* record = nullptr);

/// Composes the scene and checks its invariants; throws AssemblyError naming
/// the offending objects.
InteractiveScene assemble_scene(TriMesh background, std::vector<InteractiveObject> objects,
                                double tau_dup, std::vector<PruneRecord> pruned = {},
                                CarveRecord carved = {});

Json provenance_json(const InteractiveScene& scene);

}  // namespace openable
