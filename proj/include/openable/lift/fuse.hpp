#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "openable/ingest/detections.hpp"
#include "openable/lift/rasterize.hpp"

namespace openable {

struct MaskProjection {
  std::string frame_id;
  int detection_index = -1;
  std::vector<int> faces;     // ascending
  std::size_t pixel_count = 0;  // filled-mask pixels that landed on a face
};

struct SupportingView {
  std::string frame_id;
  int detection_index = -1;
  double iou = 0.0;
};

struct FusedInstance {
  std::string instance_id;
  std::vector<int> faces;  // ascending
  std::vector<SupportingView> views;  // iou descending, at most k
};

/// Faces under the hole-filled mask; faces covering fewer than min_pixels
/// pixels are dropped. Throws InvalidInput on a size mismatch.
MaskProjection project_mask(const FaceVisibilityMap& vis, const Mask& mask, int min_pixels = 3);

struct FuseOptions {
  double iou_threshold = 0.5;
  int top_k = 5;
  double adjacency_bonus = 0.01;
  double resolution = 1.0;
  std::uint64_t seed = 0;  // accepted for interface stability; traversal is index-ordered
};

/// Face co-occurrence graph + Louvain; see FuseOptions for the knobs.
std::vector<FusedInstance> fuse_instances(std::vector<MaskProjection> projections,
                                          const TriMesh& mesh, const FuseOptions& opts);

/// |a ∩ b| / |a ∪ b| for ascending index lists.
double sorted_set_iou(const std::vector<int>& a, const std::vector<int>& b);

struct LiftResult {
  std::vector<FaceVisibilityMap> visibility;  // one per frame, frame order
  std::vector<MaskProjection> projections;    // non-empty ones only
  std::vector<FusedInstance> instances;
};

/// Rasterizes every frame and projects every grounding record.
LiftResult lift_detections(const TriMesh& mesh, const std::vector<CalibratedFrame>& frames,
                           const std::vector<DetectionRecord>& detections,
                           const FuseOptions& opts, int min_pixels = 3);

/// Per-instance face sets and supporting views.
void write_lift_debug(const std::filesystem::path& path, const std::vector<FusedInstance>& instances);

/// Per-instance, per-view centroid of the mask-on pixels, for external re-segmentation.
void write_seed_pixels(const std::filesystem::path& path, const std::vector<FusedInstance>& instances,
                       const std::vector<DetectionRecord>& detections);

}  // namespace openable
