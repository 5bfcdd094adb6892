#pragma once

#include <optional>
#include <vector>

#include "openable/core/articulation.hpp"
#include "openable/ingest/detections.hpp"
#include "openable/ingest/frames.hpp"
#include "openable/part/extract.hpp"

namespace openable {

struct ValidatedPart {
  PartCandidate candidate;
  Articulation articulation;
  Articulation initial;  // world-frame hint before refinement
  Obb obb;
  UnitVec3 front_normal;  // into the furniture
  double hint_iou = 0.0;
};

struct HintMatch {
  Articulation articulation;  // world frame
  double iou = 0.0;
  std::string frame_id;
};

/// Best pixel-IoU OPD record over the candidate's supporting views, hint moved
/// to world coordinates. nullopt when no pair reaches iou_threshold.
std::optional<HintMatch> filter_candidate(const PartCandidate& candidate,
                                          const std::vector<DetectionRecord>& detections,
                                          const std::vector<CalibratedFrame>& frames,
                                          double iou_threshold);

/// OBB snap of the joint axis (and hinge origin for revolute joints). With
/// refine = false the OBB is still computed but the articulation passes through.
ValidatedPart refine_articulation(const PartCandidate& part, const Articulation& initial,
                                  bool refine = true);

/// Front face center of the OBB (the face opposite to +front_normal).
Vec3 front_center(const Obb& obb, const UnitVec3& front_normal);

/// Rodrigues rotation matrix for a unit axis.
Mat3 rotation_about(const UnitVec3& axis, double angle);

/// Moves a point to joint state `state`; states outside [0, range] are clamped.
Vec3 apply_articulation(const Vec3& point, const Articulation& art, double state);

/// Rigid transform equivalent of apply_articulation at `state`.
Se3Pose articulation_transform(const Articulation& art, double state);

TriMesh transform_part(const TriMesh& mesh, const Articulation& art, double state);

}  // namespace openable
