#include "openable/articulate/articulate.hpp"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "openable/core/geometry.hpp"

namespace openable {

std::optional<HintMatch> filter_candidate(const PartCandidate& candidate,
                                          const std::vector<DetectionRecord>& detections,
                                          const std::vector<CalibratedFrame>& frames,
                                          double iou_threshold) {
  if (!(iou_threshold > 0 && iou_threshold <= 1)) {
    throw InvalidInput("candidate IoU threshold must lie in (0, 1]");
  }
  std::optional<HintMatch> best;
  for (const auto& view : candidate.views) {
    if (view.detection_index < 0 || view.detection_index >= static_cast<int>(detections.size())) continue;
    const Mask& sam = detections[view.detection_index].mask;
    const CalibratedFrame* frame = find_frame(frames, view.frame_id);
    if (!frame) continue;
    for (const auto& d : detections) {
      if (d.source != DetectionSource::kOpd || d.frame_id != view.frame_id || !d.joint_hint) continue;
      if (d.mask.width() != sam.width() || d.mask.height() != sam.height()) continue;
      const double iou = mask_iou(sam, d.mask);
      if (iou < iou_threshold || (best && iou <= best->iou)) continue;
      const JointHint& h = *d.joint_hint;
      if (!(h.axis_cam.norm() > 1e-12)) {
        spdlog::warn("OPD record in frame {} has a zero-length axis; skipped", d.frame_id);
        continue;
      }
      HintMatch m;
      m.iou = iou;
      m.frame_id = d.frame_id;
      m.articulation.type = h.type;
      m.articulation.axis = UnitVec3::normalize(frame->pose.rotate(h.axis_cam));
      m.articulation.origin = frame->pose.apply(h.origin_cam);
      m.articulation.range = h.range;
      best = m;
    }
  }
  return best;
}

Vec3 front_center(const Obb& obb, const UnitVec3& front_normal) {
  return obb.center - 0.5 * obb.extents.z() * front_normal.vec();
}

namespace {

double signed_unit(double x, const char* what) {
  if (x == 0.0) {
    spdlog::warn("initial axis is orthogonal to the {} direction; choosing +", what);
    return 1.0;
  }
  return x > 0 ? 1.0 : -1.0;
}

}  // namespace

ValidatedPart refine_articulation(const PartCandidate& part, const Articulation& initial, bool refine) {
  ValidatedPart out;
  out.candidate = part;
  out.initial = initial;
  out.obb = fit_obb(part.part_mesh.vertices);
  const Obb& b = out.obb;
  Vec3 n = b.axes[0].vec().cross(b.axes[1].vec());
  if (n.dot(part.front_plane.normal.vec()) < 0) n = -n;
  out.front_normal = UnitVec3::normalize(n);
  out.articulation = initial;
  if (!refine) return out;

  const Vec3& a = initial.axis.vec();
  if (initial.type == JointType::kPrismatic) {
    out.articulation.axis = UnitVec3::normalize(signed_unit(a.dot(n), "front normal") * n);
    return out;
  }
  const int ls = std::abs(a.dot(b.axes[0].vec())) >= std::abs(a.dot(b.axes[1].vec())) ? 0 : 1;
  const Vec3 l = b.axes[ls].vec();
  const Vec3 refined_axis = signed_unit(a.dot(l), "hinge edge") * l;
  // The two front-face edges parallel to l sit at ±s_other/2 along the other in-plane axis.
  const Vec3 other = b.axes[1 - ls].vec();
  const double half_len = 0.5 * b.extents[ls];
  const double half_other = 0.5 * b.extents[1 - ls];
  const Vec3 fc = front_center(b, out.front_normal);
  double best_d = 0;
  Vec3 best_mid = fc;
  for (const double side : {-1.0, 1.0}) {
    const Vec3 mid = fc + side * half_other * other;
    const double d = line_segment_distance(initial.origin, initial.axis, mid - half_len * l, mid + half_len * l);
    if (side < 0 || d < best_d) {
      best_d = d;
      best_mid = mid;
    }
  }
  out.articulation.axis = UnitVec3::normalize(refined_axis);
  out.articulation.origin = best_mid + 0.5 * b.extents.z() * n;
  return out;
}

Mat3 rotation_about(const UnitVec3& axis, double angle) {
  const Vec3& k = axis.vec();
  Mat3 K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(angle) * K + (1 - std::cos(angle)) * K * K;
}

namespace {

double clamp_state(const Articulation& art, double state) {
  if (state < 0 || state > art.range) {
    const double c = std::clamp(state, 0.0, std::max(0.0, art.range));
    spdlog::warn("joint state {} outside [0, {}]; clamped to {}", state, art.range, c);
    return c;
  }
  return state;
}

}  // namespace

Se3Pose articulation_transform(const Articulation& art, double state) {
  const double s = clamp_state(art, state);
  Se3Pose t;
  if (art.type == JointType::kPrismatic) {
    t.translation = s * art.axis.vec();
    return t;
  }
  t.rotation = rotation_about(art.axis, s);
  t.translation = art.origin - t.rotation * art.origin;
  return t;
}

Vec3 apply_articulation(const Vec3& point, const Articulation& art, double state) {
  const double s = clamp_state(art, state);
  if (s == 0.0) return point;
  if (art.type == JointType::kPrismatic) return point + s * art.axis.vec();
  return rotation_about(art.axis, s) * (point - art.origin) + art.origin;
}

TriMesh transform_part(const TriMesh& mesh, const Articulation& art, double state) {
  const double s = clamp_state(art, state);
  TriMesh out = mesh;
  if (s == 0.0) return out;
  if (art.type == JointType::kPrismatic) {
    for (auto& v : out.vertices) v += s * art.axis.vec();
    return out;
  }
  const Mat3 r = rotation_about(art.axis, s);
  for (auto& v : out.vertices) v = r * (v - art.origin) + art.origin;
  return out;
}

}  // namespace openable
