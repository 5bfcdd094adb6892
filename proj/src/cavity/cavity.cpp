#include "openable/cavity/cavity.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "openable/core/geometry.hpp"
#include "openable/lift/mask_ops.hpp"

namespace openable {

std::string_view to_string(DepthSource s) {
  switch (s) {
    case DepthSource::kImage: return "image";
    case DepthSource::kHit: return "hit";
    case DepthSource::kMesh: return "mesh";
  }
  return "mesh";
}

DepthSource depth_source_from_string(std::string_view s) {
  if (s == "image") return DepthSource::kImage;
  if (s == "hit") return DepthSource::kHit;
  if (s == "mesh") return DepthSource::kMesh;
  throw InvalidInput("unknown depth source '" + std::string(s) + "'");
}

std::optional<double> depth_image_bound(const ValidatedPart& part, const CalibratedFrame& frame,
                                        const Mask& mask, int ring_px) {
  const auto box = bounding_box(mask);
  if (!box || frame.depth.width() != mask.width() || frame.depth.height() != mask.height()) {
    return std::nullopt;
  }
  const int x0 = std::max(0, box->x0 - ring_px), x1 = std::min(mask.width() - 1, box->x1 + ring_px);
  const int y0 = std::max(0, box->y0 - ring_px), y1 = std::min(mask.height() - 1, box->y1 + ring_px);
  const Vec3 c = front_center(part.obb, part.front_normal);
  std::optional<double> best;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double z = frame.depth.at(x, y);
      if (mask.at(x, y) || !(z > 0)) continue;
      const Vec3 p = frame.pose.apply(z * frame.intrinsics.pixel_ray(x, y));
      const double d = part.front_normal.dot(p - c);
      if (d > 0 && (!best || d > *best)) best = d;
    }
  }
  return best;
}

std::optional<double> depth_hit_bound(const ValidatedPart& part, const TriMesh& scene,
                                      const std::vector<bool>& skip, const CavityOptions& opts) {
  // hits inside the part's own slab are hidden part geometry, not the cavity
  std::vector<bool> ignore = skip;
  ignore.resize(scene.face_count(), false);
  const double slab = 0.5 * part.obb.extents.z() + 1e-6;
  auto hit = raycast(scene, part.obb.center, part.front_normal, ignore);
  while (hit && hit->distance <= slab) {
    ignore[hit->face] = true;
    hit = raycast(scene, part.obb.center, part.front_normal, ignore);
  }
  if (!hit) return std::nullopt;
  const Vec3 p = part.obb.center + hit->distance * part.front_normal.vec();
  std::vector<bool> used(scene.vertex_count(), false);
  for (std::size_t f = 0; f < scene.face_count(); ++f) {
    if (skip.empty() || !skip[f]) {
      for (int v : scene.faces[f]) used[v] = true;
    }
  }
  std::vector<Vec3> near;
  for (std::size_t v = 0; v < scene.vertex_count(); ++v) {
    if (used[v] && (scene.vertices[v] - p).norm() <= opts.r_fit) near.push_back(scene.vertices[v]);
  }
  if (static_cast<int>(near.size()) < std::max(3, opts.min_fit_points)) return std::nullopt;
  RansacOptions ro;
  ro.thickness = opts.fit_thickness;
  ro.iterations = opts.fit_iterations;
  ro.seed = opts.fit_seed;
  try {
    const PlaneFit fit = ransac_plane(near, ro);
    if (static_cast<double>(fit.inliers.size()) < opts.min_inlier_fraction * near.size()) return std::nullopt;
  } catch (const NoPlaneFound&) {
    return std::nullopt;
  }
  return hit->distance - 0.5 * part.obb.extents.z();
}

Obb mesh_bounds(const TriMesh& mesh) {
  if (mesh.vertices.empty()) throw InvalidInput("bounds of an empty mesh");
  Vec3 lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return Obb::axis_aligned(lo, hi);
}

double depth_mesh_bound(const ValidatedPart& part, const Obb& scene_bounds) {
  const Vec3 c = front_center(part.obb, part.front_normal);
  const auto exit = ray_box_exit(scene_bounds, c, part.front_normal);
  if (!exit || *exit < 0.01) {
    spdlog::warn("front face of {} is outside or on the scene bounds; using the 0.01 m floor",
                 part.candidate.instance_id);
    return 0.01;
  }
  return *exit;
}

InnerBox build_inner_box(const ValidatedPart& part, std::optional<double> d_image,
                         std::optional<double> d_hit, double d_mesh, const CavityOptions& opts) {
  InnerBox box;
  box.depth = d_mesh;
  box.source = DepthSource::kMesh;
  if (d_hit && *d_hit < box.depth) {
    box.depth = *d_hit;
    box.source = DepthSource::kHit;
  }
  if (d_image && *d_image < box.depth) {
    box.depth = *d_image;
    box.source = DepthSource::kImage;
  }
  if (opts.max_depth) box.depth = std::min(box.depth, *opts.max_depth);
  box.depth = std::max(box.depth, opts.d_min);

  const Obb& b = part.obb;
  const Vec3 n = part.front_normal.vec();
  const Vec3 u = b.axes[0].vec(), v = b.axes[1].vec();
  const Vec3 fc = front_center(b, part.front_normal);
  const double hu = 0.5 * b.extents.x(), hv = 0.5 * b.extents.y();
  // back wall clears the part's own thickness by the wall margin
  const double back = std::max(box.depth, b.extents.z() + opts.wall_margin);
  TriMesh& m = box.mesh;
  for (const double d : {0.0, back}) {
    for (const auto& [su, sv] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
      m.vertices.push_back(fc + d * n + su * hu * u + sv * hv * v);
    }
  }
  // 0-3 front ring, 4-7 back ring; every face is wound to face the interior
  std::vector<Face> faces{{4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4}, {1, 2, 6},
                          {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  const Vec3 inside = fc + 0.5 * back * n;
  for (auto& f : faces) {
    const Vec3 nf = (m.vertices[f[1]] - m.vertices[f[0]]).cross(m.vertices[f[2]] - m.vertices[f[0]]);
    if (nf.dot(inside - m.vertices[f[0]]) < 0) std::swap(f[1], f[2]);
  }
  m.faces = std::move(faces);
  m.colors.assign(m.vertices.size(), opts.color);
  return box;
}

}  // namespace openable
