#include "openable/part/extract.hpp"

#include <spdlog/spdlog.h>

#include "openable/core/geometry.hpp"
#include "openable/core/json_util.hpp"

namespace openable {

double contour_area(const std::vector<Vec3>& points, const Plane& plane) {
  const Vec3 e1 = any_orthogonal(plane.normal).vec();
  const Vec3 e2 = plane.normal.vec().cross(e1);
  std::vector<Vec2> flat;
  flat.reserve(points.size());
  for (const auto& p : points) flat.emplace_back(p.dot(e1), p.dot(e2));
  return convex_hull_area(std::move(flat));
}

std::optional<PartCandidate> extract_part(const FusedInstance& instance, const TriMesh& mesh,
                                          const std::vector<CalibratedFrame>& frames,
                                          const PartExtractOptions& opts, std::string* why) {
  const auto reject = [&](const std::string& reason) -> std::optional<PartCandidate> {
    spdlog::info("instance {} rejected: {}", instance.instance_id, reason);
    if (why) *why = reason;
    return std::nullopt;
  };
  if (instance.views.empty()) return reject("no supporting view");
  const CalibratedFrame* view = find_frame(frames, instance.views.front().frame_id);
  if (!view) return reject("supporting frame " + instance.views.front().frame_id + " not found");

  const SubMesh sub = extract_faces(mesh, instance.faces);
  std::vector<int> remaining(sub.mesh.vertex_count());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);

  RansacOptions ro;
  ro.thickness = opts.thickness;
  ro.iterations = opts.ransac_iterations;
  ro.seed = opts.ransac_seed;
  ro.vertical_tol_deg = opts.vertical_tol_deg;

  std::optional<Plane> best;
  double best_area = -1.0;
  for (int k = 0; k < opts.n_planes && remaining.size() >= 3; ++k) {
    std::vector<Vec3> pts;
    pts.reserve(remaining.size());
    for (int i : remaining) pts.push_back(sub.mesh.vertices[i]);
    PlaneFit fit;
    try {
      fit = ransac_plane(pts, ro);
    } catch (const NoPlaneFound&) {
      break;
    }
    std::vector<Vec3> inl;
    inl.reserve(fit.inliers.size());
    for (int i : fit.inliers) inl.push_back(pts[i]);
    const double area = contour_area(inl, fit.plane);
    if (area > best_area) {
      best_area = area;
      best = fit.plane;
    }
    std::vector<int> next;
    std::size_t j = 0;
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (j < fit.inliers.size() && fit.inliers[j] == static_cast<int>(i)) {
        ++j;
      } else {
        next.push_back(remaining[i]);
      }
    }
    remaining.swap(next);
  }
  if (!best) return reject("no vertical plane found");

  Plane plane = *best;
  if (plane.normal.dot(view->view_direction()) < 0) plane = plane.flipped();

  std::vector<bool> keep(sub.mesh.vertex_count());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    keep[i] = plane.signed_distance(sub.mesh.vertices[i]) <= opts.thickness / 2;
  }
  const SubMesh clipped = filter_vertices(sub.mesh, keep);
  if (static_cast<int>(clipped.mesh.face_count()) < opts.min_part_faces) {
    return reject("only " + std::to_string(clipped.mesh.face_count()) + " faces left after clipping");
  }

  PartCandidate c;
  c.instance_id = instance.instance_id;
  c.part_mesh = clipped.mesh;
  c.front_plane = plane;
  c.views = instance.views;
  for (int v : clipped.source_vertices) c.source_vertices.push_back(sub.source_vertices[v]);
  for (int f : clipped.source_faces) c.source_faces.push_back(sub.source_faces[f]);
  return c;
}

void write_rejections(const std::filesystem::path& path, const std::vector<Rejection>& rejected) {
  Json arr = Json::array();
  for (const auto& r : rejected) {
    arr.push_back({{"instance_id", r.instance_id}, {"stage", r.stage}, {"reason", r.reason}});
  }
  write_json_file(path, Json{{"rejected", arr}});
}

}  // namespace openable
