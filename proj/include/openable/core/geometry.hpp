#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "openable/core/types.hpp"

namespace openable {

/// Contractual numeric tolerances. Defaults match the documented contract;
/// the pipeline config may override them.
struct Tolerances {
  double unit_norm = 1e-9;
  double orthogonality = 1e-6;
  double ray_epsilon = 1e-9;
  double parallel = 1e-9;
};

/// PCA box: axes are covariance eigenvectors ordered by projected extent
/// (descending), extents are max - min projections. Right-handed
/// (u3 = u1 × u2). Extents of a flat point set are floored at 1e-9.
/// Throws InvalidInput for fewer than 4 points or all-identical points.
Obb fit_obb(std::span<const Vec3> points);

struct RansacOptions {
  double thickness = 0.03;
  int iterations = 1000;
  std::uint64_t seed = 7;
  /// When set, reject candidates whose normal is more than this many degrees
  /// away from horizontal (the plane must be approximately vertical).
  std::optional<double> vertical_tol_deg;
};

struct PlaneFit {
  Plane plane;
  std::vector<int> inliers;  // ascending
  double rms = 0.0;
};

/// Vanilla RANSAC over point triples. Inliers are points with
/// |signed distance| ≤ thickness / 2; ties on inlier count go to the smaller
/// RMS inlier distance. Deterministic for a given seed.
/// Throws InvalidInput (< 3 points, thickness ≤ 0) or NoPlaneFound.
PlaneFit ransac_plane(std::span<const Vec3> points, const RansacOptions& opts);

struct RayHit {
  double distance = 0.0;
  int face = -1;
  double u = 0.0;  // barycentric weight of vertex 1
  double v = 0.0;  // barycentric weight of vertex 2
};

/// Möller–Trumbore ray/triangle test; nullopt when missing or t < min_t.
std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double min_t = 1e-9);

/// Nearest hit with distance ≥ 1e-9 over all faces, or nullopt.
std::optional<RayHit> raycast(const TriMesh& mesh, const Vec3& origin, const UnitVec3& direction);

/// Same as raycast but skips faces with skip[f] == true.
std::optional<RayHit> raycast(const TriMesh& mesh, const Vec3& origin, const UnitVec3& direction,
                              const std::vector<bool>& skip);

/// Minimal distance between two infinite lines.
double line_line_distance(const Vec3& o1, const UnitVec3& a1, const Vec3& o2, const UnitVec3& a2);

/// Distance between an infinite line and the segment [p, q].
double line_segment_distance(const Vec3& o, const UnitVec3& a, const Vec3& p, const Vec3& q);

double point_line_distance(const Vec3& p, const Vec3& o, const UnitVec3& a);

/// |⟨p − c, u_k⟩| ≤ s_k / 2 + margin for all k.
bool point_in_obb(const Vec3& p, const Obb& box, double margin);

/// Area of the 2D convex hull (monotone chain).
double convex_hull_area(std::vector<Vec2> pts);

/// Exit distance of the ray from inside the box; nullopt when origin is outside.
std::optional<double> ray_box_exit(const Obb& box, const Vec3& origin, const UnitVec3& dir);

/// Angle in radians between two directions, ignoring sign.
double axis_angle_unsigned(const Vec3& a, const Vec3& b);

/// Some unit vector orthogonal to a.
UnitVec3 any_orthogonal(const UnitVec3& a);

}  // namespace openable
