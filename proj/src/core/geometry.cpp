#include "openable/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

namespace openable {

namespace {

// Flip so the largest-magnitude component is positive; makes PCA axes reproducible.
Vec3 canonical_sign(const Vec3& v) {
  int k = 0;
  v.cwiseAbs().maxCoeff(&k);
  return v[k] < 0 ? Vec3(-v) : v;
}

constexpr double kMinExtent = 1e-9;

double extent_along(std::span<const Vec3> points, const Vec3& dir) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : points) {
    const double t = dir.dot(p);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  return hi - lo;
}

// In-plane angle of the basis (a, b) minimizing the product of the two
// projected extents; returns the rotated pair.
std::pair<Vec3, Vec3> best_in_plane(std::span<const Vec3> points, const Vec3& a, const Vec3& b) {
  auto area = [&](double t) {
    const Vec3 d1 = std::cos(t) * a + std::sin(t) * b;
    const Vec3 d2 = -std::sin(t) * a + std::cos(t) * b;
    return extent_along(points, d1) * extent_along(points, d2);
  };
  constexpr int kSteps = 90;
  const double step = std::numbers::pi / 2 / kSteps;
  int best = 0;
  double best_area = area(0.0);
  for (int i = 1; i < kSteps; ++i) {
    const double v = area(i * step);
    if (v < best_area - 1e-15) {
      best_area = v;
      best = i;
    }
  }
  // golden-section refinement inside the neighbouring grid cells
  double lo = (best - 1) * step, hi = (best + 1) * step;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = area(x1), f2 = area(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = area(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = area(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  if (best_area <= area(t)) t = best * step;
  return {std::cos(t) * a + std::sin(t) * b, -std::sin(t) * a + std::cos(t) * b};
}

// Covariance eigenvectors are arbitrary inside a repeated eigenspace (a cube,
// a square plate). There the axes are chosen by a minimum-volume search
// restricted to that eigenspace so the box still hugs the points.
Mat3 resolve_degenerate_axes(std::span<const Vec3> points, const Vec3& values, const Mat3& vecs) {
  const double scale = std::max(values[2], 1e-300);
  const bool low_pair = values[1] - values[0] < 1e-9 * scale;
  const bool high_pair = values[2] - values[1] < 1e-9 * scale;
  if (!low_pair && !high_pair) return vecs;
  Mat3 out = vecs;
  if (low_pair != high_pair) {
    const int fixed = low_pair ? 2 : 0;
    const int a = low_pair ? 0 : 1;
    const int b = low_pair ? 1 : 2;
    const auto [d1, d2] = best_in_plane(points, vecs.col(a), vecs.col(b));
    out.col(a) = d1;
    out.col(b) = d2;
    out.col(fixed) = vecs.col(fixed);
    return out;
  }
  // isotropic: try directions between a bounded, deterministic subset of points
  const std::size_t n = points.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 32);
  double best_volume = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; i += stride) {
    for (std::size_t j = i + stride; j < n; j += stride) {
      const Vec3 d = points[j] - points[i];
      if (d.norm() < 1e-12) continue;
      const Vec3 u = d.normalized();
      const Vec3 helper = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 a = u.cross(helper).normalized();
      const Vec3 b = u.cross(a);
      const auto [d1, d2] = best_in_plane(points, a, b);
      const double volume = extent_along(points, u) * extent_along(points, d1) * extent_along(points, d2);
      if (volume < best_volume - 1e-15) {
        best_volume = volume;
        out.col(0) = u;
        out.col(1) = d1;
        out.col(2) = d2;
      }
    }
  }
  return out;
}

}  // namespace

Obb fit_obb(std::span<const Vec3> points) {
  if (points.size() < 4) {
    throw InvalidInput("fit_obb needs at least 4 points, got " + std::to_string(points.size()));
  }
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());

  Mat3 cov = Mat3::Zero();
  double spread = 0.0;
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
    spread = std::max(spread, d.norm());
  }
  if (spread < 1e-12) throw InvalidInput("fit_obb: all points are identical");
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  const Mat3 vecs = resolve_degenerate_axes(points, solver.eigenvalues(), solver.eigenvectors());

  struct Axis {
    Vec3 dir;
    double lo, hi;
  };
  std::array<Axis, 3> axes;
  for (int k = 0; k < 3; ++k) {
    axes[k].dir = canonical_sign(vecs.col(k).normalized());
    axes[k].lo = std::numeric_limits<double>::infinity();
    axes[k].hi = -std::numeric_limits<double>::infinity();
  }
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    for (auto& a : axes) {
      const double t = a.dir.dot(d);
      a.lo = std::min(a.lo, t);
      a.hi = std::max(a.hi, t);
    }
  }
  std::stable_sort(axes.begin(), axes.end(),
                   [](const Axis& a, const Axis& b) { return a.hi - a.lo > b.hi - b.lo; });

  Obb box;
  box.center = mean;
  for (int k = 0; k < 3; ++k) {
    box.axes[k] = UnitVec3::normalize(axes[k].dir);
    box.extents[k] = std::max(axes[k].hi - axes[k].lo, kMinExtent);
    box.center += 0.5 * (axes[k].hi + axes[k].lo) * axes[k].dir;
  }
  const Vec3 u3 = box.axes[0].vec().cross(box.axes[1].vec());
  box.axes[2] = UnitVec3::normalize(u3);
  return box;
}

PlaneFit ransac_plane(std::span<const Vec3> points, const RansacOptions& opts) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw InvalidInput("ransac_plane needs at least 3 points");
  if (!(opts.thickness > 0)) throw InvalidInput("ransac_plane thickness must be positive");

  const double half = opts.thickness / 2;
  const double max_vertical_nz =
      opts.vertical_tol_deg
          ? std::sin(*opts.vertical_tol_deg * std::numbers::pi / 180.0)
          : std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> pick(0, n - 1);

  bool found = false;
  PlaneFit best;
  std::size_t best_count = 0;
  std::vector<int> scratch;
  scratch.reserve(points.size());

  for (int it = 0; it < opts.iterations; ++it) {
    const int i = pick(rng);
    int j = pick(rng);
    int k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const Vec3 cr = (points[j] - points[i]).cross(points[k] - points[i]);
    const double len = cr.norm();
    if (len < 1e-12) continue;
    const Vec3 normal = cr / len;
    if (std::abs(normal.z()) > max_vertical_nz) continue;
    const double offset = normal.dot(points[i]);

    scratch.clear();
    double sq = 0.0;
    for (int p = 0; p < n; ++p) {
      const double d = normal.dot(points[p]) - offset;
      if (std::abs(d) <= half) {
        scratch.push_back(p);
        sq += d * d;
      }
    }
    const double rms = std::sqrt(sq / static_cast<double>(scratch.size()));
    if (!found || scratch.size() > best_count || (scratch.size() == best_count && rms < best.rms)) {
      found = true;
      best_count = scratch.size();
      best.plane = Plane{UnitVec3::normalize(normal), offset, opts.thickness};
      best.inliers = scratch;
      best.rms = rms;
    }
  }
  if (!found) throw NoPlaneFound("ransac_plane: no candidate plane satisfied the constraints");
  return best;
}

std::optional<RayHit> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double min_t) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-15) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  // a hair of slack so rays through shared vertices and edges cannot slip between faces
  constexpr double kEdge = 1e-12;
  if (u < -kEdge || u > 1.0 + kEdge) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < -kEdge || u + v > 1.0 + kEdge) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < min_t) return std::nullopt;
  return RayHit{t, -1, u, v};
}

std::optional<RayHit> raycast(const TriMesh& mesh, const Vec3& origin, const UnitVec3& direction,
                              const std::vector<bool>& skip) {
  std::optional<RayHit> best;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!skip.empty() && skip[f]) continue;
    const auto& t = mesh.faces[f];
    auto hit = intersect_triangle(origin, direction.vec(), mesh.vertices[t[0]],
                                  mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (hit && (!best || hit->distance < best->distance)) {
      hit->face = static_cast<int>(f);
      best = hit;
    }
  }
  return best;
}

std::optional<RayHit> raycast(const TriMesh& mesh, const Vec3& origin, const UnitVec3& direction) {
  return raycast(mesh, origin, direction, {});
}

double point_line_distance(const Vec3& p, const Vec3& o, const UnitVec3& a) {
  const Vec3 d = p - o;
  return (d - a.dot(d) * a.vec()).norm();
}

double line_line_distance(const Vec3& o1, const UnitVec3& a1, const Vec3& o2,
                          const UnitVec3& a2) {
  if (std::abs(a1.dot(a2)) > 1.0 - 1e-9) return point_line_distance(o2, o1, a1);
  const Vec3 n = a1.vec().cross(a2.vec());
  return std::abs((o2 - o1).dot(n)) / n.norm();
}

double line_segment_distance(const Vec3& o, const UnitVec3& a, const Vec3& p, const Vec3& q) {
  // distance from the line to p + t (q - p) is convex in t, so clamping the
  // unconstrained minimizer to [0, 1] gives the segment optimum
  const Vec3 w0 = p - o;
  const Vec3 d = q - p;
  const Vec3 pw = w0 - a.dot(w0) * a.vec();
  const Vec3 pd = d - a.dot(d) * a.vec();
  const double dd = pd.squaredNorm();
  double t = 0.0;
  if (dd > 1e-18) t = std::clamp(-pw.dot(pd) / dd, 0.0, 1.0);
  return (pw + t * pd).norm();
}

bool point_in_obb(const Vec3& p, const Obb& box, double margin) {
  const Vec3 d = p - box.center;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(box.axes[k].dot(d)) > box.extents[k] / 2 + margin) return false;
  }
  return true;
}

double convex_hull_area(std::vector<Vec2> pts) {
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(area) / 2;
}

std::optional<double> ray_box_exit(const Obb& box, const Vec3& origin, const UnitVec3& dir) {
  const Vec3 local = box.to_local(origin);
  const Vec3 ld(box.axes[0].dot(dir.vec()), box.axes[1].dot(dir.vec()), box.axes[2].dot(dir.vec()));
  double exit = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double half = box.extents[k] / 2;
    if (std::abs(local[k]) > half + 1e-12) return std::nullopt;
    if (std::abs(ld[k]) < 1e-15) continue;
    const double bound = ld[k] > 0 ? half : -half;
    exit = std::min(exit, (bound - local[k]) / ld[k]);
  }
  return std::max(exit, 0.0);
}

double axis_angle_unsigned(const Vec3& a, const Vec3& b) {
  // atan2 form stays accurate near 0 where acos loses half the digits
  const Vec3 an = a.normalized();
  const Vec3 bn = b.normalized();
  return std::atan2(an.cross(bn).norm(), std::abs(an.dot(bn)));
}

UnitVec3 any_orthogonal(const UnitVec3& a) {
  const Vec3 helper = std::abs(a[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return UnitVec3::normalize(a.vec().cross(helper));
}

}  // namespace openable
