#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "openable/core/geometry.hpp"
#include "test_support.hpp"

using namespace openable;
using testsupport::random_rotation;

namespace {

std::vector<Vec3> cube_corners() {
  std::vector<Vec3> pts;
  for (int k = 0; k < 8; ++k) pts.emplace_back(k & 1, (k >> 1) & 1, (k >> 2) & 1);
  return pts;
}

Vec3 sorted_desc(Vec3 v) {
  std::sort(v.data(), v.data() + 3, std::greater<>());
  return v;
}

// Extents of the min-volume box over a grid of orientations, refined around the best.
Vec3 brute_force_extents(const std::vector<Vec3>& pts) {
  auto extents_for = [&](const Mat3& r) {
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (const auto& p : pts) {
      const Vec3 q = r.transpose() * p;
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
    return Vec3(hi - lo);
  };
  auto rot = [](double a, double b, double c) {
    return Mat3(Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitY()) *
                Eigen::AngleAxisd(c, Vec3::UnitX()));
  };
  double best_vol = 1e300;
  Vec3 best_angles = Vec3::Zero();
  Vec3 best_ext = Vec3::Zero();
  double step = 10.0 * std::numbers::pi / 180.0;
  Vec3 center = Vec3::Zero();
  double span = std::numbers::pi;
  for (int level = 0; level < 6; ++level) {
    for (double a = center.x() - span; a <= center.x() + span; a += step) {
      for (double b = center.y() - span / 2; b <= center.y() + span / 2; b += step) {
        for (double c = center.z() - span; c <= center.z() + span; c += step) {
          const Vec3 e = extents_for(rot(a, b, c));
          const double vol = e.prod();
          if (vol < best_vol) {
            best_vol = vol;
            best_angles = {a, b, c};
            best_ext = e;
          }
        }
      }
    }
    center = best_angles;
    span = 2 * step;
    step /= 4;
  }
  return sorted_desc(best_ext);
}

}  // namespace

TEST_CASE("fit_obb on the unit cube") {
  const auto pts = cube_corners();
  const Obb box = fit_obb(pts);
  CHECK((box.center - Vec3(0.5, 0.5, 0.5)).norm() < 1e-12);
  CHECK((box.extents - Vec3(1, 1, 1)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit_obb extents survive a 30 degree rotation") {
  const Mat3 r = Eigen::AngleAxisd(std::numbers::pi / 6, Vec3::UnitZ()).toRotationMatrix();
  std::vector<Vec3> pts;
  for (const auto& p : cube_corners()) pts.push_back(r * p);
  const Obb box = fit_obb(pts);
  CHECK((box.extents - Vec3(1, 1, 1)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fit_obb on a sampled plate matches a brute-force orientation search") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const Mat3 r = random_rotation(rng);
  const Vec3 t(0.3, -1.2, 0.8);
  std::vector<Vec3> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(r * Vec3(0.8 * u(rng), 0.4 * u(rng), 0.02 * u(rng)) + t);
  const Obb box = fit_obb(pts);
  const Vec3 oracle = brute_force_extents(pts);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(box.extents[k] - oracle[k]) <= 0.02 * oracle[k]);
  CHECK(std::abs(box.extents[0] - 0.8) < 0.02 * 0.8);
  CHECK(std::abs(box.extents[1] - 0.4) < 0.02 * 0.4);
}

TEST_CASE("fit_obb invariants: containment, ordering, right-handedness, rigid invariance") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(testsupport::random_point(rng, 1.0).cwiseProduct(Vec3(1.0, 0.5, 0.2)));
    const Obb a = fit_obb(pts);
    CHECK(a.extents[0] >= a.extents[1]);
    CHECK(a.extents[1] >= a.extents[2]);
    CHECK(a.extents[2] > 0);
    CHECK(std::abs(a.axes[0].dot(a.axes[1])) < 1e-6);
    CHECK(a.axes[0].vec().cross(a.axes[1].vec()).dot(a.axes[2].vec()) > 1 - 1e-9);
    for (const auto& p : pts) CHECK(point_in_obb(p, a, 1e-9));

    const Mat3 r = random_rotation(rng);
    const Vec3 t = testsupport::random_point(rng, 3.0);
    std::vector<Vec3> moved;
    for (const auto& p : pts) moved.push_back(r * p + t);
    const Obb b = fit_obb(moved);
    CHECK((a.extents - b.extents).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fit_obb rejects degenerate input") {
  std::vector<Vec3> three{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(fit_obb(three), InvalidInput);
  std::vector<Vec3> same(10, Vec3(1, 2, 3));
  CHECK_THROWS_AS(fit_obb(same), InvalidInput);
}

TEST_CASE("ransac_plane finds an exact horizontal plane") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 100; ++i) pts.emplace_back(u(rng), u(rng), 0.0);
  RansacOptions o;
  o.thickness = 0.01;
  const PlaneFit fit = ransac_plane(pts, o);
  CHECK(fit.inliers.size() == 100);
  CHECK(std::abs(std::abs(fit.plane.normal[2]) - 1.0) < 1e-12);
}

TEST_CASE("ransac_plane with verticality constraint and outliers") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> pts;
  for (int i = 0; i < 90; ++i) pts.emplace_back(1.0, u(rng), u(rng));
  for (int i = 0; i < 10; ++i) pts.emplace_back(u(rng) * 3, u(rng) * 3, u(rng) * 3);
  RansacOptions o;
  o.thickness = 0.01;
  o.vertical_tol_deg = 15.0;
  const PlaneFit fit = ransac_plane(pts, o);
  CHECK(fit.inliers.size() >= 90);
  CHECK(axis_angle_unsigned(fit.plane.normal, Vec3::UnitX()) < std::numbers::pi / 180.0);

  // exhaustive oracle over triples of the 90 planar points: nothing beats the fit
  std::size_t best = 0;
  for (int i = 0; i < 90; i += 7) {
    for (int j = i + 1; j < 90; j += 5) {
      for (int k = j + 1; k < 90; k += 3) {
        const Vec3 n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (n.norm() < 1e-9) continue;
        const Vec3 nn = n.normalized();
        std::size_t c = 0;
        for (const auto& p : pts) c += std::abs(nn.dot(p - pts[i])) <= 0.005;
        best = std::max(best, c);
      }
    }
  }
  CHECK(fit.inliers.size() >= best);
}

TEST_CASE("ransac_plane rejects a horizontal plane under a verticality constraint") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) pts.emplace_back(i * 0.1, j * 0.1, 0.0);
  }
  RansacOptions o;
  o.vertical_tol_deg = 15.0;
  CHECK_THROWS_AS(ransac_plane(pts, o), NoPlaneFound);
}

TEST_CASE("ransac_plane is reproducible for a fixed seed") {
  std::mt19937_64 rng(3);
  std::vector<Vec3> pts;
  for (int i = 0; i < 300; ++i) pts.push_back(testsupport::random_point(rng, 1.0));
  RansacOptions o;
  o.thickness = 0.2;
  o.seed = 99;
  const PlaneFit a = ransac_plane(pts, o);
  const PlaneFit b = ransac_plane(pts, o);
  CHECK(a.inliers == b.inliers);
  CHECK(a.plane.offset == b.plane.offset);
  CHECK(a.plane.normal.vec() == b.plane.normal.vec());
}

TEST_CASE("ransac_plane input validation") {
  std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(ransac_plane(two, {}), InvalidInput);
  std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  RansacOptions o;
  o.thickness = 0.0;
  CHECK_THROWS_AS(ransac_plane(pts, o), InvalidInput);
}

TEST_CASE("raycast analytic cases") {
  TriMesh tri;
  tri.vertices = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1}};
  tri.faces = {{0, 1, 2}};
  const Vec3 centroid(1.0 / 3, 1.0 / 3, 1.0);
  const auto hit = raycast(tri, Vec3::Zero(), UnitVec3::normalize(centroid));
  REQUIRE(hit);
  CHECK(std::abs(hit->distance - centroid.norm()) < 1e-12);
  const auto straight = raycast(tri, Vec3(0.2, 0.2, 0), UnitVec3::z());
  REQUIRE(straight);
  CHECK(std::abs(straight->distance - 1.0) < 1e-12);
  CHECK_FALSE(raycast(tri, Vec3(0, 0, 0.5), UnitVec3::x()));
  CHECK_FALSE(raycast(tri, Vec3(0.2, 0.2, 1.0), UnitVec3::z()));  // distance 0 is ignored
}

TEST_CASE("raycast into a cabinet interior reports the known depth") {
  // open-front cabinet: back panel at y = 0, sides; the ray starts at the front plane y = 0.45
  TriMesh cab = testsupport::grid_mesh({0, 0, 0}, {0.8, 0, 0}, {0, 0, 0.9}, 60, 60);
  cab.append(testsupport::grid_mesh({0, 0, 0}, {0, 0.45, 0}, {0, 0, 0.9}, 30, 30));
  cab.append(testsupport::grid_mesh({0.8, 0, 0}, {0, 0.45, 0}, {0, 0, 0.9}, 30, 30));
  CHECK(cab.face_count() > 9000);
  const auto hit = raycast(cab, Vec3(0.4, 0.45, 0.45), UnitVec3::normalize(Vec3(0, -1, 0)));
  REQUIRE(hit);
  CHECK(std::abs(hit->distance - 0.45) < 1e-6);
}

TEST_CASE("raycast is covariant under rigid transforms") {
  std::mt19937_64 rng(8);
  TriMesh m = testsupport::box_mesh({-1, -1, -1}, {1, 2, 0.5});
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 o = testsupport::random_point(rng, 0.3);
    const UnitVec3 d = UnitVec3::normalize(testsupport::random_unit(rng));
    const auto h0 = raycast(m, o, d);
    const Mat3 r = random_rotation(rng);
    const Vec3 t = testsupport::random_point(rng, 5);
    TriMesh moved = m;
    for (auto& v : moved.vertices) v = r * v + t;
    const auto h1 = raycast(moved, r * o + t, UnitVec3::normalize(r * d.vec()));
    REQUIRE(h0);
    REQUIRE(h1);
    CHECK(std::abs(h0->distance - h1->distance) < 1e-9);
  }
}

TEST_CASE("line_line_distance analytic and properties") {
  CHECK(line_line_distance(Vec3::Zero(), UnitVec3::z(), Vec3::Zero(), UnitVec3::z()) == doctest::Approx(0.0));
  CHECK(line_line_distance(Vec3::Zero(), UnitVec3::z(), Vec3(0.3, 0.4, 0), UnitVec3::z()) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(line_line_distance(Vec3::Zero(), UnitVec3::x(), Vec3(0, 0, 2), UnitVec3::y()) ==
        doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Vec3 o1 = testsupport::random_point(rng, 2), o2 = testsupport::random_point(rng, 2);
    const UnitVec3 a1 = UnitVec3::normalize(testsupport::random_unit(rng));
    const UnitVec3 a2 = UnitVec3::normalize(testsupport::random_unit(rng));
    const double d = line_line_distance(o1, a1, o2, a2);
    CHECK(std::abs(d - line_line_distance(o2, a2, o1, a1)) < 1e-9);
    CHECK(std::abs(d - line_line_distance(o1 + 1.7 * a1.vec(), a1, o2 - 0.6 * a2.vec(), a2)) < 1e-9);
    // brute-force minimum over a parameter grid never beats the closed form
    double brute = 1e300;
    for (double s = -6; s <= 6; s += 0.05) {
      const Vec3 p = o1 + s * a1.vec();
      brute = std::min(brute, point_line_distance(p, o2, a2));
    }
    CHECK(d <= brute + 1e-9);
  }
}

TEST_CASE("line_segment_distance against dense sampling") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Vec3 o = testsupport::random_point(rng, 1);
    const UnitVec3 a = UnitVec3::normalize(testsupport::random_unit(rng));
    const Vec3 p = testsupport::random_point(rng, 1), q = testsupport::random_point(rng, 1);
    double brute = 1e300;
    for (int k = 0; k <= 2000; ++k) brute = std::min(brute, point_line_distance(p + (k / 2000.0) * (q - p), o, a));
    const double d = line_segment_distance(o, a, p, q);
    CHECK(d <= brute + 1e-12);
    CHECK(d >= brute - 1e-3);
  }
}

TEST_CASE("point_in_obb examples and inverse-transform oracle") {
  std::mt19937_64 rng(10);
  Obb box;
  const Mat3 r = random_rotation(rng);
  box.axes = {UnitVec3::normalize(r.col(0)), UnitVec3::normalize(r.col(1)), UnitVec3::normalize(r.col(2))};
  box.center = Vec3(1, 2, 3);
  box.extents = Vec3(1.0, 0.6, 0.2);
  const double margin = 0.01;
  CHECK(point_in_obb(box.center, box, margin));
  CHECK_FALSE(point_in_obb(box.center + (0.5 + 2 * margin) * box.axes[0].vec(), box, margin));
  const Se3Pose to_world{r, box.center};
  for (int i = 0; i < 10000; ++i) {
    const Vec3 p = box.center + testsupport::random_point(rng, 0.6);
    const Vec3 l = to_world.apply_inverse(p);
    const bool oracle = std::abs(l.x()) <= 0.5 + margin && std::abs(l.y()) <= 0.3 + margin &&
                        std::abs(l.z()) <= 0.1 + margin;
    CHECK(point_in_obb(p, box, margin) == oracle);
  }
}

TEST_CASE("ray_box_exit matches a slab-method oracle on rotated boxes") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const Mat3 r = random_rotation(rng);
    Obb box;
    box.axes = {UnitVec3::normalize(r.col(0)), UnitVec3::normalize(r.col(1)), UnitVec3::normalize(r.col(2))};
    box.center = testsupport::random_point(rng, 3);
    box.extents = Vec3(4, 3, 2);
    const Vec3 o = box.center + r * testsupport::random_point(rng, 0.9).cwiseProduct(Vec3(2, 1.5, 1));
    const UnitVec3 d = UnitVec3::normalize(testsupport::random_unit(rng));
    // slab oracle in world coordinates: far intersection of the three slabs
    double t_far = 1e300;
    for (int k = 0; k < 3; ++k) {
      const Vec3 n = r.col(k);
      const double denom = n.dot(d.vec());
      if (std::abs(denom) < 1e-15) continue;
      const double t1 = (n.dot(box.center - o) + box.extents[k] / 2) / denom;
      const double t2 = (n.dot(box.center - o) - box.extents[k] / 2) / denom;
      t_far = std::min(t_far, std::max(t1, t2));
    }
    const auto exit = ray_box_exit(box, o, d);
    REQUIRE(exit);
    CHECK(std::abs(*exit - t_far) < 1e-9);
  }
}

TEST_CASE("convex_hull_area") {
  std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.7}};
  CHECK(convex_hull_area(square) == doctest::Approx(1.0));
  std::vector<Vec2> line{{0, 0}, {1, 1}, {2, 2}};
  CHECK(convex_hull_area(line) == doctest::Approx(0.0));
}

TEST_CASE("Se3Pose validation and algebra") {
  std::mt19937_64 rng(13);
  const Se3Pose p{random_rotation(rng), Vec3(1, 2, 3)};
  const Se3Pose q = Se3Pose::from_matrix(p.matrix());
  CHECK((q.matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  const Vec3 x(0.3, -0.2, 0.9);
  CHECK((p.inverse().apply(p.apply(x)) - x).norm() < 1e-12);
  Mat4 bad = p.matrix();
  bad(0, 0) += 0.01;
  CHECK_THROWS_AS(Se3Pose::from_matrix(bad, 1e-4), InvalidInput);
  const Se3Pose cam = Se3Pose::look_at(Vec3(0, -2, 1), Vec3(0, 0, 1));
  CHECK((cam.rotation.col(2) - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK(cam.rotation.col(1).z() < 0);  // image y points down
  CHECK(cam.orthonormality_error() < 1e-12);
}

TEST_CASE("UnitVec3 rejects zero vectors") {
  CHECK_THROWS_AS(UnitVec3::normalize(Vec3::Zero()), InvalidInput);
  CHECK(std::abs(UnitVec3::normalize(Vec3(3, 4, 0)).vec().norm() - 1.0) < 1e-15);
}

TEST_CASE("TriMesh validation and sub-mesh extraction") {
  TriMesh m = testsupport::box_mesh({0, 0, 0}, {1, 1, 1});
  CHECK_NOTHROW(m.validate());
  TriMesh bad = m;
  bad.faces.push_back({0, 0, 1});
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = m;
  bad.faces.push_back({0, 1, 8});
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  const SubMesh s = extract_faces(m, {0, 1});
  CHECK(s.mesh.face_count() == 2);
  CHECK(s.mesh.vertex_count() == 4);
  for (std::size_t i = 0; i < s.source_vertices.size(); ++i) {
    CHECK(s.mesh.vertices[i] == m.vertices[s.source_vertices[i]]);
  }
  std::vector<bool> keep(8, true);
  keep[0] = false;
  const SubMesh f = filter_vertices(m, keep);
  CHECK(f.mesh.vertex_count() == 7);
  for (const auto& t : f.mesh.faces) {
    for (int v : t) CHECK(f.source_vertices[v] != 0);
  }
}

TEST_CASE("raycast through shared grid vertices and edges never slips between faces") {
  int misses = 0;
  for (int n = 2; n < 40; ++n) {
    const TriMesh g = testsupport::grid_mesh({-0.3, 0.2, -0.3}, {0.6, 0, 0}, {0, 0, 0.6}, n, n);
    for (int i = 1; i < n; ++i) {
      for (int j = 1; j < n; ++j) {
        const Vec3 o(-0.3 + 0.6 * i / n, 0.0, -0.3 + 0.6 * j / n);
        const auto hit = raycast(g, o, UnitVec3::y());
        if (!hit) ++misses;
        else CHECK(std::abs(hit->distance - 0.2) < 1e-12);
        const Vec3 e(-0.3 + 0.6 * (i + 0.5) / n, 0.0, -0.3 + 0.6 * j / n);  // on an edge
        if (!raycast(g, e, UnitVec3::y())) ++misses;
      }
    }
  }
  CHECK(misses == 0);
}
