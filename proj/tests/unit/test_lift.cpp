#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "openable/core/geometry.hpp"
#include "openable/ingest/synthetic.hpp"
#include "openable/lift/fuse.hpp"
#include "openable/lift/louvain.hpp"
#include "openable/lift/mask_ops.hpp"
#include "openable/lift/rasterize.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace openable;
using testsupport::cast_pixel;

namespace {

const Intrinsics kIntr{40.0, 40.0, 16.0, 12.0, 32, 24};

FurnitureUnit drawers(int count) {
  FurnitureUnit u;
  u.type = UnitType::kDrawerStack;
  u.wall = 0;
  u.offset = 1.0;
  u.count = count;
  u.width = 0.8;
  u.height = 0.55;
  u.depth = 0.5;
  return u;
}

double brute_modularity(const WeightedGraph& g, const std::vector<int>& labels) {
  const int n = g.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (const auto& e : g.adj[i]) a(i, e.to) = e.weight;
  }
  const Eigen::VectorXd k = a.rowwise().sum();
  const double two_m = k.sum();
  double q = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) q += a(i, j) - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

}  // namespace

TEST_CASE("rasterizer: single triangle coverage") {
  TriMesh m;
  m.vertices = {{-1, -1, 2}, {1, -1, 2}, {-1, 1, 2}};
  m.faces = {{0, 1, 2}};
  const auto vis = rasterize_view(m, Se3Pose{}, kIntr, "t");
  int covered = 0;
  for (int v = 0; v < kIntr.height; ++v) {
    for (int u = 0; u < kIntr.width; ++u) {
      const Vec3 p = 2.0 * kIntr.pixel_ray(u, v);
      // inside iff x ≥ -1, y ≥ -1, x + y ≤ 0
      const bool inside = p.x() >= -1 && p.y() >= -1 && p.x() + p.y() <= 0;
      CHECK((vis.face.at(u, v) == 0) == inside);
      if (inside) CHECK(vis.depth.at(u, v) == doctest::Approx(2.0).epsilon(1e-12));
      else CHECK(vis.depth.at(u, v) == 0.0);
      covered += inside;
    }
  }
  CHECK(covered > 100);
}

TEST_CASE("rasterizer: z-buffer and tie rule") {
  TriMesh m;
  m.vertices = {{-5, -5, 3}, {5, -5, 3}, {0, 5, 3}, {-5, -5, 2}, {5, -5, 2}, {0, 5, 2}};
  m.faces = {{0, 1, 2}, {3, 4, 5}, {3, 4, 5}};
  const auto vis = rasterize_view(m, Se3Pose{}, kIntr);
  CHECK(vis.face.at(16, 12) == 1);  // nearer one, lower of the coincident pair
  CHECK(vis.depth.at(16, 12) == doctest::Approx(2.0));
}

TEST_CASE("rasterizer: triangles crossing the near plane") {
  TriMesh m;
  // floor-like triangle running from behind the camera to far ahead
  m.vertices = {{-3, 1, -2}, {3, 1, -2}, {0, 1, 8}};
  m.faces = {{0, 1, 2}};
  const auto vis = rasterize_view(m, Se3Pose{}, kIntr);
  int disagree = 0;
  for (int v = 0; v < kIntr.height; ++v) {
    for (int u = 0; u < kIntr.width; ++u) {
      const auto [f, z] = cast_pixel(m, Se3Pose{}, kIntr, u, v);
      disagree += (f >= 0 && z >= kNearPlane) != (vis.face.at(u, v) == 0);
      if (f >= 0 && vis.face.at(u, v) == 0) CHECK(vis.depth.at(u, v) == doctest::Approx(z).epsilon(1e-9));
    }
  }
  CHECK(disagree <= 1);
}

TEST_CASE("rasterizer agrees with raycasting on a synthetic scene") {
  SyntheticSceneSpec s;
  s.units.push_back(drawers(2));
  const SyntheticScene sc = generate_synthetic(s);
  std::mt19937_64 rng(5);
  for (const auto& f : sc.scene.frames) {
    const auto vis = rasterize_view(sc.scene.mesh, f);
    int face_mismatch = 0;
    for (int k = 0; k < 200; ++k) {
      const int u = static_cast<int>(rng() % f.intrinsics.width);
      const int v = static_cast<int>(rng() % f.intrinsics.height);
      const auto [face, z] = cast_pixel(sc.scene.mesh, f.pose, f.intrinsics, u, v);
      REQUIRE(face >= 0);  // closed room
      CHECK(vis.depth.at(u, v) == doctest::Approx(z).epsilon(1e-9));
      face_mismatch += face != vis.face.at(u, v);  // only along shared edges
    }
    CHECK(face_mismatch <= 4);
  }
}

TEST_CASE("mask ops") {
  Mask ring(9, 9, 0);
  for (int y = 1; y <= 7; ++y) {
    for (int x = 1; x <= 7; ++x) ring.at(x, y) = (x == 1 || x == 7 || y == 1 || y == 7);
  }
  const Mask filled = fill_holes(ring);
  CHECK(count_on(filled) == 49);
  CHECK(fill_holes(filled) == filled);
  CHECK(fill_holes(Mask(5, 5, 0)) == Mask(5, 5, 0));

  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    Mask m(13, 10, 0);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng() % 5 == 0;
    const Mask f = fill_holes(m);
    CHECK(fill_holes(f) == f);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) CHECK(f[i]);
    }
    const int r = static_cast<int>(rng() % 3);
    const Mask d = dilate(m, r);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        bool any = false;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) any |= m.contains(x + dx, y + dy) && m.at(x + dx, y + dy);
        }
        CHECK((d.at(x, y) != 0) == any);
      }
    }
  }
  const auto box = bounding_box(ring);
  REQUIRE(box);
  CHECK(box->x0 == 1);
  CHECK(box->y1 == 7);
  CHECK_FALSE(bounding_box(Mask(3, 3, 0)));
  const auto c = mask_centroid(ring);
  CHECK(c->first == doctest::Approx(4.5));
}

TEST_CASE("project_mask") {
  TriMesh m = testsupport::grid_mesh({-2, -2, 2}, {4, 0, 0}, {0, 4, 0}, 8, 8);
  const auto vis = rasterize_view(m, Se3Pose{}, kIntr, "a");
  std::set<int> visible;
  std::map<int, int> counts;
  for (std::size_t i = 0; i < vis.face.size(); ++i) {
    if (vis.face[i] >= 0) ++counts[vis.face[i]];
  }
  std::size_t kept_pixels = 0;
  for (auto [f, c] : counts) {
    if (c >= 3) {
      visible.insert(f);
      kept_pixels += c;
    }
  }
  const auto all = project_mask(vis, Mask(32, 24, 1));
  CHECK(all.faces == std::vector<int>(visible.begin(), visible.end()));
  CHECK(all.pixel_count == kept_pixels);
  CHECK(project_mask(vis, Mask(32, 24, 0)).faces.empty());

  Mask annulus(32, 24, 0);
  Mask disk(32, 24, 0);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 32; ++x) {
      const double r = std::hypot(x - 16.0, y - 12.0);
      disk.at(x, y) = r <= 9;
      annulus.at(x, y) = r <= 9 && r >= 4;
    }
  }
  CHECK(project_mask(vis, annulus).faces == project_mask(vis, disk).faces);
  CHECK_THROWS_AS(project_mask(vis, Mask(10, 10, 1)), InvalidInput);
}

TEST_CASE("louvain: two cliques") {
  std::vector<std::tuple<int, int, double>> edges;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) edges.emplace_back(5 * c + i, 5 * c + j, 1.0);
    }
  }
  edges.emplace_back(4, 5, 1.0);
  const auto g = WeightedGraph::from_edges(10, edges);
  const auto labels = louvain(g);
  CHECK(labels == std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1});
  CHECK(modularity(g, labels) == doctest::Approx(brute_modularity(g, labels)));
}

TEST_CASE("louvain: local optimality, determinism, modularity oracle") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 15; ++t) {
    const int n = 12 + static_cast<int>(rng() % 20);
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const bool same = (i / 6) == (j / 6);
        if (std::uniform_real_distribution<double>(0, 1)(rng) < (same ? 0.7 : 0.08)) {
          edges.emplace_back(i, j, 0.5 + (rng() % 4));
        }
      }
    }
    const auto g = WeightedGraph::from_edges(n, edges);
    const auto labels = louvain(g);
    CHECK(louvain(g) == labels);
    const double q = modularity(g, labels);
    CHECK(q == doctest::Approx(brute_modularity(g, labels)).epsilon(1e-9));
    // labels numbered by smallest member
    int next = 0;
    for (int i = 0; i < n; ++i) {
      CHECK(labels[i] <= next);
      if (labels[i] == next) ++next;
    }
    // no single node move raises modularity
    const int c = next;
    for (int i = 0; i < n; ++i) {
      for (int to = 0; to <= c; ++to) {
        auto moved = labels;
        moved[i] = to;
        CHECK(brute_modularity(g, moved) <= q + 1e-9);
      }
    }
    CHECK(q >= brute_modularity(g, std::vector<int>(n, 0)) - 1e-12);
  }
}

TEST_CASE("fuse_instances: identical and disjoint masks") {
  TriMesh m = testsupport::grid_mesh({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 4, 4);
  std::vector<MaskProjection> same;
  for (int k = 0; k < 3; ++k) same.push_back({"f" + std::to_string(k), k, {0, 1, 2, 3}, 40});
  auto inst = fuse_instances(same, m, {});
  REQUIRE(inst.size() == 1);
  CHECK(inst[0].faces == std::vector<int>{0, 1, 2, 3});
  CHECK(inst[0].views.size() == 3);
  CHECK(inst[0].instance_id == "inst_000");
  for (const auto& v : inst[0].views) CHECK(v.iou == 1.0);

  std::vector<MaskProjection> apart{{"f0", 0, {0, 1, 2}, 30}, {"f0", 1, {20, 21, 22}, 30},
                                    {"f1", 0, {0, 1, 2}, 30}};
  inst = fuse_instances(apart, m, {});
  REQUIRE(inst.size() == 2);
  CHECK(inst[0].faces == std::vector<int>{0, 1, 2});
  CHECK(inst[1].faces == std::vector<int>{20, 21, 22});
  CHECK(inst[1].views.size() == 1);
}

TEST_CASE("fuse_instances on two adjacent drawers") {
  SyntheticSceneSpec s;
  s.units.push_back(drawers(2));
  const SyntheticScene sc = generate_synthetic(s);
  const LiftResult lr = lift_detections(sc.scene.mesh, sc.scene.frames, sc.detections, {});
  REQUIRE(lr.instances.size() == 2);

  std::set<int> seen_faces;
  for (const auto& vis : lr.visibility) {
    for (std::size_t i = 0; i < vis.face.size(); ++i) {
      if (vis.face[i] >= 0) seen_faces.insert(vis.face[i]);
    }
  }
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<int> gt;
    for (int f : sc.part_faces[k]) {
      if (seen_faces.count(f)) gt.push_back(f);
    }
    double best = 0;
    for (const auto& inst : lr.instances) best = std::max(best, sorted_set_iou(inst.faces, gt));
    CHECK(best >= 0.9);
  }

  // partition + order invariance
  std::set<int> all;
  for (const auto& p : lr.projections) all.insert(p.faces.begin(), p.faces.end());
  std::size_t total = 0;
  std::set<int> uni;
  for (const auto& inst : lr.instances) {
    total += inst.faces.size();
    uni.insert(inst.faces.begin(), inst.faces.end());
    CHECK(std::is_sorted(inst.faces.begin(), inst.faces.end()));
    CHECK(inst.views.size() <= 5);
    for (std::size_t i = 1; i < inst.views.size(); ++i) CHECK(inst.views[i - 1].iou >= inst.views[i].iou);
  }
  CHECK(total == uni.size());
  for (int f : uni) CHECK(all.count(f) == 1);

  auto shuffled = lr.projections;
  std::mt19937_64 rng(2);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto again = fuse_instances(shuffled, sc.scene.mesh, {});
  REQUIRE(again.size() == lr.instances.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].faces == lr.instances[i].faces);
    CHECK(again[i].instance_id == lr.instances[i].instance_id);
  }
}

TEST_CASE("sorted_set_iou") {
  CHECK(sorted_set_iou({1, 2, 3}, {2, 3, 4}) == doctest::Approx(0.5));
  CHECK(sorted_set_iou({}, {}) == 0.0);
  CHECK(sorted_set_iou({1}, {1}) == 1.0);
}
