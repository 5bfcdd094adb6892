#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "openable/articulate/articulate.hpp"
#include "openable/assemble/assemble.hpp"
#include "openable/core/geometry.hpp"
#include "test_support.hpp"

namespace testsupport {

using openable::Articulation;
using openable::DedupOptions;
using openable::Intrinsics;
using openable::JointType;
using openable::PartCandidate;
using openable::Se3Pose;
using openable::UnitVec3;

// ---- dedup over 64-element universes ----

inline std::vector<int> bits_to_set(std::uint64_t m) {
  std::vector<int> v;
  for (int i = 0; i < 64; ++i) {
    if (m >> i & 1) v.push_back(i);
  }
  return v;
}

inline double bit_iou(std::uint64_t a, std::uint64_t b) {
  const int u = std::popcount(a | b);
  return u == 0 ? 0.0 : static_cast<double>(std::popcount(a & b)) / u;
}

// Stage 1: the kept set K is the unique subset where each part is in K iff no
// higher-ranked member of K duplicates it; found by trying all 2^n subsets.
// Stage 2: every subset of lower-ranked survivors up to max_subset is tried.
inline std::vector<int> dedup_oracle(const std::vector<std::uint64_t>& sets, const std::vector<std::string>& ids,
                                     const DedupOptions& o) {
  const int n = static_cast<int>(sets.size());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) {
    rank[i] = 0;
    for (int j = 0; j < n; ++j) {
      const int ci = std::popcount(sets[i]), cj = std::popcount(sets[j]);
      if (cj > ci || (cj == ci && ids[j] < ids[i])) ++rank[i];
    }
  }
  int fixed_points = 0;
  std::uint32_t kept1 = 0;
  for (std::uint32_t k = 0; k < (1u << n); ++k) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      bool dominated = false;
      for (int j = 0; j < n; ++j) {
        if ((k >> j & 1) && rank[j] < rank[i] && bit_iou(sets[i], sets[j]) >= o.tau_dup) dominated = true;
      }
      ok = (((k >> i) & 1) != 0) == !dominated;
    }
    if (ok) {
      ++fixed_points;
      kept1 = k;
    }
  }
  if (fixed_points != 1) throw std::logic_error("stage-1 oracle has no unique fixed point");

  std::vector<int> kept;
  for (int i = 0; i < n; ++i) {
    if (!(kept1 >> i & 1)) continue;
    bool explained = false;
    for (std::uint32_t t = 1; t < (1u << n) && !explained; ++t) {
      if (t & ~kept1) continue;
      if (std::popcount(t) > o.max_subset) continue;
      std::uint64_t u = 0;
      bool valid = true;
      for (int j = 0; j < n; ++j) {
        if (!(t >> j & 1)) continue;
        valid = valid && rank[j] > rank[i] && bit_iou(sets[i], sets[j]) >= o.tau_low;
        u |= sets[j];
      }
      explained = valid && bit_iou(sets[i], u) >= o.tau_dup;
    }
    if (!explained) kept.push_back(i);
  }
  return kept;
}

// 1..8 parts mixing fresh intervals, near duplicates, pieces and unions.
inline std::vector<std::uint64_t> random_dedup_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = count(rng);
  std::vector<std::uint64_t> sets;
  while (static_cast<int>(sets.size()) < n) {
    const double r = u(rng);
    std::uint64_t s = 0;
    if (sets.empty() || r < 0.3) {
      const int lo = static_cast<int>(u(rng) * 48), len = 4 + static_cast<int>(u(rng) * 16);
      for (int i = lo; i < std::min(64, lo + len); ++i) s |= 1ull << i;
    } else if (r < 0.6) {
      s = sets[static_cast<std::size_t>(u(rng) * sets.size())];
      for (int i = 0; i < 64; ++i) {
        if (u(rng) < 0.06) s ^= 1ull << i;
      }
    } else if (r < 0.85) {
      const std::uint64_t base = sets[static_cast<std::size_t>(u(rng) * sets.size())];
      const auto bits = bits_to_set(base);
      if (bits.empty()) continue;
      const int a = static_cast<int>(u(rng) * bits.size());
      const int b = std::min<int>(bits.size(), a + 1 + static_cast<int>(u(rng) * bits.size() / 2));
      for (int i = a; i < b; ++i) s |= 1ull << bits[i];
    } else {
      s = sets[static_cast<std::size_t>(u(rng) * sets.size())] | sets[static_cast<std::size_t>(u(rng) * sets.size())];
    }
    if (s != 0) sets.push_back(s);
  }
  return sets;
}

// ---- rendering ----

// Pixel-center raycast: (face, camera z) or (-1, 0).
inline std::pair<int, double> cast_pixel(const openable::TriMesh& m, const Se3Pose& pose, const Intrinsics& in,
                                         int u, int v) {
  const Vec3 r = in.pixel_ray(u, v);
  const auto hit = openable::raycast(m, pose.translation, UnitVec3::normalize(pose.rotate(r)));
  if (!hit) return {-1, 0.0};
  return {hit->face, hit->distance / r.norm()};
}

// ---- kinematics ----

inline Mat3 skew(const Vec3& k) {
  Mat3 K;
  K << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return K;
}

inline Mat3 rotation_by_exp(const Vec3& axis, double angle) { return (angle * skew(axis)).exp(); }

inline Articulation random_articulation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Articulation a;
  a.type = u(rng) < 0.5 ? JointType::kPrismatic : JointType::kRevolute;
  a.axis = UnitVec3::normalize(random_unit(rng));
  a.origin = random_point(rng, 3.0);
  a.range = a.type == JointType::kPrismatic ? 0.1 + u(rng) : 0.1 + 3.0 * u(rng);
  return a;
}

// Closed box plate of size (a, b, t) centered at c with local axes R; local +z points inward.
struct Plate {
  Mat3 R;
  Vec3 c;
  Vec3 size;
  PartCandidate candidate;
};

inline Plate random_plate(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plate p;
  p.R = random_rotation(rng);
  p.c = random_point(rng, 2.0);
  p.size = {0.4 + 0.4 * u(rng), 0.15 + 0.2 * u(rng), 0.01 + 0.02 * u(rng)};
  TriMesh box = box_mesh(-0.5 * p.size, 0.5 * p.size);
  for (auto& v : box.vertices) v = p.R * v + p.c;
  p.candidate.instance_id = "plate";
  p.candidate.part_mesh = box;
  const UnitVec3 n = UnitVec3::normalize(p.R.col(2));
  p.candidate.front_plane = {n, n.dot(p.c) - 0.5 * p.size.z(), 0.03};
  return p;
}

// Hint near the hinge edge of a plate; axis along local y (i even) or local x.
struct HingeHint {
  Articulation hint;
  int along = 1;  // local index of the hinge edge direction
  double side = 1.0;
};

inline HingeHint random_hinge_hint(const Plate& p, std::mt19937_64& rng, bool vertical_edge) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HingeHint h;
  h.along = vertical_edge ? 1 : 0;
  const int other = 1 - h.along;
  h.side = u(rng) < 0 ? -1.0 : 1.0;
  h.hint.type = JointType::kRevolute;
  h.hint.axis = UnitVec3::normalize(p.R.col(h.along) + 0.2 * random_unit(rng));
  Vec3 local = Vec3::Zero();
  local[other] = h.side * 0.5 * p.size[other] + 0.03 * u(rng);
  local[h.along] = 0.1 * u(rng);
  local.z() = -0.5 * p.size.z() + 0.02 * u(rng);
  h.hint.origin = p.c + p.R * local;
  h.hint.range = 1.2;
  return h;
}

// ---- texture ----

inline int texel_coord(double uv, int n) { return static_cast<int>(std::floor(uv * n)); }

}  // namespace testsupport
