#include "openable/ingest/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "openable/core/geometry.hpp"
#include "openable/lift/rasterize.hpp"

namespace openable {

namespace fs = std::filesystem;

namespace {

constexpr Rgb kWallColor{0.86f, 0.83f, 0.76f};
constexpr Rgb kFloorColor{0.55f, 0.47f, 0.38f};
constexpr Rgb kCeilingColor{0.95f, 0.95f, 0.94f};
constexpr Rgb kBodyColor{0.62f, 0.44f, 0.27f};
constexpr Rgb kPartColor{0.74f, 0.56f, 0.36f};
constexpr Rgb kPanelColor{0.45f, 0.30f, 0.18f};

// Grid of (nu x nv) quads spanning origin + [0,1]·u + [0,1]·v; face normals along u × v.
void add_grid(TriMesh& mesh, const Vec3& origin, const Vec3& u, const Vec3& v, int nu, int nv,
              const Rgb& color) {
  const int base = static_cast<int>(mesh.vertices.size());
  for (int j = 0; j <= nv; ++j) {
    for (int i = 0; i <= nu; ++i) {
      mesh.vertices.push_back(origin + (static_cast<double>(i) / nu) * u +
                              (static_cast<double>(j) / nv) * v);
      mesh.colors.push_back(color);
    }
  }
  const int row = nu + 1;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const int a = base + j * row + i;
      mesh.faces.push_back({a, a + 1, a + row + 1});
      mesh.faces.push_back({a, a + row + 1, a + row});
    }
  }
}

int cells(double length, double spacing) {
  return std::max(1, static_cast<int>(std::ceil(length / spacing - 1e-9)));
}

void add_rect(TriMesh& mesh, const Vec3& origin, const Vec3& u, const Vec3& v, double spacing,
              const Rgb& color) {
  add_grid(mesh, origin, u, v, cells(u.norm(), spacing), cells(v.norm(), spacing), color);
}

struct LocalPart {
  double x0, x1, z0, z1;  // opening rectangle in the unit's front plane
  JointType type;
  HingeSide hinge;
};

std::vector<LocalPart> layout_parts(const FurnitureUnit& u, std::size_t unit_index) {
  const std::string where = "unit " + std::to_string(unit_index);
  std::vector<LocalPart> parts;
  const double z_lo = u.elevation;
  switch (u.type) {
    case UnitType::kDrawerStack: {
      if (u.count < 1) throw SpecError(where + ": drawer stack needs at least one drawer");
      const double h = (u.height - (u.count + 1) * kRail) / u.count;
      if (h <= 0.02 || u.width <= 2 * kRail + 0.02) throw SpecError(where + ": drawers too small");
      for (int i = 0; i < u.count; ++i) {
        const double z0 = z_lo + kRail + i * (h + kRail);
        parts.push_back({kRail, u.width - kRail, z0, z0 + h, JointType::kPrismatic, u.hinge});
      }
      break;
    }
    case UnitType::kHingedCabinet:
    case UnitType::kDoor: {
      const double z0 = z_lo + kRail;
      const double z1 = z_lo + u.height - kRail;
      if (z1 - z0 <= 0.02) throw SpecError(where + ": doors too small");
      if (u.count == 1) {
        if (u.type == UnitType::kDoor && (u.hinge == HingeSide::kTop || u.hinge == HingeSide::kBottom)) {
          throw SpecError(where + ": a door must hinge left or right");
        }
        parts.push_back({kRail, u.width - kRail, z0, z1, JointType::kRevolute, u.hinge});
      } else if (u.count == 2 && u.type == UnitType::kHingedCabinet) {
        const double w = (u.width - 3 * kRail) / 2;
        if (w <= 0.02) throw SpecError(where + ": doors too small");
        parts.push_back({kRail, kRail + w, z0, z1, JointType::kRevolute, HingeSide::kLeft});
        parts.push_back({2 * kRail + w, u.width - kRail, z0, z1, JointType::kRevolute, HingeSide::kRight});
      } else {
        throw SpecError(where + ": unsupported door count " + std::to_string(u.count));
      }
      break;
    }
  }
  return parts;
}

Se3Pose unit_pose(const FurnitureUnit& u, const Vec3& room) {
  const double pi = std::numbers::pi;
  Se3Pose p;
  double yaw = 0.0;
  switch (u.wall) {
    case 0:
      p.translation = {u.offset, 0.0, 0.0};
      break;
    case 1:
      yaw = pi / 2;
      p.translation = {room.x(), u.offset, 0.0};
      break;
    case 2:
      yaw = pi;
      p.translation = {room.x() - u.offset, room.y(), 0.0};
      break;
    case 3:
      yaw = 3 * pi / 2;
      p.translation = {0.0, room.y() - u.offset, 0.0};
      break;
    default:
      throw SpecError("wall index must be 0..3");
  }
  p.rotation = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  // Snap cos/sin of multiples of pi/2 so the layout is exactly axis-aligned.
  p.rotation = p.rotation.unaryExpr([](double x) { return std::round(x); });
  return p;
}

struct WorldBox {
  Vec3 lo, hi;
};

WorldBox unit_box(const FurnitureUnit& u, const Se3Pose& pose) {
  WorldBox b{Vec3::Constant(1e300), Vec3::Constant(-1e300)};
  for (int k = 0; k < 8; ++k) {
    const Vec3 local{(k & 1) ? u.width : 0.0, (k & 2) ? u.depth : 0.0,
                     u.elevation + ((k & 4) ? u.height : 0.0)};
    const Vec3 w = pose.apply(local);
    b.lo = b.lo.cwiseMin(w);
    b.hi = b.hi.cwiseMax(w);
  }
  return b;
}

void check_spec(const SyntheticSceneSpec& spec, std::vector<WorldBox>& boxes) {
  if ((spec.room.array() <= 0).any()) throw SpecError("room extents must be positive");
  const auto& c = spec.cameras;
  if (c.width <= 0 || c.height <= 0 || c.focal <= 0 || c.views_per_unit < 1) {
    throw SpecError("camera parameters must be positive");
  }
  for (std::size_t i = 0; i < spec.units.size(); ++i) {
    const auto& u = spec.units[i];
    if (u.width <= 0 || u.depth <= 0 || u.height <= 0 || u.elevation < 0 || u.offset < 0 ||
        u.range < 0) {
      throw SpecError("unit " + std::to_string(i) + ": dimensions must be positive");
    }
    const WorldBox b = unit_box(u, unit_pose(u, spec.room));
    if ((b.lo.array() < -1e-9).any() || (b.hi.array() > spec.room.array() + 1e-9).any()) {
      throw SpecError("unit " + std::to_string(i) + " does not fit inside the room");
    }
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      const auto& o = boxes[j];
      const bool overlap = (b.lo.array() < o.hi.array() - 1e-9).all() &&
                           (o.lo.array() < b.hi.array() - 1e-9).all();
      if (overlap) {
        throw SpecError("units " + std::to_string(j) + " and " + std::to_string(i) + " interpenetrate");
      }
    }
    boxes.push_back(b);
  }
}

void build_room(TriMesh& mesh, const Vec3& r) {
  const double L = r.x(), W = r.y(), H = r.z();
  add_rect(mesh, {0, 0, 0}, {L, 0, 0}, {0, W, 0}, 0.1, kFloorColor);
  add_rect(mesh, {0, 0, H}, {0, W, 0}, {L, 0, 0}, 0.5, kCeilingColor);
  // inward-facing walls
  add_rect(mesh, {0, 0, 0}, {0, 0, H}, {L, 0, 0}, 0.05, kWallColor);
  add_rect(mesh, {L, 0, 0}, {0, 0, H}, {0, W, 0}, 0.05, kWallColor);
  add_rect(mesh, {L, W, 0}, {0, 0, H}, {-L, 0, 0}, 0.05, kWallColor);
  add_rect(mesh, {0, W, 0}, {0, 0, H}, {0, -W, 0}, 0.05, kWallColor);
}

// Exterior shell of a unit in its local frame: front frame around the part
// openings, top, both sides, and the bottom when raised off the floor.
TriMesh build_body(const FurnitureUnit& u, const std::vector<LocalPart>& parts) {
  TriMesh m;
  const double W = u.width, D = u.depth, e = u.elevation, H = u.height;
  std::vector<double> xs{0.0, W}, zs{e, e + H};
  for (const auto& p : parts) {
    xs.insert(xs.end(), {p.x0, p.x1});
    zs.insert(zs.end(), {p.z0, p.z1});
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < zs.size(); ++j) {
      const double cx = 0.5 * (xs[i] + xs[i + 1]);
      const double cz = 0.5 * (zs[j] + zs[j + 1]);
      const bool opening = std::any_of(parts.begin(), parts.end(), [&](const LocalPart& p) {
        return cx > p.x0 && cx < p.x1 && cz > p.z0 && cz < p.z1;
      });
      if (opening) continue;
      add_rect(m, {xs[i], D, zs[j]}, {xs[i + 1] - xs[i], 0, 0}, {0, 0, zs[j + 1] - zs[j]}, 0.1,
               kBodyColor);
    }
  }
  add_rect(m, {0, 0, e + H}, {W, 0, 0}, {0, D, 0}, 0.1, kBodyColor);
  add_rect(m, {0, 0, e}, {0, D, 0}, {0, 0, H}, 0.1, kBodyColor);
  add_rect(m, {W, 0, e}, {0, 0, H}, {0, D, 0}, 0.1, kBodyColor);
  if (e > 0) add_rect(m, {0, 0, e}, {0, D, 0}, {W, 0, 0}, 0.1, kBodyColor);
  return m;
}

// Front plate on the opening plus a centered raised panel (40% per side).
TriMesh build_part(const FurnitureUnit& u, const LocalPart& p) {
  TriMesh m;
  const double w = p.x1 - p.x0, h = p.z1 - p.z0;
  const auto grid = [](double len) { return std::clamp(static_cast<int>(std::lround(len / 0.05)), 4, 16); };
  add_grid(m, {p.x0, u.depth, p.z0}, {w, 0, 0}, {0, 0, h}, grid(w), grid(h), kPartColor);
  const double pw = 0.4 * w, ph = 0.4 * h;
  add_grid(m, {p.x0 + 0.3 * w, u.depth + kPanelProud, p.z0 + 0.3 * h}, {pw, 0, 0}, {0, 0, ph}, 2, 2,
           kPanelColor);
  return m;
}

Articulation part_articulation(const FurnitureUnit& u, const LocalPart& p) {
  Articulation a;
  a.type = p.type;
  if (p.type == JointType::kPrismatic) {
    a.axis = UnitVec3::y();
    a.origin = {0.5 * (p.x0 + p.x1), u.depth, 0.5 * (p.z0 + p.z1)};
    a.range = u.range > 0 ? u.range : 0.8 * u.depth;
    return a;
  }
  // hinge line on the mid-surface of plate + panel
  const double y = u.depth + kPanelProud / 2;
  const double xm = 0.5 * (p.x0 + p.x1), zm = 0.5 * (p.z0 + p.z1);
  switch (p.hinge) {
    case HingeSide::kLeft:
      a.axis = UnitVec3::z();
      a.origin = {p.x0, y, zm};
      break;
    case HingeSide::kRight:
      a.axis = -UnitVec3::z();
      a.origin = {p.x1, y, zm};
      break;
    case HingeSide::kTop:
      a.axis = UnitVec3::x();
      a.origin = {xm, y, p.z1};
      break;
    case HingeSide::kBottom:
      a.axis = -UnitVec3::x();
      a.origin = {xm, y, p.z0};
      break;
  }
  a.range = u.range > 0 ? u.range : std::numbers::pi / 2;
  return a;
}

Articulation to_world(const Articulation& a, const Se3Pose& pose) {
  Articulation w = a;
  w.origin = pose.apply(a.origin);
  w.axis = UnitVec3::normalize(pose.rotate(a.axis));
  return w;
}

Vec3 open_position(const Vec3& x, const Articulation& a) {
  if (a.type == JointType::kPrismatic) return x + a.range * a.axis.vec();
  return Eigen::AngleAxisd(a.range, a.axis.vec()) * (x - a.origin) + a.origin;
}

std::vector<Se3Pose> unit_cameras(const FurnitureUnit& u, const Se3Pose& pose,
                                  const SyntheticSceneSpec& spec) {
  const auto& c = spec.cameras;
  const double tan_h = 0.5 * c.width / c.focal;
  const double tan_v = 0.5 * c.height / c.focal;
  const Vec3 target = pose.apply({0.5 * u.width, u.depth, u.elevation + 0.5 * u.height});
  const Vec3 out = pose.rotate(Vec3::UnitY());
  const double dist = std::max(1.0, 1.15 * std::max(0.5 * u.width / tan_h, 0.5 * u.height / tan_v));
  const double margin = 0.25;
  std::vector<Se3Pose> cams;
  for (int i = 0; i < c.views_per_unit; ++i) {
    const double t = c.views_per_unit == 1 ? 0.0 : -1.0 + 2.0 * i / (c.views_per_unit - 1);
    const double yaw = t * c.yaw_span_deg * std::numbers::pi / 180.0;
    const Vec3 dir = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * out;
    Vec3 eye = target + dist * dir;
    eye.z() = std::clamp(target.z() + 0.3, 0.4, spec.room.z() - 0.2);
    // pull the camera back inside the room if needed
    for (int k = 0; k < 2; ++k) {
      const double lo = margin, hi = spec.room[k] - margin;
      if (eye[k] < lo || eye[k] > hi) {
        const double bound = eye[k] < lo ? lo : hi;
        const double s = (bound - target[k]) / (eye[k] - target[k]);
        const Vec3 flat = target + s * (eye - target);
        eye.x() = flat.x();
        eye.y() = flat.y();
      }
    }
    cams.push_back(Se3Pose::look_at(eye, target));
  }
  return cams;
}

UnitVec3 perturb_axis(const Vec3& axis, double sigma_deg, std::mt19937_64& rng) {
  if (sigma_deg <= 0) return UnitVec3::normalize(axis);
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec3 w{n01(rng), n01(rng), n01(rng)};
  const Vec3 a = axis.normalized();
  Vec3 perp = w - w.dot(a) * a;
  if (perp.norm() < 1e-12) perp = any_orthogonal(UnitVec3::normalize(a)).vec();
  const double angle = n01(rng) * sigma_deg * std::numbers::pi / 180.0;
  return UnitVec3::normalize(Eigen::AngleAxisd(angle, perp.normalized()) * a);
}

}  // namespace

SyntheticScene generate_synthetic(const SyntheticSceneSpec& spec) {
  std::vector<WorldBox> boxes;
  check_spec(spec, boxes);

  SyntheticScene out;
  TriMesh& mesh = out.scene.mesh;
  build_room(mesh, spec.room);

  struct PartRecord {
    int v_begin, v_end, f_begin, f_end;
    Articulation art;
  };
  std::vector<PartRecord> records;
  std::vector<Se3Pose> poses;
  for (std::size_t ui = 0; ui < spec.units.size(); ++ui) {
    const auto& u = spec.units[ui];
    const Se3Pose pose = unit_pose(u, spec.room);
    poses.push_back(pose);
    const auto parts = layout_parts(u, ui);
    TriMesh body = build_body(u, parts);
    for (auto& v : body.vertices) v = pose.apply(v);
    mesh.append(body);
    for (const auto& p : parts) {
      TriMesh pm = build_part(u, p);
      for (auto& v : pm.vertices) v = pose.apply(v);
      PartRecord r;
      r.v_begin = static_cast<int>(mesh.vertices.size());
      r.f_begin = static_cast<int>(mesh.faces.size());
      mesh.append(pm);
      r.v_end = static_cast<int>(mesh.vertices.size());
      r.f_end = static_cast<int>(mesh.faces.size());
      r.art = to_world(part_articulation(u, p), pose);
      records.push_back(r);
    }
  }

  std::vector<int> face_part(mesh.faces.size(), -1);
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    GroundTruthPart gt;
    char id[32];
    std::snprintf(id, sizeof id, "part_%02zu", k);
    gt.part_id = id;
    for (int v = r.v_begin; v < r.v_end; ++v) gt.vertex_indices.push_back(v);
    gt.articulation = r.art;
    std::vector<int> faces;
    for (int f = r.f_begin; f < r.f_end; ++f) {
      faces.push_back(f);
      face_part[f] = static_cast<int>(k);
    }
    std::vector<Vec3> open;
    for (int v = r.v_begin; v < r.v_end; ++v) open.push_back(open_position(mesh.vertices[v], r.art));
    out.ground_truth.parts.push_back(std::move(gt));
    out.part_faces.push_back(std::move(faces));
    out.open_vertices.push_back(std::move(open));
  }
  out.ground_truth.scene_mesh = "mesh.ply";

  const auto& c = spec.cameras;
  const Intrinsics intr{c.focal, c.focal, 0.5 * c.width, 0.5 * c.height, c.width, c.height};
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<int> seen(records.size(), 0);
  int frame_no = 0;
  for (std::size_t ui = 0; ui < spec.units.size(); ++ui) {
    for (const Se3Pose& cam : unit_cameras(spec.units[ui], poses[ui], spec)) {
      char id[32];
      std::snprintf(id, sizeof id, "f%03d", frame_no++);
      CalibratedFrame frame;
      frame.frame_id = id;
      frame.pose = cam;
      frame.intrinsics = intr;
      const FaceVisibilityMap vis = rasterize_view(mesh, cam, intr, frame.frame_id);
      frame.depth = DepthMap(c.width, c.height, 0.0f);
      std::vector<Mask> masks(records.size());
      std::vector<int> counts(records.size(), 0);
      for (std::size_t i = 0; i < vis.face.size(); ++i) {
        if (vis.face[i] < 0) continue;
        frame.depth[i] = quantize_depth_mm(vis.depth[i]);
        const int k = face_part[vis.face[i]];
        if (k < 0) continue;
        if (masks[k].empty()) masks[k] = Mask(c.width, c.height, 0);
        masks[k][i] = 1;
        ++counts[k];
      }
      for (std::size_t k = 0; k < records.size(); ++k) {
        if (counts[k] < spec.min_mask_pixels) continue;
        ++seen[k];
        const std::string& label = out.ground_truth.parts[k].part_id;
        out.detections.push_back({frame.frame_id, label, DetectionSource::kGrounding, masks[k], std::nullopt});

        const Articulation& gt = records[k].art;
        JointHint hint;
        hint.type = gt.type;
        const UnitVec3 axis = perturb_axis(gt.axis, spec.noise.sigma_axis_deg, rng);
        Vec3 origin = gt.origin;
        if (spec.noise.sigma_origin > 0) {
          const Vec3 d{n01(rng), n01(rng), n01(rng)};
          origin += spec.noise.sigma_origin * d;
        }
        if (spec.noise.type_flip_prob > 0 && u01(rng) < spec.noise.type_flip_prob) {
          hint.type = gt.type == JointType::kPrismatic ? JointType::kRevolute : JointType::kPrismatic;
        }
        hint.axis_cam = cam.rotation.transpose() * axis.vec();
        hint.origin_cam = cam.apply_inverse(origin);
        hint.range = gt.range;
        hint.confidence = 1.0;
        out.detections.push_back({frame.frame_id, label, DetectionSource::kOpd, masks[k], hint});
      }
      out.scene.frames.push_back(std::move(frame));
    }
  }
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (seen[k] == 0) spdlog::warn("synthetic part {} is not visible in any frame", k);
  }
  return out;
}

SyntheticSceneSpec random_scene_spec(std::uint64_t seed, int min_parts, int max_parts) {
  if (min_parts < 1 || max_parts < min_parts) throw SpecError("invalid part count bounds");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  SyntheticSceneSpec spec;
  spec.seed = seed;
  spec.room = {5.0, 6.0, 2.6};
  const int target = pick(min_parts, max_parts);
  std::array<double, 4> cursor{0.8, 0.8, 0.8, 0.8};
  int parts = 0;
  int wall = pick(0, 3);
  while (parts < target) {
    FurnitureUnit u;
    const int remaining = target - parts;
    const int kind = pick(0, 5);
    if (kind <= 2) {
      u.type = UnitType::kDrawerStack;
      u.count = std::min(remaining, pick(1, 3));
      u.width = uniform(0.55, 1.0);
      const double drawer_h = uniform(0.16, 0.28);
      u.height = u.count * drawer_h + (u.count + 1) * kRail;
      u.depth = uniform(0.4, 0.6);
    } else if (kind <= 4) {
      u.type = UnitType::kHingedCabinet;
      u.count = std::min(remaining, pick(1, 2));
      const double door_w = uniform(0.32, 0.48);
      u.width = u.count * door_w + (u.count + 1) * kRail;
      u.depth = uniform(0.35, 0.55);
      if (u.count == 1 && pick(0, 2) == 0) {
        u.hinge = pick(0, 1) == 0 ? HingeSide::kTop : HingeSide::kBottom;
        u.width = uniform(0.6, 0.85);
        u.height = uniform(0.3, 0.4) + 2 * kRail;
        u.elevation = u.hinge == HingeSide::kTop ? uniform(1.2, 1.5) : uniform(0.0, 0.3);
      } else {
        u.hinge = pick(0, 1) == 0 ? HingeSide::kLeft : HingeSide::kRight;
        u.height = uniform(1.45, 1.8) * door_w + 2 * kRail;
      }
    } else {
      u.type = UnitType::kDoor;
      u.count = 1;
      u.hinge = pick(0, 1) == 0 ? HingeSide::kLeft : HingeSide::kRight;
      u.width = uniform(0.7, 0.9);
      u.height = uniform(1.9, 2.1);
      u.depth = uniform(0.5, 0.6);
    }
    // place on the next wall with room left
    bool placed = false;
    for (int tries = 0; tries < 4 && !placed; ++tries) {
      const double len = (wall % 2 == 0) ? spec.room.x() : spec.room.y();
      if (cursor[wall] + u.width <= len - 0.8) {
        u.wall = wall;
        u.offset = cursor[wall];
        cursor[wall] += u.width + uniform(0.25, 0.5);
        placed = true;
      }
      wall = (wall + 1) % 4;
    }
    if (!placed) break;
    parts += u.count;
    spec.units.push_back(u);
  }
  return spec;
}

namespace {

std::string unit_type_name(UnitType t) {
  switch (t) {
    case UnitType::kDrawerStack:
      return "drawer-stack";
    case UnitType::kHingedCabinet:
      return "hinged-cabinet";
    case UnitType::kDoor:
      return "door";
  }
  return "drawer-stack";
}

UnitType unit_type_from_name(const std::string& s) {
  if (s == "drawer-stack") return UnitType::kDrawerStack;
  if (s == "hinged-cabinet") return UnitType::kHingedCabinet;
  if (s == "door") return UnitType::kDoor;
  throw SpecError("unknown unit type '" + s + "'");
}

std::string hinge_name(HingeSide h) {
  switch (h) {
    case HingeSide::kLeft:
      return "left";
    case HingeSide::kRight:
      return "right";
    case HingeSide::kTop:
      return "top";
    case HingeSide::kBottom:
      return "bottom";
  }
  return "left";
}

HingeSide hinge_from_name(const std::string& s) {
  if (s == "left") return HingeSide::kLeft;
  if (s == "right") return HingeSide::kRight;
  if (s == "top") return HingeSide::kTop;
  if (s == "bottom") return HingeSide::kBottom;
  throw SpecError("unknown hinge side '" + s + "'");
}

}  // namespace

Json to_json(const SyntheticSceneSpec& spec) {
  Json units = Json::array();
  for (const auto& u : spec.units) {
    units.push_back({{"type", unit_type_name(u.type)},
                     {"wall", u.wall},
                     {"offset", u.offset},
                     {"elevation", u.elevation},
                     {"width", u.width},
                     {"depth", u.depth},
                     {"height", u.height},
                     {"count", u.count},
                     {"hinge", hinge_name(u.hinge)},
                     {"range", u.range}});
  }
  const auto& c = spec.cameras;
  return Json{{"room", to_json(spec.room)},
              {"units", units},
              {"cameras",
               {{"width", c.width},
                {"height", c.height},
                {"focal", c.focal},
                {"views_per_unit", c.views_per_unit},
                {"yaw_span_deg", c.yaw_span_deg}}},
              {"noise",
               {{"sigma_axis_deg", spec.noise.sigma_axis_deg},
                {"sigma_origin", spec.noise.sigma_origin},
                {"type_flip_prob", spec.noise.type_flip_prob}}},
              {"min_mask_pixels", spec.min_mask_pixels},
              {"seed", spec.seed}};
}

SyntheticSceneSpec synthetic_spec_from_json(const Json& j) {
  SyntheticSceneSpec spec;
  try {
    if (j.contains("room")) spec.room = vec3_from_json(j["room"]);
    for (const auto& ju : j.value("units", Json::array())) {
      FurnitureUnit u;
      u.type = unit_type_from_name(ju.at("type").get<std::string>());
      u.wall = ju.value("wall", u.wall);
      u.offset = ju.value("offset", u.offset);
      u.elevation = ju.value("elevation", u.elevation);
      u.width = ju.value("width", u.width);
      u.depth = ju.value("depth", u.depth);
      u.height = ju.value("height", u.height);
      u.count = ju.value("count", u.count);
      u.hinge = hinge_from_name(ju.value("hinge", std::string("left")));
      u.range = ju.value("range", u.range);
      spec.units.push_back(u);
    }
    if (j.contains("cameras")) {
      const auto& jc = j["cameras"];
      auto& c = spec.cameras;
      c.width = jc.value("width", c.width);
      c.height = jc.value("height", c.height);
      c.focal = jc.value("focal", c.focal);
      c.views_per_unit = jc.value("views_per_unit", c.views_per_unit);
      c.yaw_span_deg = jc.value("yaw_span_deg", c.yaw_span_deg);
    }
    if (j.contains("noise")) {
      const auto& jn = j["noise"];
      spec.noise.sigma_axis_deg = jn.value("sigma_axis_deg", 0.0);
      spec.noise.sigma_origin = jn.value("sigma_origin", 0.0);
      spec.noise.type_flip_prob = jn.value("type_flip_prob", 0.0);
    }
    spec.min_mask_pixels = j.value("min_mask_pixels", spec.min_mask_pixels);
    spec.seed = j.value("seed", spec.seed);
  } catch (const Json::exception& e) {
    throw SpecError(std::string("synthetic spec: ") + e.what());
  } catch (const InvalidInput& e) {
    throw SpecError(std::string("synthetic spec: ") + e.what());
  }
  return spec;
}

void write_synthetic(const fs::path& dir, const SyntheticScene& s, const SyntheticSceneSpec& spec) {
  save_scene(dir, s.scene);
  save_detections(dir / "detections.json", s.detections);
  save_ground_truth(dir / "ground_truth.json", s.ground_truth);
  write_json_file(dir / "spec.json", to_json(spec));
}

}  // namespace openable
