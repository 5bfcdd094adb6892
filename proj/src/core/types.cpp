#include "openable/core/types.hpp"

#include <algorithm>
#include <string>

#include "openable/core/articulation.hpp"

namespace openable {

Se3Pose Se3Pose::from_matrix(const Mat4& m, double tol) {
  Se3Pose pose{m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  const Eigen::RowVector4d last = m.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tol) {
    throw InvalidInput("pose matrix has a non-homogeneous last row");
  }
  if (!m.allFinite() || pose.orthonormality_error() > tol) {
    throw InvalidInput("pose rotation is not in SO(3)");
  }
  return pose;
}

Se3Pose Se3Pose::look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(kUp);
  if (right.norm() < 1e-9) right = Vec3::UnitX();
  right.normalize();
  const Vec3 down = forward.cross(right);
  Se3Pose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  return pose;
}

double Se3Pose::orthonormality_error() const {
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, std::abs(rotation.determinant() - 1.0));
}

void TriMesh::validate() const {
  const auto n = static_cast<long long>(vertices.size());
  if (!colors.empty() && colors.size() != vertices.size()) {
    throw InvalidInput("mesh color count " + std::to_string(colors.size()) +
                       " differs from vertex count " + std::to_string(vertices.size()));
  }
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    for (int idx : t) {
      if (idx < 0 || idx >= n) {
        throw InvalidInput("face " + std::to_string(f) + " references vertex " +
                           std::to_string(idx) + " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw InvalidInput("face " + std::to_string(f) + " is degenerate");
    }
  }
}

void TriMesh::ensure_colors(const Rgb& fill) {
  if (colors.size() != vertices.size()) colors.assign(vertices.size(), fill);
}

Vec3 TriMesh::face_normal(std::size_t f) const {
  const auto& t = faces[f];
  return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
}

double TriMesh::face_area(std::size_t f) const { return 0.5 * face_normal(f).norm(); }

void TriMesh::append(const TriMesh& other) {
  const int base = static_cast<int>(vertices.size());
  const bool colored = has_colors() || other.has_colors();
  if (colored) {
    ensure_colors();
  }
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  if (colored) {
    if (other.has_colors()) {
      colors.insert(colors.end(), other.colors.begin(), other.colors.end());
    } else {
      colors.resize(vertices.size(), Rgb{1.0f, 1.0f, 1.0f});
    }
  }
  for (const auto& t : other.faces) faces.push_back({t[0] + base, t[1] + base, t[2] + base});
}

SubMesh extract_faces(const TriMesh& mesh, const std::vector<int>& faces) {
  SubMesh out;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (int f : faces) {
    Face nf{};
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.faces[f][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(mesh.vertices[v]);
        if (mesh.has_colors()) out.mesh.colors.push_back(mesh.colors[v]);
        out.source_vertices.push_back(v);
      }
      nf[k] = remap[v];
    }
    out.mesh.faces.push_back(nf);
    out.source_faces.push_back(f);
  }
  return out;
}

SubMesh filter_vertices(const TriMesh& mesh, const std::vector<bool>& keep) {
  SubMesh out;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!keep[v]) continue;
    remap[v] = static_cast<int>(out.mesh.vertices.size());
    out.mesh.vertices.push_back(mesh.vertices[v]);
    if (mesh.has_colors()) out.mesh.colors.push_back(mesh.colors[v]);
    out.source_vertices.push_back(static_cast<int>(v));
  }
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    if (remap[t[0]] < 0 || remap[t[1]] < 0 || remap[t[2]] < 0) continue;
    out.mesh.faces.push_back({remap[t[0]], remap[t[1]], remap[t[2]]});
    out.source_faces.push_back(static_cast<int>(f));
  }
  return out;
}

std::array<Vec3, 8> Obb::corners() const {
  std::array<Vec3, 8> out;
  int i = 0;
  for (int a = -1; a <= 1; a += 2) {
    for (int b = -1; b <= 1; b += 2) {
      for (int c = -1; c <= 1; c += 2) {
        out[i++] = to_world(Vec3(a * extents.x() / 2, b * extents.y() / 2, c * extents.z() / 2));
      }
    }
  }
  return out;
}

Obb Obb::axis_aligned(const Vec3& lo, const Vec3& hi) {
  std::array<int, 3> order{0, 1, 2};
  const Vec3 size = hi - lo;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return size[a] > size[b]; });
  Obb box;
  const std::array<UnitVec3, 3> basis{UnitVec3::x(), UnitVec3::y(), UnitVec3::z()};
  for (int k = 0; k < 3; ++k) {
    box.axes[k] = basis[order[k]];
    box.extents[k] = size[order[k]];
  }
  // keep the frame right-handed
  if (box.axes[0].vec().cross(box.axes[1].vec()).dot(box.axes[2].vec()) < 0) {
    box.axes[2] = -box.axes[2];
  }
  box.center = 0.5 * (lo + hi);
  return box;
}

std::string_view to_string(JointType t) {
  return t == JointType::kPrismatic ? "prismatic" : "revolute";
}

JointType joint_type_from_string(std::string_view s) {
  if (s == "prismatic") return JointType::kPrismatic;
  if (s == "revolute") return JointType::kRevolute;
  throw InvalidInput("unknown joint type '" + std::string(s) + "'");
}

}  // namespace openable
