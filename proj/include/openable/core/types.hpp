#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "openable/core/error.hpp"

namespace openable {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// World "up". Everything gravity-referenced assumes the ground plane is z = 0.
inline const Vec3 kUp{0.0, 0.0, 1.0};

/// A direction with Euclidean norm 1 (within 1e-9).
class UnitVec3 {
 public:
  UnitVec3() : v_(1.0, 0.0, 0.0) {}

  /// Normalizes v; throws InvalidInput for a (near) zero vector.
  static UnitVec3 normalize(const Vec3& v) {
    const double n = v.norm();
    if (!(n > 1e-15) || !std::isfinite(n)) {
      throw InvalidInput("cannot normalize a zero-length direction");
    }
    return UnitVec3(v / n);
  }

  static UnitVec3 x() { return UnitVec3(Vec3::UnitX()); }
  static UnitVec3 y() { return UnitVec3(Vec3::UnitY()); }
  static UnitVec3 z() { return UnitVec3(Vec3::UnitZ()); }

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  double dot(const Vec3& o) const { return v_.dot(o); }
  double operator[](int i) const { return v_[i]; }
  UnitVec3 operator-() const { return UnitVec3(-v_); }
  Vec3 operator*(double s) const { return v_ * s; }

 private:
  explicit UnitVec3(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

inline Vec3 operator*(double s, const UnitVec3& u) { return u.vec() * s; }

/// Rigid transform, camera-to-world for frames.
struct Se3Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& d) const { return rotation * d; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.transpose() * (p - translation); }
  Se3Pose inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
  Se3Pose operator*(const Se3Pose& o) const {
    return {rotation * o.rotation, rotation * o.translation + translation};
  }
  Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  /// Builds a pose from a 4x4 matrix, validating R·Rᵀ = I, det R = +1 and the
  /// homogeneous row within tol. Throws InvalidInput otherwise.
  static Se3Pose from_matrix(const Mat4& m, double tol = 1e-9);
  /// Camera pose at eye looking at target with z-up; camera axes x right, y down, z forward.
  static Se3Pose look_at(const Vec3& eye, const Vec3& target);

  /// Max deviation of R·Rᵀ from identity and of det R from 1.
  double orthonormality_error() const;
};

/// Pinhole intrinsics; pixel (u, v) has its center at (u + 0.5, v + 0.5).
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  bool valid() const {
    return fx > 0 && fy > 0 && width > 0 && height > 0 && cx >= 0 && cx < width && cy >= 0 &&
           cy < height;
  }
  /// Camera-frame ray direction (z = 1) through the center of pixel (u, v).
  Vec3 pixel_ray(int u, int v) const {
    return {(u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0};
  }
  Vec2 project(const Vec3& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }
};

using Rgb = std::array<float, 3>;
using Face = std::array<int, 3>;

/// Indexed triangle mesh with optional per-vertex colors in [0, 1].
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Rgb> colors;  // empty or one per vertex
  std::vector<Face> faces;

  bool has_colors() const { return !colors.empty(); }
  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool empty() const { return faces.empty(); }

  /// Throws InvalidInput when an index is out of range, a face is degenerate,
  /// or the color array length disagrees with the vertex count.
  void validate() const;
  void ensure_colors(const Rgb& fill = {1.0f, 1.0f, 1.0f});
  Vec3 face_normal(std::size_t f) const;  // unnormalized (twice the area)
  double face_area(std::size_t f) const;
  void append(const TriMesh& other);
};

/// Result of restricting a mesh to a subset of faces, with back references.
struct SubMesh {
  TriMesh mesh;
  std::vector<int> source_vertices;  // new vertex -> source vertex
  std::vector<int> source_faces;     // new face -> source face
};

/// Keeps the listed faces and the vertices they reference, compacting indices.
SubMesh extract_faces(const TriMesh& mesh, const std::vector<int>& faces);
/// Drops every vertex with keep[v] == false together with its incident faces.
SubMesh filter_vertices(const TriMesh& mesh, const std::vector<bool>& keep);

/// Plane ⟨normal, x⟩ = offset with a slab half-width of thickness / 2.
struct Plane {
  UnitVec3 normal;
  double offset = 0.0;
  double thickness = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  Plane flipped() const { return {-normal, -offset, thickness}; }
};

/// Oriented box: axes sorted by extent, s1 ≥ s2 ≥ s3 > 0.
struct Obb {
  std::array<UnitVec3, 3> axes{UnitVec3::x(), UnitVec3::y(), UnitVec3::z()};
  Vec3 center = Vec3::Zero();
  Vec3 extents = Vec3::Ones();

  Vec3 to_local(const Vec3& p) const {
    const Vec3 d = p - center;
    return {axes[0].dot(d), axes[1].dot(d), axes[2].dot(d)};
  }
  Vec3 to_world(const Vec3& local) const {
    return center + local.x() * axes[0].vec() + local.y() * axes[1].vec() +
           local.z() * axes[2].vec();
  }
  std::array<Vec3, 8> corners() const;

  static Obb axis_aligned(const Vec3& lo, const Vec3& hi);
};

}  // namespace openable
