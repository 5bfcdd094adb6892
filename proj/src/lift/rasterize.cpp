#include "openable/lift/rasterize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace openable {

namespace {

// Sutherland–Hodgman against z >= near. A triangle yields at most 4 vertices.
int clip_near(const std::array<Vec3, 3>& in, std::array<Vec3, 4>& out) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % 3];
    const bool a_in = a.z() >= kNearPlane;
    const bool b_in = b.z() >= kNearPlane;
    if (a_in) out[n++] = a;
    if (a_in != b_in) {
      const double t = (kNearPlane - a.z()) / (b.z() - a.z());
      Vec3 p = a + t * (b - a);
      p.z() = kNearPlane;
      out[n++] = p;
    }
  }
  return n;
}

double edge(double ax, double ay, double bx, double by, double px, double py) {
  return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

FaceVisibilityMap rasterize_view(const TriMesh& mesh, const Se3Pose& pose,
                                 const Intrinsics& k, std::string frame_id) {
  FaceVisibilityMap out;
  out.frame_id = std::move(frame_id);
  out.face = Raster<int>(k.width, k.height, -1);
  out.depth = Raster<double>(k.width, k.height, 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  Raster<double> zbuf(k.width, k.height, inf);

  std::vector<Vec3> cam(mesh.vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = pose.apply_inverse(mesh.vertices[i]);

  std::array<Vec3, 4> poly;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    const std::array<Vec3, 3> tri{cam[t[0]], cam[t[1]], cam[t[2]]};
    if (tri[0].z() < kNearPlane && tri[1].z() < kNearPlane && tri[2].z() < kNearPlane) continue;
    const int n = clip_near(tri, poly);
    if (n < 3) continue;

    std::array<double, 4> sx{}, sy{}, iz{};
    for (int i = 0; i < n; ++i) {
      iz[i] = 1.0 / poly[i].z();
      sx[i] = k.fx * poly[i].x() * iz[i] + k.cx;
      sy[i] = k.fy * poly[i].y() * iz[i] + k.cy;
    }
    const int face = static_cast<int>(f);
    for (int j = 1; j + 1 < n; ++j) {
      const int a = 0, b = j, c = j + 1;
      const double area = edge(sx[a], sy[a], sx[b], sy[b], sx[c], sy[c]);
      if (std::abs(area) < 1e-300) continue;
      const double lo_x = std::min({sx[a], sx[b], sx[c]});
      const double hi_x = std::max({sx[a], sx[b], sx[c]});
      const double lo_y = std::min({sy[a], sy[b], sy[c]});
      const double hi_y = std::max({sy[a], sy[b], sy[c]});
      const int x0 = std::max(0, static_cast<int>(std::ceil(std::max(lo_x - 0.5, -1.0))));
      const int x1 = std::min(k.width - 1, static_cast<int>(std::floor(std::min(hi_x - 0.5, 1e9))));
      const int y0 = std::max(0, static_cast<int>(std::ceil(std::max(lo_y - 0.5, -1.0))));
      const int y1 = std::min(k.height - 1, static_cast<int>(std::floor(std::min(hi_y - 0.5, 1e9))));
      const double inv_area = 1.0 / area;
      for (int y = y0; y <= y1; ++y) {
        const double py = y + 0.5;
        for (int x = x0; x <= x1; ++x) {
          const double px = x + 0.5;
          const double w0 = edge(sx[b], sy[b], sx[c], sy[c], px, py) * inv_area;
          const double w1 = edge(sx[c], sy[c], sx[a], sy[a], px, py) * inv_area;
          const double w2 = 1.0 - w0 - w1;
          if (w0 < -1e-12 || w1 < -1e-12 || w2 < -1e-12) continue;
          const double z = 1.0 / (w0 * iz[a] + w1 * iz[b] + w2 * iz[c]);
          double& cur = zbuf.at(x, y);
          if (z < cur - 1e-12 || (std::abs(z - cur) <= 1e-12 && face < out.face.at(x, y))) {
            cur = z;
            out.face.at(x, y) = face;
            out.depth.at(x, y) = z;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace openable
