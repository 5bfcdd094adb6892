#include "openable/texture/texture.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

#include "openable/core/geometry.hpp"

namespace openable {

namespace {

struct Chart {
  std::vector<int> faces;
  Vec3 normal = Vec3::UnitZ();
  Vec3 e1 = Vec3::UnitX(), e2 = Vec3::UnitY();
  Vec2 lo = Vec2::Zero(), hi = Vec2::Zero();
};

Vec2 flatten(const Chart& c, const Vec3& p) { return {c.e1.dot(p), c.e2.dot(p)}; }

// Plane basis from the area-weighted normal, rotated onto the 2D principal axes.
void fit_chart_frame(const TriMesh& mesh, Chart& c) {
  Vec3 n = Vec3::Zero();
  for (int f : c.faces) n += mesh.face_normal(f);
  if (n.norm() < 1e-15) n = mesh.face_normal(c.faces.front());
  if (n.norm() < 1e-15) n = Vec3::UnitZ();
  c.normal = n.normalized();
  const Vec3 a = any_orthogonal(UnitVec3::normalize(c.normal)).vec();
  const Vec3 b = c.normal.cross(a);
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  Vec2 mean = Vec2::Zero();
  std::vector<Vec2> pts;
  for (int f : c.faces) {
    for (int v : mesh.faces[f]) pts.emplace_back(a.dot(mesh.vertices[v]), b.dot(mesh.vertices[v]));
  }
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Vec2 major = es.eigenvectors().col(1);
  if (major.x() < 0 || (major.x() == 0 && major.y() < 0)) major = -major;
  c.e1 = major.x() * a + major.y() * b;
  c.e2 = c.normal.cross(c.e1);
  c.lo = Vec2::Constant(1e300);
  c.hi = Vec2::Constant(-1e300);
  for (int f : c.faces) {
    for (int v : mesh.faces[f]) {
      const Vec2 q = flatten(c, mesh.vertices[v]);
      c.lo = c.lo.cwiseMin(q);
      c.hi = c.hi.cwiseMax(q);
    }
  }
}

std::vector<Chart> grow_charts(const TriMesh& mesh, double max_angle_deg) {
  const std::size_t nf = mesh.face_count();
  std::vector<Vec3> normals(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const Vec3 n = mesh.face_normal(f);
    normals[f] = n.norm() > 0 ? Vec3(n.normalized()) : Vec3::Zero();
  }
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (std::size_t f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edge_faces[{a, b}].push_back(static_cast<int>(f));
    }
  }
  std::vector<std::vector<int>> nbr(nf);
  for (const auto& [e, fs] : edge_faces) {
    for (int x : fs) {
      for (int y : fs) {
        if (x != y) nbr[x].push_back(y);
      }
    }
  }
  for (auto& l : nbr) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  const double cos_max = std::cos(max_angle_deg * std::numbers::pi / 180.0);
  const auto compatible = [&](const Vec3& x, const Vec3& y) {
    return x.isZero() || y.isZero() || x.dot(y) >= cos_max;
  };
  std::vector<int> owner(nf, -1);
  std::vector<Chart> charts;
  for (std::size_t seed = 0; seed < nf; ++seed) {
    if (owner[seed] >= 0) continue;
    Chart c;
    const int id = static_cast<int>(charts.size());
    Vec3 sum = Vec3::Zero();
    std::deque<int> queue{static_cast<int>(seed)};
    owner[seed] = id;
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      c.faces.push_back(f);
      sum += mesh.face_normal(f);
      const Vec3 mean = sum.norm() > 0 ? Vec3(sum.normalized()) : Vec3::Zero();
      for (int g : nbr[f]) {
        if (owner[g] >= 0) continue;
        if (!compatible(normals[f], normals[g]) || !compatible(mean, normals[g])) continue;
        owner[g] = id;
        queue.push_back(g);
      }
    }
    std::sort(c.faces.begin(), c.faces.end());
    charts.push_back(std::move(c));
  }
  for (auto& c : charts) fit_chart_frame(mesh, c);
  return charts;
}

std::pair<Chart, Chart> split_chart(const TriMesh& mesh, const Chart& c) {
  std::vector<std::pair<double, int>> keyed;
  for (int f : c.faces) {
    Vec3 centroid = Vec3::Zero();
    for (int v : mesh.faces[f]) centroid += mesh.vertices[v];
    keyed.emplace_back(c.e1.dot(centroid / 3.0), f);
  }
  std::sort(keyed.begin(), keyed.end());
  Chart a, b;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    (i < keyed.size() / 2 ? a : b).faces.push_back(keyed[i].second);
  }
  std::sort(a.faces.begin(), a.faces.end());
  std::sort(b.faces.begin(), b.faces.end());
  fit_chart_frame(mesh, a);
  fit_chart_frame(mesh, b);
  return {a, b};
}

int texels(double meters, double scale) { return static_cast<int>(std::lround(meters * scale)) + 1; }

std::optional<std::vector<ChartRect>> pack(const std::vector<Chart>& charts, double scale, int size, int gutter) {
  std::vector<ChartRect> rects(charts.size());
  std::vector<int> order(charts.size());
  for (std::size_t i = 0; i < charts.size(); ++i) {
    order[i] = static_cast<int>(i);
    const Vec2 ext = charts[i].hi - charts[i].lo;
    rects[i].w = texels(ext.x(), scale);
    rects[i].h = texels(ext.y(), scale);
    if (rects[i].w > size || rects[i].h > size) return std::nullopt;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (rects[a].h != rects[b].h) return rects[a].h > rects[b].h;
    return rects[a].w > rects[b].w;
  });
  int x = 0, y = 0, shelf = 0;
  for (int i : order) {
    if (x > 0 && x + rects[i].w > size) {
      y += shelf + gutter;
      x = 0;
      shelf = 0;
    }
    if (y + rects[i].h > size) return std::nullopt;
    rects[i].x = x;
    rects[i].y = y;
    x += rects[i].w + gutter;
    shelf = std::max(shelf, rects[i].h);
  }
  return rects;
}

}  // namespace

UvLayout unwrap(const TriMesh& mesh, int texture_size, const UnwrapOptions& opts) {
  if (texture_size < 64 || (texture_size & (texture_size - 1)) != 0) {
    throw InvalidInput("texture size must be a power of two >= 64");
  }
  UvLayout out;
  out.size = texture_size;
  if (mesh.empty()) return out;
  std::vector<Chart> charts = grow_charts(mesh, opts.max_angle_deg);

  double scale = opts.texels_per_meter;
  std::optional<std::vector<ChartRect>> rects;
  if (scale > 0) {
    // split oversized charts along their major axis
    std::vector<std::pair<Chart, int>> work;
    for (auto& c : charts) work.emplace_back(std::move(c), 0);
    charts.clear();
    while (!work.empty()) {
      auto [c, depth] = std::move(work.back());
      work.pop_back();
      const Vec2 ext = c.hi - c.lo;
      const bool too_big = texels(ext.x(), scale) > texture_size || texels(ext.y(), scale) > texture_size;
      if (!too_big) {
        charts.push_back(std::move(c));
        continue;
      }
      if (depth >= opts.max_split_depth || c.faces.size() < 2) {
        throw UnwrapError("chart does not fit the atlas after " + std::to_string(depth) + " splits");
      }
      auto [a, b] = split_chart(mesh, c);
      work.emplace_back(std::move(b), depth + 1);
      work.emplace_back(std::move(a), depth + 1);
    }
    std::sort(charts.begin(), charts.end(), [](const Chart& a, const Chart& b) { return a.faces < b.faces; });
    rects = pack(charts, scale, texture_size, opts.gutter);
    if (!rects) throw UnwrapError("charts do not fit the atlas at the requested density");
  } else {
    double area = 0, longest = 0;
    for (const auto& c : charts) {
      const Vec2 ext = c.hi - c.lo;
      area += (ext.x() + 1e-3) * (ext.y() + 1e-3);
      longest = std::max({longest, ext.x(), ext.y()});
    }
    const double n = static_cast<double>(texture_size);
    scale = std::sqrt(0.6 * n * n / area);
    if (longest > 0) scale = std::min(scale, (n - 1.0) / longest);
    for (int attempt = 0; attempt < 400 && !(rects = pack(charts, scale, texture_size, opts.gutter)); ++attempt) {
      scale *= 0.97;
    }
    if (!rects) throw UnwrapError("charts do not fit the atlas");
  }
  out.texels_per_meter = scale;
  out.charts = *rects;
  out.face_uv.assign(mesh.face_count(), {0, 0, 0});
  out.face_chart.assign(mesh.face_count(), -1);
  std::vector<int> slot(mesh.vertex_count(), -1);
  for (std::size_t ci = 0; ci < charts.size(); ++ci) {
    const Chart& c = charts[ci];
    const ChartRect& r = out.charts[ci];
    std::vector<int> touched;
    for (int f : c.faces) {
      out.face_chart[f] = static_cast<int>(ci);
      for (int k = 0; k < 3; ++k) {
        const int v = mesh.faces[f][k];
        if (slot[v] < 0) {
          const Vec2 q = (flatten(c, mesh.vertices[v]) - c.lo) * scale;
          const double px = r.x + 0.5 + std::min<double>(std::round(q.x()), r.w - 1);
          const double py = r.y + 0.5 + std::min<double>(std::round(q.y()), r.h - 1);
          slot[v] = static_cast<int>(out.uvs.size());
          out.uvs.emplace_back(px / texture_size, py / texture_size);
          touched.push_back(v);
        }
        out.face_uv[f][k] = slot[v];
      }
    }
    for (int v : touched) slot[v] = -1;
  }
  return out;
}

TexturedMesh bake(const TriMesh& mesh, const UvLayout& layout) {
  if (!mesh.has_colors()) throw InvalidInput("bake needs vertex colors");
  const int n = layout.size;
  TexturedMesh t;
  t.mesh = mesh;
  t.layout = layout;
  t.texture = Raster<Rgb>(n, n, Rgb{0.0f, 0.0f, 0.0f});
  t.valid = Mask(n, n, 0);
  t.chart_id = Raster<int>(n, n, -1);
  for (std::size_t ci = 0; ci < layout.charts.size(); ++ci) {
    const auto& r = layout.charts[ci];
    for (int y = r.y; y < r.y + r.h; ++y) {
      for (int x = r.x; x < r.x + r.w; ++x) t.chart_id.at(x, y) = static_cast<int>(ci);
    }
  }
  const auto cross = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  };
  const auto put = [&](int x, int y, const Vec3& c) {
    if (!t.valid.contains(x, y) || t.valid.at(x, y)) return;
    t.texture.at(x, y) = {static_cast<float>(c.x()), static_cast<float>(c.y()), static_cast<float>(c.z())};
    t.valid.at(x, y) = 1;
  };
  const auto color = [&](int v) {
    const Rgb& c = mesh.colors[v];
    return Vec3(c[0], c[1], c[2]);
  };
  // vertex texels first so every vertex reads back its own color
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 p = layout.uvs[layout.face_uv[f][k]] * n;
      put(static_cast<int>(std::floor(p.x())), static_cast<int>(std::floor(p.y())), color(mesh.faces[f][k]));
    }
  }
  for (std::size_t f = 0; f < mesh.face_count(); ++f) {
    const Vec2 p0 = layout.uvs[layout.face_uv[f][0]] * n;
    const Vec2 p1 = layout.uvs[layout.face_uv[f][1]] * n;
    const Vec2 p2 = layout.uvs[layout.face_uv[f][2]] * n;
    const double d = cross(p0, p1, p2);
    if (std::abs(d) < 1e-12) continue;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p0.x(), p1.x(), p2.x()}))));
    const int x1 = std::min(n - 1, static_cast<int>(std::floor(std::max({p0.x(), p1.x(), p2.x()}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p0.y(), p1.y(), p2.y()}))));
    const int y1 = std::min(n - 1, static_cast<int>(std::floor(std::max({p0.y(), p1.y(), p2.y()}))));
    const Vec3 c0 = color(mesh.faces[f][0]), c1 = color(mesh.faces[f][1]), c2 = color(mesh.faces[f][2]);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 c(x + 0.5, y + 0.5);
        const double w0 = cross(p1, p2, c) / d, w1 = cross(p2, p0, c) / d, w2 = cross(p0, p1, c) / d;
        if (w0 < -1e-9 || w1 < -1e-9 || w2 < -1e-9) continue;
        put(x, y, w0 * c0 + w1 * c1 + w2 * c2);
      }
    }
  }
  return t;
}

TexturedMesh repair_and_smooth(TexturedMesh tex, int dilation_steps, double blur_radius) {
  if (dilation_steps < 0) throw InvalidInput("dilation steps must be non-negative");
  const int n = tex.texture.width();
  Raster<int> dist(n, n, -1);
  std::deque<std::pair<int, int>> queue;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (tex.valid.at(x, y)) {
        dist.at(x, y) = 0;
        queue.emplace_back(x, y);
      }
    }
  }
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  while (!queue.empty()) {
    const auto [x, y] = queue.front();
    queue.pop_front();
    if (dist.at(x, y) >= dilation_steps) continue;
    for (int k = 0; k < 4; ++k) {
      const int nx = x + dx[k], ny = y + dy[k];
      if (!dist.contains(nx, ny) || dist.at(nx, ny) >= 0) continue;
      if (tex.chart_id.at(nx, ny) < 0 || tex.chart_id.at(nx, ny) != tex.chart_id.at(x, y)) continue;
      dist.at(nx, ny) = dist.at(x, y) + 1;
      tex.texture.at(nx, ny) = tex.texture.at(x, y);
      tex.valid.at(nx, ny) = 1;
      queue.emplace_back(nx, ny);
    }
  }
  if (blur_radius <= 0) return tex;
  const int r = static_cast<int>(std::ceil(2.0 * blur_radius));
  std::vector<double> w(2 * r + 1);
  for (int i = -r; i <= r; ++i) w[i + r] = std::exp(-0.5 * i * i / (blur_radius * blur_radius));
  Raster<Rgb> out = tex.texture;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (!tex.valid.at(x, y)) continue;
      const int id = tex.chart_id.at(x, y);
      double acc[3] = {0, 0, 0}, total = 0;
      for (int j = -r; j <= r; ++j) {
        for (int i = -r; i <= r; ++i) {
          const int sx = x + i, sy = y + j;
          if (!tex.valid.contains(sx, sy) || !tex.valid.at(sx, sy) || tex.chart_id.at(sx, sy) != id) continue;
          const double k = w[i + r] * w[j + r];
          const Rgb& c = tex.texture.at(sx, sy);
          acc[0] += k * c[0];
          acc[1] += k * c[1];
          acc[2] += k * c[2];
          total += k;
        }
      }
      out.at(x, y) = {static_cast<float>(acc[0] / total), static_cast<float>(acc[1] / total),
                      static_cast<float>(acc[2] / total)};
    }
  }
  tex.texture = std::move(out);
  return tex;
}

TexturedMesh texture_mesh(const TriMesh& mesh, int texture_size, const UnwrapOptions& opts, int dilation_steps,
                          double blur_radius) {
  TriMesh colored = mesh;
  colored.ensure_colors();
  return repair_and_smooth(bake(colored, unwrap(colored, texture_size, opts)), dilation_steps, blur_radius);
}

Rgb8Image to_rgb8(const Raster<Rgb>& texture) {
  Rgb8Image img;
  img.width = texture.width();
  img.height = texture.height();
  img.pixels.resize(3 * texture.size());
  for (std::size_t i = 0; i < texture.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      img.pixels[3 * i + k] =
          static_cast<std::uint8_t>(std::lround(std::clamp(texture[i][k], 0.0f, 1.0f) * 255.0f));
    }
  }
  return img;
}

}  // namespace openable
