#include "openable/lift/fuse.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "openable/core/json_util.hpp"
#include "openable/lift/louvain.hpp"
#include "openable/lift/mask_ops.hpp"

namespace openable {

MaskProjection project_mask(const FaceVisibilityMap& vis, const Mask& mask, int min_pixels) {
  if (mask.width() != vis.face.width() || mask.height() != vis.face.height()) {
    throw InvalidInput("mask size differs from the visibility raster of frame " + vis.frame_id);
  }
  MaskProjection out;
  out.frame_id = vis.frame_id;
  const Mask filled = fill_holes(mask);
  std::map<int, int> support;
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i] || vis.face[i] < 0) continue;
    ++support[vis.face[i]];
  }
  for (const auto& [face, n] : support) {
    if (n >= min_pixels) {
      out.faces.push_back(face);
      out.pixel_count += static_cast<std::size_t>(n);
    }
  }
  return out;
}

double sorted_set_iou(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<FusedInstance> fuse_instances(std::vector<MaskProjection> projections,
                                          const TriMesh& mesh, const FuseOptions& opts) {
  if (!(opts.iou_threshold > 0.0 && opts.iou_threshold <= 1.0)) {
    throw InvalidInput("fuse iou threshold must lie in (0, 1]");
  }
  if (opts.top_k < 1) throw InvalidInput("top_k must be at least 1");
  std::sort(projections.begin(), projections.end(), [](const auto& a, const auto& b) {
    return std::tie(a.frame_id, a.detection_index) < std::tie(b.frame_id, b.detection_index);
  });
  std::erase_if(projections, [](const MaskProjection& p) { return p.faces.empty(); });

  std::vector<int> nodes;
  for (const auto& p : projections) nodes.insert(nodes.end(), p.faces.begin(), p.faces.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (nodes.empty()) return {};
  std::unordered_map<int, int> node_of;
  node_of.reserve(nodes.size() * 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) node_of[nodes[i]] = static_cast<int>(i);

  std::unordered_map<std::uint64_t, double> weights;
  for (const auto& p : projections) {
    std::vector<int> ids;
    ids.reserve(p.faces.size());
    for (int f : p.faces) ids.push_back(node_of.at(f));
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) weights[pair_key(ids[a], ids[b])] += 1.0;
    }
  }
  if (opts.adjacency_bonus > 0.0) {
    std::unordered_map<std::uint64_t, std::vector<int>> edge_faces;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const auto& t = mesh.faces.at(static_cast<std::size_t>(nodes[n]));
      for (int k = 0; k < 3; ++k) edge_faces[pair_key(t[k], t[(k + 1) % 3])].push_back(static_cast<int>(n));
    }
    std::vector<std::uint64_t> adjacent;
    for (const auto& [edge, fs] : edge_faces) {
      for (std::size_t a = 0; a < fs.size(); ++a) {
        for (std::size_t b = a + 1; b < fs.size(); ++b) adjacent.push_back(pair_key(fs[a], fs[b]));
      }
    }
    std::sort(adjacent.begin(), adjacent.end());
    adjacent.erase(std::unique(adjacent.begin(), adjacent.end()), adjacent.end());
    for (auto key : adjacent) weights[key] += opts.adjacency_bonus;
  }

  std::vector<std::pair<std::uint64_t, double>> sorted(weights.begin(), weights.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedGraph g;
  g.adj.resize(nodes.size());
  for (const auto& [key, w] : sorted) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    g.adj[a].push_back({b, w});
  }
  for (const auto& [key, w] : sorted) {
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    g.adj[b].push_back({a, w});
  }
  for (auto& list : g.adj) {
    std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) { return x.to < y.to; });
  }

  LouvainOptions lo;
  lo.resolution = opts.resolution;
  const std::vector<int> labels = louvain(g, lo);
  const int count = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<int>> communities(static_cast<std::size_t>(count));
  for (std::size_t n = 0; n < nodes.size(); ++n) communities[labels[n]].push_back(nodes[n]);

  std::vector<FusedInstance> out;
  for (auto& faces : communities) {
    FusedInstance inst;
    inst.faces = std::move(faces);
    for (const auto& p : projections) {
      const double iou = sorted_set_iou(p.faces, inst.faces);
      if (iou >= opts.iou_threshold) inst.views.push_back({p.frame_id, p.detection_index, iou});
    }
    if (inst.views.empty()) continue;
    std::stable_sort(inst.views.begin(), inst.views.end(),
                     [](const auto& a, const auto& b) { return a.iou > b.iou; });
    if (static_cast<int>(inst.views.size()) > opts.top_k) inst.views.resize(static_cast<std::size_t>(opts.top_k));
    char id[32];
    std::snprintf(id, sizeof id, "inst_%03zu", out.size());
    inst.instance_id = id;
    out.push_back(std::move(inst));
  }
  spdlog::debug("fused {} projections over {} faces into {} instances", projections.size(),
                nodes.size(), out.size());
  return out;
}

LiftResult lift_detections(const TriMesh& mesh, const std::vector<CalibratedFrame>& frames,
                           const std::vector<DetectionRecord>& detections,
                           const FuseOptions& opts, int min_pixels) {
  LiftResult res;
  res.visibility.reserve(frames.size());
  for (const auto& f : frames) res.visibility.push_back(rasterize_view(mesh, f));
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto& d = detections[i];
    if (d.source != DetectionSource::kGrounding) continue;
    const auto it = std::find_if(res.visibility.begin(), res.visibility.end(),
                                 [&](const auto& v) { return v.frame_id == d.frame_id; });
    if (it == res.visibility.end()) {
      throw FormatError("detection " + std::to_string(i) + " references unknown frame " + d.frame_id,
                        static_cast<int>(i));
    }
    MaskProjection p = project_mask(*it, d.mask, min_pixels);
    p.detection_index = static_cast<int>(i);
    if (!p.faces.empty()) res.projections.push_back(std::move(p));
  }
  res.instances = fuse_instances(res.projections, mesh, opts);
  return res;
}

void write_lift_debug(const std::filesystem::path& path, const std::vector<FusedInstance>& instances) {
  Json arr = Json::array();
  for (const auto& inst : instances) {
    Json views = Json::array();
    for (const auto& v : inst.views) {
      views.push_back({{"frame_id", v.frame_id}, {"detection_index", v.detection_index}, {"iou", v.iou}});
    }
    arr.push_back({{"instance_id", inst.instance_id}, {"faces", inst.faces}, {"views", views}});
  }
  write_json_file(path, Json{{"instances", arr}});
}

void write_seed_pixels(const std::filesystem::path& path, const std::vector<FusedInstance>& instances,
                       const std::vector<DetectionRecord>& detections) {
  Json arr = Json::array();
  for (const auto& inst : instances) {
    for (const auto& v : inst.views) {
      const auto c = mask_centroid(detections.at(static_cast<std::size_t>(v.detection_index)).mask);
      if (!c) continue;
      arr.push_back({{"instance_id", inst.instance_id},
                     {"frame_id", v.frame_id},
                     {"detection_index", v.detection_index},
                     {"pixel", {c->first, c->second}}});
    }
  }
  write_json_file(path, Json{{"seeds", arr}});
}

}  // namespace openable
