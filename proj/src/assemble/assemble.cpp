#include "openable/assemble/assemble.hpp"

#include <algorithm>
#include <numeric>

#include <spdlog/spdlog.h>

#include "openable/core/geometry.hpp"
#include "openable/lift/fuse.hpp"

namespace openable {

std::vector<int> InteractiveObject::point_set() const {
  std::vector<int> s = part.candidate.source_vertices;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double pointset_iou(const std::vector<int>& a, const std::vector<int>& b) { return sorted_set_iou(a, b); }

double pointset_iou(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double match_radius) {
  if (match_radius < 0) throw InvalidInput("match radius must be non-negative");
  if (a.empty() && b.empty()) return 0.0;
  struct Pair {
    double d;
    int i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = (a[i] - b[j]).norm();
      if (d <= match_radius) pairs.push_back({d, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.d, x.i, x.j) < std::tie(y.d, y.i, y.j);
  });
  std::vector<bool> ua(a.size()), ub(b.size());
  std::size_t matched = 0;
  for (const auto& p : pairs) {
    if (ua[p.i] || ub[p.j]) continue;
    ua[p.i] = ub[p.j] = true;
    ++matched;
  }
  return static_cast<double>(matched) / static_cast<double>(a.size() + b.size() - matched);
}

namespace {

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// First subset (in DFS order) of cand with size ≤ limit whose union reaches tau against target.
bool explain(const std::vector<int>& target, const std::vector<const std::vector<int>*>& cand,
             std::size_t start, int limit, const std::vector<int>& acc, double tau,
             std::vector<std::size_t>& chosen, double& iou) {
  for (std::size_t k = start; k < cand.size(); ++k) {
    const std::vector<int> u = set_union(acc, *cand[k]);
    chosen.push_back(k);
    const double v = sorted_set_iou(u, target);
    if (v >= tau) {
      iou = v;
      return true;
    }
    if (limit > 1 && explain(target, cand, k + 1, limit - 1, u, tau, chosen, iou)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace

SetDedup dedup_sets(const std::vector<std::vector<int>>& sets, const std::vector<std::string>& ids,
                    const DedupOptions& opts) {
  if (!(opts.tau_low > 0 && opts.tau_low < opts.tau_dup && opts.tau_dup <= 1) || opts.max_subset < 1) {
    throw InvalidInput("dedup thresholds must satisfy 0 < tau_low < tau_dup <= 1 and max_subset >= 1");
  }
  std::vector<int> order(sets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (sets[a].size() != sets[b].size()) return sets[a].size() > sets[b].size();
    return ids[a] < ids[b];
  });

  SetDedup out;
  std::vector<int> survivors;
  for (int i : order) {
    bool dup = false;
    for (int k : survivors) {
      const double v = sorted_set_iou(sets[i], sets[k]);
      if (v >= opts.tau_dup) {
        out.pruned.push_back({ids[i], "pairwise", {ids[k]}, v});
        dup = true;
        break;
      }
    }
    if (!dup) survivors.push_back(i);
  }

  std::vector<bool> removed(survivors.size(), false);
  for (std::size_t a = 0; a < survivors.size(); ++a) {
    const auto& target = sets[survivors[a]];
    std::vector<const std::vector<int>*> cand;
    std::vector<int> cand_idx;
    for (std::size_t b = a + 1; b < survivors.size(); ++b) {
      if (removed[b]) continue;
      if (sorted_set_iou(target, sets[survivors[b]]) >= opts.tau_low) {
        cand.push_back(&sets[survivors[b]]);
        cand_idx.push_back(survivors[b]);
      }
    }
    if (cand.size() > static_cast<std::size_t>(opts.max_subset)) {
      spdlog::debug("{} has {} subdivision candidates; subsets capped at {}", ids[survivors[a]], cand.size(),
                   opts.max_subset);
    }
    std::vector<std::size_t> chosen;
    double iou = 0;
    if (!cand.empty() && explain(target, cand, 0, opts.max_subset, {}, opts.tau_dup, chosen, iou)) {
      removed[a] = true;
      PruneRecord r{ids[survivors[a]], "subdivision", {}, iou};
      for (auto k : chosen) r.explained_by.push_back(ids[cand_idx[k]]);
      out.pruned.push_back(std::move(r));
    }
  }
  for (std::size_t a = 0; a < survivors.size(); ++a) {
    if (!removed[a]) out.kept.push_back(survivors[a]);
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

DedupResult dedup(std::vector<InteractiveObject> objects, const DedupOptions& opts) {
  std::sort(objects.begin(), objects.end(),
            [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
  std::vector<std::vector<int>> sets;
  std::vector<std::string> ids;
  for (const auto& o : objects) {
    sets.push_back(o.point_set());
    ids.push_back(o.object_id);
  }
  SetDedup d = dedup_sets(sets, ids, opts);
  DedupResult out;
  out.pruned = std::move(d.pruned);
  for (int k : d.kept) out.kept.push_back(std::move(objects[k]));
  return out;
}

TriMesh carve_background(const TriMesh& scene, const std::vector<InteractiveObject>& objects,
                         double margin, CarveRecord* record) {
  if (margin < 0) throw InvalidInput("carve margin must be non-negative");
  std::vector<bool> keep(scene.vertex_count(), true);
  for (std::size_t v = 0; v < scene.vertex_count(); ++v) {
    for (const auto& o : objects) {
      if (point_in_obb(scene.vertices[v], o.part.obb, margin)) {
        keep[v] = false;
        break;
      }
    }
  }
  SubMesh sub = filter_vertices(scene, keep);
  if (record) {
    record->removed_vertices.clear();
    record->removed_faces.clear();
    for (std::size_t v = 0; v < keep.size(); ++v) {
      if (!keep[v]) record->removed_vertices.push_back(static_cast<int>(v));
    }
    std::vector<bool> kept_face(scene.face_count(), false);
    for (int f : sub.source_faces) kept_face[f] = true;
    for (std::size_t f = 0; f < kept_face.size(); ++f) {
      if (!kept_face[f]) record->removed_faces.push_back(static_cast<int>(f));
    }
  }
  return std::move(sub.mesh);
}

InteractiveScene assemble_scene(TriMesh background, std::vector<InteractiveObject> objects, double tau_dup,
                                std::vector<PruneRecord> pruned, CarveRecord carved) {
  std::sort(objects.begin(), objects.end(),
            [](const auto& a, const auto& b) { return a.object_id < b.object_id; });
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (i > 0 && objects[i].object_id == objects[i - 1].object_id) {
      throw AssemblyError("duplicate object id " + objects[i].object_id);
    }
    const auto si = objects[i].point_set();
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      const double v = pointset_iou(si, objects[j].point_set());
      if (v >= tau_dup) {
        throw AssemblyError("objects " + objects[i].object_id + " and " + objects[j].object_id +
                            " overlap with point IoU " + std::to_string(v));
      }
    }
    for (const auto& p : background.vertices) {
      if (point_in_obb(p, objects[i].part.obb, 0.0)) {
        throw AssemblyError("background vertex inside the part box of " + objects[i].object_id);
      }
    }
  }
  InteractiveScene s;
  s.background = std::move(background);
  s.objects = std::move(objects);
  s.pruned = std::move(pruned);
  s.carved = std::move(carved);
  return s;
}

Json provenance_json(const InteractiveScene& scene) {
  Json pruned = Json::array();
  for (const auto& p : scene.pruned) {
    pruned.push_back({{"object_id", p.object_id}, {"stage", p.stage}, {"explained_by", p.explained_by},
                      {"iou", p.iou}});
  }
  Json objs = Json::array();
  for (const auto& o : scene.objects) objs.push_back(o.object_id);
  return Json{{"kept", objs},
              {"pruned", pruned},
              {"carved_vertices", scene.carved.removed_vertices},
              {"carved_faces", scene.carved.removed_faces.size()}};
}

}  // namespace openable
