#include "openable/pipeline/experiments.hpp"

#include <cstdio>
#include <sstream>

#include <spdlog/spdlog.h>

#include "openable/ingest/mesh_io.hpp"

namespace openable {

namespace fs = std::filesystem;

namespace {

std::vector<Vec3> read_points(const fs::path& obj, const Se3Pose& to_world) {
  if (!fs::exists(obj)) return {};
  std::vector<Vec3> pts = read_mesh(obj).vertices;
  for (auto& p : pts) p = to_world.apply(p);
  return pts;
}

std::string strip_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return s.substr(0, s.size() - suffix.size());
  }
  return s;
}

}  // namespace

std::vector<PredictedPart> load_predictions(const fs::path& path) {
  std::vector<PredictedPart> out;
  const fs::path base = path.parent_path();
  if (path.extension() == ".urdf") {
    const ImportedUrdf u = import_urdf(path);
    for (const auto& j : u.movable) {
      PredictedPart p;
      p.id = strip_suffix(j.child, "_part");
      p.articulation = j.world;
      const Se3Pose link = u.link_poses.at(j.child);
      for (const auto& l : u.doc.links) {
        if (l.name != j.child) continue;
        for (const auto& v : l.visuals) {
          const auto pts = read_points(base / v.mesh, link * Se3Pose{rpy_to_matrix(v.rpy), v.xyz});
          p.points.insert(p.points.end(), pts.begin(), pts.end());
        }
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  for (const auto& r : load_scene_json(path)) {
    PredictedPart p;
    p.id = r.object_id;
    p.point_set = r.point_set;
    p.articulation = r.articulation;
    p.points = read_points(base / r.part_mesh, Se3Pose{});
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> apply_verdicts(const std::vector<VerdictRecord>& verdicts, EvalOptions& opts) {
  std::vector<std::string> notes;
  for (const auto& v : verdicts) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v.state);
    std::string line = v.object_id + ": " + std::string(to_string(v.verdict)) + " at state " + buf;
    if (v.verdict != Verdict::kOk) {
      opts.excluded.insert(v.object_id);
      line += " (excluded)";
    }
    notes.push_back(std::move(line));
  }
  return notes;
}

EvalJob eval_job_for_directory(const fs::path& dir) {
  EvalJob job;
  job.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
  job.ground_truth = dir / "ground_truth.json";
  if (!fs::exists(job.ground_truth)) throw InvalidInput(dir.string() + " has no ground_truth.json");
  for (const auto& c : {dir / "out" / "export" / "scene.json", dir / "export" / "scene.json", dir / "scene.json"}) {
    if (fs::exists(c)) {
      job.predictions = c;
      return job;
    }
  }
  throw InvalidInput(dir.string() + " has no exported scene.json");
}

SceneEval run_eval_job(const EvalJob& job, const EvalOptions& opts) {
  const auto preds = load_predictions(job.predictions);
  const GroundTruth gt = load_ground_truth(job.ground_truth);
  EvalOptions o = opts;
  bool have_sets = true;
  for (const auto& p : preds) have_sets = have_sets && !p.point_set.empty();
  if (!have_sets && o.match_radius <= 0.0) {
    o.match_radius = 0.005;
    spdlog::info("{}: predictions carry no vertex sets; matching by radius {}", job.name, o.match_radius);
  }
  std::vector<std::vector<Vec3>> gt_points;
  if (o.match_radius > 0.0) {
    fs::path mesh = job.scene_mesh;
    if (mesh.empty()) {
      if (gt.scene_mesh.empty()) throw InvalidInput(job.name + ": radius matching needs the scene mesh");
      mesh = job.ground_truth.parent_path() / gt.scene_mesh;
    }
    const TriMesh m = read_mesh(mesh);
    for (const auto& part : gt.parts) {
      std::vector<Vec3> pts;
      for (int i : part.vertex_indices) {
        if (i < 0 || i >= static_cast<int>(m.vertex_count())) {
          throw InvalidInput(job.name + ": ground-truth vertex index out of range for " + mesh.string());
        }
        pts.push_back(m.vertices[i]);
      }
      gt_points.push_back(std::move(pts));
    }
  } else {
    for (const auto& p : preds) {
      for (int i : p.point_set) {
        if (i < 0) throw InvalidInput(job.name + ": negative vertex index in prediction " + p.id);
      }
    }
  }
  return evaluate_scene(job.name, preds, gt, o, gt_points);
}

ExperimentScene experiment_scene(const std::string& name, const SyntheticScene& s) {
  return {name, s.scene, s.detections, s.ground_truth};
}

ExperimentScene load_experiment_scene(const fs::path& dir) {
  ExperimentScene e;
  e.name = dir.filename().string();
  e.input = load_scene(dir / "mesh.ply", dir / "frames.json");
  e.detections = load_detections(dir / "detections.json");
  validate_detections(e.detections, e.input.frames);
  e.ground_truth = load_ground_truth(dir / "ground_truth.json", static_cast<long long>(e.input.mesh.vertex_count()));
  return e;
}

std::vector<AblationRow> run_ablation(const std::vector<ExperimentScene>& scenes, const PipelineConfig& cfg,
                                      double tau) {
  std::vector<AblationRow> rows;
  for (bool refine : {false, true}) {
    PipelineConfig c = cfg;
    c.refinement = refine;
    EvalOptions eo = c.eval_options();
    eo.taus = {tau};
    std::vector<SceneEval> evals;
    for (const auto& s : scenes) {
      const StageOutputs out = process_scene(s.input, s.detections, c);
      evals.push_back(evaluate_scene(s.name, predictions(out.scene), s.ground_truth, eo));
    }
    const EvalReport r = pool(evals, eo);
    rows.push_back({refine ? "w/ refinement" : "w/o refinement", refine, r.per_tau.front()});
  }
  return rows;
}

std::string ablation_table(const std::vector<AblationRow>& rows, double tau) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Refinement ablation (tau = %.2f)\n%-18s %10s %10s %8s\n", tau, "Method", "MD (m)",
                "OE (deg)", "pairs");
  os << buf;
  const auto num = [](const std::optional<double>& v, const char* fmt) {
    if (!v) return std::string("n/a");
    char b[32];
    std::snprintf(b, sizeof b, fmt, *v);
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %10s %10s %8zu\n", r.label.c_str(),
                  num(r.metrics.joints.md_mean, "%.3f").c_str(), num(r.metrics.joints.oe_mean, "%.3f").c_str(),
                  r.metrics.joints.pairs);
    os << buf;
  }
  return os.str();
}

Json ablation_json(const std::vector<AblationRow>& rows, double tau) {
  Json a = Json::array();
  for (const auto& r : rows) {
    const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    a.push_back({{"label", r.label},
                 {"refinement", r.refinement},
                 {"md_mean", opt(r.metrics.joints.md_mean)},
                 {"oe_mean", opt(r.metrics.joints.oe_mean)},
                 {"pairs", r.metrics.joints.pairs},
                 {"tp", r.metrics.tp}});
  }
  return Json{{"tau", tau}, {"rows", a}};
}

}  // namespace openable
