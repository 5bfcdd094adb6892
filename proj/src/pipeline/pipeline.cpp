#include "openable/pipeline/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>

#include <spdlog/spdlog.h>

#include "openable/articulate/articulate.hpp"

namespace openable {

namespace fs = std::filesystem;

// ---- stages

std::vector<FusedInstance> stage_lift(const SceneInput& in, const std::vector<DetectionRecord>& dets,
                                      const PipelineConfig& cfg) {
  return lift_detections(in.mesh, in.frames, dets, cfg.fuse, cfg.min_face_pixels).instances;
}

std::vector<PartCandidate> stage_part(const std::vector<FusedInstance>& instances, const SceneInput& in,
                                      const PipelineConfig& cfg, std::vector<Rejection>& rejected) {
  std::vector<PartCandidate> out;
  for (const auto& inst : instances) {
    std::string why;
    if (auto c = extract_part(inst, in.mesh, in.frames, cfg.part, &why)) {
      out.push_back(std::move(*c));
    } else {
      rejected.push_back({inst.instance_id, "part", why});
    }
  }
  return out;
}

std::vector<ValidatedPart> stage_articulate(const std::vector<PartCandidate>& candidates, const SceneInput& in,
                                            const std::vector<DetectionRecord>& dets, const PipelineConfig& cfg,
                                            std::vector<Rejection>& rejected) {
  std::vector<ValidatedPart> out;
  for (const auto& c : candidates) {
    const auto hint = filter_candidate(c, dets, in.frames, cfg.candidate_iou_threshold);
    if (!hint) {
      spdlog::info("instance {} has no matching joint hint; discarded", c.instance_id);
      rejected.push_back({c.instance_id, "articulate", "no OPD mask reaches the IoU threshold"});
      continue;
    }
    ValidatedPart p = refine_articulation(c, hint->articulation, cfg.refinement);
    p.hint_iou = hint->iou;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<InteractiveObject> stage_cavity(const std::vector<ValidatedPart>& parts, const SceneInput& in,
                                            const std::vector<DetectionRecord>& dets, const PipelineConfig& cfg) {
  const CavityOptions opts = cfg.cavity_options();
  const Obb bounds = mesh_bounds(in.mesh);
  std::vector<InteractiveObject> out;
  for (const auto& p : parts) {
    std::optional<double> d_image;
    const auto& view = p.candidate.views.front();
    const CalibratedFrame* frame = find_frame(in.frames, view.frame_id);
    if (frame && view.detection_index >= 0 && view.detection_index < static_cast<int>(dets.size())) {
      d_image = depth_image_bound(p, *frame, dets[view.detection_index].mask, opts.ring_px);
    }
    std::vector<bool> skip(in.mesh.face_count(), false);
    for (int f : p.candidate.source_faces) skip[f] = true;
    const auto d_hit = depth_hit_bound(p, in.mesh, skip, opts);
    const double d_mesh = depth_mesh_bound(p, bounds);
    InteractiveObject o;
    o.object_id = p.candidate.instance_id;
    o.part = p;
    o.inner_box = build_inner_box(p, d_image, d_hit, d_mesh, opts);
    spdlog::debug("{}: d_image {} d_hit {} d_mesh {} -> {}", o.object_id, d_image.value_or(-1), d_hit.value_or(-1),
                  d_mesh, o.inner_box.depth);
    out.push_back(std::move(o));
  }
  return out;
}

InteractiveScene stage_assemble(const std::vector<InteractiveObject>& objects, const SceneInput& in,
                                const PipelineConfig& cfg) {
  DedupResult d = dedup(objects, cfg.dedup);
  CarveRecord carved;
  TriMesh background = carve_background(in.mesh, d.kept, cfg.carve_margin, &carved);
  return assemble_scene(std::move(background), std::move(d.kept), cfg.dedup.tau_dup, std::move(d.pruned),
                        std::move(carved));
}

StageOutputs process_scene(const SceneInput& in, const std::vector<DetectionRecord>& dets,
                           const PipelineConfig& cfg) {
  StageOutputs s;
  s.instances = stage_lift(in, dets, cfg);
  s.candidates = stage_part(s.instances, in, cfg, s.rejected);
  s.parts = stage_articulate(s.candidates, in, dets, cfg, s.rejected);
  s.objects = stage_cavity(s.parts, in, dets, cfg);
  s.scene = stage_assemble(s.objects, in, cfg);
  return s;
}

std::vector<PredictedPart> predictions(const InteractiveScene& scene) {
  std::vector<PredictedPart> out;
  for (const auto& o : scene.objects) {
    PredictedPart p;
    p.id = o.object_id;
    p.point_set = o.point_set();
    p.points = o.part.candidate.part_mesh.vertices;
    p.articulation = o.part.articulation;
    out.push_back(std::move(p));
  }
  return out;
}

// ---- checkpoint encodings

Json to_json(const FusedInstance& i) {
  Json views = Json::array();
  for (const auto& v : i.views) {
    views.push_back({{"frame_id", v.frame_id}, {"detection_index", v.detection_index}, {"iou", v.iou}});
  }
  return Json{{"instance_id", i.instance_id}, {"faces", i.faces}, {"views", views}};
}

FusedInstance fused_instance_from_json(const Json& j) {
  FusedInstance i;
  i.instance_id = j.at("instance_id").get<std::string>();
  i.faces = j.at("faces").get<std::vector<int>>();
  for (const auto& v : j.at("views")) {
    i.views.push_back({v.at("frame_id").get<std::string>(), v.at("detection_index").get<int>(),
                       v.at("iou").get<double>()});
  }
  return i;
}

Json to_json(const PartCandidate& c) {
  FusedInstance views{c.instance_id, {}, c.views};
  return Json{{"instance_id", c.instance_id},
              {"part_mesh", to_json(c.part_mesh)},
              {"source_vertices", c.source_vertices},
              {"source_faces", c.source_faces},
              {"front_plane", to_json(c.front_plane)},
              {"views", to_json(views).at("views")}};
}

PartCandidate part_candidate_from_json(const Json& j) {
  PartCandidate c;
  c.instance_id = j.at("instance_id").get<std::string>();
  c.part_mesh = mesh_from_json(j.at("part_mesh"));
  c.source_vertices = j.at("source_vertices").get<std::vector<int>>();
  c.source_faces = j.at("source_faces").get<std::vector<int>>();
  c.front_plane = plane_from_json(j.at("front_plane"));
  c.views = fused_instance_from_json(Json{{"instance_id", ""}, {"faces", Json::array()}, {"views", j.at("views")}})
                .views;
  return c;
}

Json to_json(const ValidatedPart& p) {
  return Json{{"candidate", to_json(p.candidate)},
              {"articulation", to_json(p.articulation)},
              {"initial", to_json(p.initial)},
              {"obb", to_json(p.obb)},
              {"front_normal", to_json(p.front_normal.vec())},
              {"hint_iou", p.hint_iou}};
}

ValidatedPart validated_part_from_json(const Json& j) {
  ValidatedPart p;
  p.candidate = part_candidate_from_json(j.at("candidate"));
  p.articulation = articulation_from_json(j.at("articulation"));
  p.initial = articulation_from_json(j.at("initial"));
  p.obb = obb_from_json(j.at("obb"));
  p.front_normal = UnitVec3::normalize(vec3_from_json(j.at("front_normal")));
  p.hint_iou = j.at("hint_iou").get<double>();
  return p;
}

Json to_json(const InteractiveObject& o) {
  return Json{{"object_id", o.object_id},
              {"part", to_json(o.part)},
              {"inner_box",
               {{"mesh", to_json(o.inner_box.mesh)},
                {"depth", o.inner_box.depth},
                {"source", std::string(to_string(o.inner_box.source))}}}};
}

InteractiveObject interactive_object_from_json(const Json& j) {
  InteractiveObject o;
  o.object_id = j.at("object_id").get<std::string>();
  o.part = validated_part_from_json(j.at("part"));
  const Json& b = j.at("inner_box");
  o.inner_box.mesh = mesh_from_json(b.at("mesh"));
  o.inner_box.depth = b.at("depth").get<double>();
  o.inner_box.source = depth_source_from_string(b.at("source").get<std::string>());
  return o;
}

Json to_json(const InteractiveScene& s) {
  Json objects = Json::array();
  for (const auto& o : s.objects) objects.push_back(to_json(o));
  Json pruned = Json::array();
  for (const auto& p : s.pruned) {
    pruned.push_back({{"object_id", p.object_id}, {"stage", p.stage}, {"explained_by", p.explained_by},
                      {"iou", p.iou}});
  }
  return Json{{"background", to_json(s.background)},
              {"objects", objects},
              {"pruned", pruned},
              {"carved_vertices", s.carved.removed_vertices},
              {"carved_faces", s.carved.removed_faces}};
}

InteractiveScene interactive_scene_from_json(const Json& j) {
  InteractiveScene s;
  s.background = mesh_from_json(j.at("background"));
  for (const auto& o : j.at("objects")) s.objects.push_back(interactive_object_from_json(o));
  for (const auto& p : j.at("pruned")) {
    s.pruned.push_back({p.at("object_id").get<std::string>(), p.at("stage").get<std::string>(),
                        p.at("explained_by").get<std::vector<std::string>>(), p.at("iou").get<double>()});
  }
  s.carved.removed_vertices = j.at("carved_vertices").get<std::vector<int>>();
  s.carved.removed_faces = j.at("carved_faces").get<std::vector<int>>();
  return s;
}

// ---- driver

DirectoryLock::DirectoryLock(const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path p = dir / ".lock";
  fd_ = ::open(p.c_str(), O_CREAT | O_RDWR, 0644);
  if (fd_ < 0) throw InvalidInput("cannot create lock file " + p.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw InvalidInput(dir.string() + " is in use by another process");
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

namespace {

constexpr int kCheckpointVersion = 1;
const std::vector<std::string> kStages{"ingest", "lift", "part", "articulate", "cavity", "assemble", "export"};

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Checkpoints {
 public:
  Checkpoints(fs::path dir, std::string hash, bool force) : dir_(std::move(dir)), hash_(std::move(hash)), force_(force) {}

  fs::path path(const std::string& stage) const {
    const auto idx = std::find(kStages.begin(), kStages.end(), stage) - kStages.begin();
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d_", static_cast<int>(idx));
    return dir_ / (buf + stage + ".json");
  }

  // Data of a valid checkpoint, as long as no earlier stage had to be recomputed.
  std::optional<Json> load(const std::string& stage) {
    if (force_ || broken_) return std::nullopt;
    const fs::path p = path(stage);
    if (!fs::exists(p)) {
      broken_ = true;
      return std::nullopt;
    }
    try {
      Json j = read_json_file(p);
      if (j.at("version") != kCheckpointVersion || j.at("stage") != stage) throw FormatError("header");
      if (j.at("config_hash") != hash_) {
        spdlog::warn("checkpoint {} was written with a different config; ignoring it", p.string());
        broken_ = true;
        return std::nullopt;
      }
      return std::move(j.at("data"));
    } catch (const std::exception& e) {
      spdlog::warn("checkpoint {} is unreadable ({}); recomputing", p.string(), e.what());
      broken_ = true;
      return std::nullopt;
    }
  }

  void save(const std::string& stage, const Json& data) {
    broken_ = true;  // later checkpoints are stale now
    fs::create_directories(dir_);
    const auto idx = std::find(kStages.begin(), kStages.end(), stage) - kStages.begin();
    for (std::size_t k = idx + 1; k < kStages.size(); ++k) fs::remove(path(kStages[k]));
    write_json_file(path(stage),
                    Json{{"version", kCheckpointVersion}, {"stage", stage}, {"config_hash", hash_}, {"data", data}});
  }

 private:
  fs::path dir_;
  std::string hash_;
  bool force_;
  bool broken_ = false;
};

template <typename F>
auto guarded(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const AssemblyError& e) {
    throw StageError(stage, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

template <typename T, typename FromJson>
std::vector<T> from_array(const Json& j, FromJson f) {
  std::vector<T> out;
  for (const auto& x : j) out.push_back(f(x));
  return out;
}

template <typename T>
Json to_array(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

Json rejections_json(const std::vector<Rejection>& r) {
  Json a = Json::array();
  for (const auto& x : r) a.push_back({{"instance_id", x.instance_id}, {"stage", x.stage}, {"reason", x.reason}});
  return a;
}

std::vector<Rejection> rejections_from_json(const Json& j) {
  std::vector<Rejection> out;
  for (const auto& x : j) {
    out.push_back({x.at("instance_id").get<std::string>(), x.at("stage").get<std::string>(),
                   x.at("reason").get<std::string>()});
  }
  return out;
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const fs::path out(cfg.out_dir);

  // ingest: everything is validated before anything is written
  SceneInput in = load_scene(cfg.mesh, cfg.frames);
  if (!fs::exists(cfg.detections)) throw LoadError("detections file " + cfg.detections + " not found");
  const auto dets = load_detections(cfg.detections);
  validate_detections(dets, in.frames);

  DirectoryLock lock(out);
  {
    std::ofstream f(out / "config.toml");
    f << serialize_config(cfg);
  }
  Checkpoints cp(out / "checkpoints", hex(config_hash(cfg)), opts.force);
  RunResult r;
  const auto mark = [&](const std::string& stage, bool resumed) {
    (resumed ? r.resumed_stages : r.computed_stages).push_back(stage);
    spdlog::info("stage {}: {}", stage, resumed ? "resumed from checkpoint" : "done");
  };

  const Json ingest_summary{{"vertices", in.mesh.vertex_count()},
                            {"faces", in.mesh.face_count()},
                            {"frames", in.frames.size()},
                            {"detections", dets.size()}};
  if (auto j = cp.load("ingest"); j && *j == ingest_summary) {
    mark("ingest", true);
  } else {
    cp.save("ingest", ingest_summary);
    mark("ingest", false);
  }

  std::vector<FusedInstance> instances;
  if (auto j = cp.load("lift")) {
    instances = from_array<FusedInstance>(*j, fused_instance_from_json);
    mark("lift", true);
  } else {
    const LiftResult lr = guarded("lift", [&] {
      return lift_detections(in.mesh, in.frames, dets, cfg.fuse, cfg.min_face_pixels);
    });
    instances = lr.instances;
    fs::create_directories(out / "debug");
    write_lift_debug(out / "debug" / "lift.json", instances);
    write_seed_pixels(out / "debug" / "seed_pixels.json", instances, dets);
    cp.save("lift", to_array(instances));
    mark("lift", false);
  }

  std::vector<Rejection> rejected;
  std::vector<PartCandidate> candidates;
  if (auto j = cp.load("part")) {
    candidates = from_array<PartCandidate>(j->at("candidates"), part_candidate_from_json);
    rejected = rejections_from_json(j->at("rejected"));
    mark("part", true);
  } else {
    candidates = guarded("part", [&] { return stage_part(instances, in, cfg, rejected); });
    cp.save("part", Json{{"candidates", to_array(candidates)}, {"rejected", rejections_json(rejected)}});
    mark("part", false);
  }

  std::vector<ValidatedPart> parts;
  if (auto j = cp.load("articulate")) {
    parts = from_array<ValidatedPart>(j->at("parts"), validated_part_from_json);
    rejected = rejections_from_json(j->at("rejected"));
    mark("articulate", true);
  } else {
    parts = guarded("articulate", [&] { return stage_articulate(candidates, in, dets, cfg, rejected); });
    cp.save("articulate", Json{{"parts", to_array(parts)}, {"rejected", rejections_json(rejected)}});
    mark("articulate", false);
  }
  fs::create_directories(out / "debug");
  write_rejections(out / "debug" / "rejected.json", rejected);

  std::vector<InteractiveObject> objects;
  if (auto j = cp.load("cavity")) {
    objects = from_array<InteractiveObject>(*j, interactive_object_from_json);
    mark("cavity", true);
  } else {
    objects = guarded("cavity", [&] { return stage_cavity(parts, in, dets, cfg); });
    cp.save("cavity", to_array(objects));
    mark("cavity", false);
  }

  if (auto j = cp.load("assemble")) {
    r.scene = interactive_scene_from_json(*j);
    mark("assemble", true);
  } else {
    r.scene = guarded("assemble", [&] { return stage_assemble(objects, in, cfg); });
    cp.save("assemble", to_json(r.scene));
    mark("assemble", false);
  }
  write_json_file(out / "debug" / "provenance.json", provenance_json(r.scene));

  r.export_dir = out / "export";
  if (!opts.write_exports) return r;
  const auto j = cp.load("export");
  if (j && fs::exists(r.export_dir / "scene.urdf") && fs::exists(r.export_dir / "scene.json")) {
    mark("export", true);
    return r;
  }
  guarded("export", [&] {
    ExportOptions eo = cfg.exporting;
    eo.dilation_steps = cfg.dilation_steps;
    eo.blur_radius = cfg.blur_radius;
    fs::remove_all(r.export_dir);
    export_scene(r.scene, r.export_dir, eo);
    write_json_file(r.export_dir / "golden_vectors.json", golden_vectors(r.scene));
    return 0;
  });
  cp.save("export", Json{{"dir", "export"}, {"objects", r.scene.objects.size()}});
  mark("export", false);
  return r;
}

}  // namespace openable
