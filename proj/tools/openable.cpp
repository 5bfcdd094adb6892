#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "openable/pipeline/experiments.hpp"

namespace fs = std::filesystem;
using namespace openable;

namespace {

constexpr int kInputError = 2;
constexpr int kStageError = 3;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> set;
  std::string scene_dir;
  std::string out;
};

void add_config_args(CLI::App* app, ConfigArgs& a) {
  app->add_option("-c,--config", a.file, "config file");
  app->add_option("--set", a.set, "override, section.key=value (repeatable)");
  app->add_option("--scene", a.scene_dir, "scene directory with mesh.ply, frames.json, detections.json");
  app->add_option("-o,--out", a.out, "output directory");
}

PipelineConfig resolve_config(const ConfigArgs& a) {
  PipelineConfig c;
  if (!a.file.empty()) c = load_config(a.file);
  if (!a.scene_dir.empty()) {
    const fs::path d(a.scene_dir);
    c.mesh = (d / "mesh.ply").string();
    c.frames = (d / "frames.json").string();
    c.detections = (d / "detections.json").string();
    if (fs::exists(d / "ground_truth.json")) c.ground_truth = (d / "ground_truth.json").string();
    c.out_dir = (d / "out").string();
  }
  if (!a.out.empty()) c.out_dir = a.out;
  for (const auto& s : a.set) set_config_value(c, s);
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write " + path);
  f << text;
}

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  fs::copy(from, to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("OPENABLE_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));

  CLI::App app{"Interactive scene reconstruction from scanned meshes"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write seeded synthetic scenes");
  std::uint64_t gen_seed = 1;
  int gen_count = 1, gen_min = 3, gen_max = 6;
  double gen_sigma_a = 0.0, gen_sigma_o = 0.0, gen_flip = 0.0;
  std::string gen_out, gen_spec;
  gen->add_option("--seed", gen_seed, "first seed");
  gen->add_option("--count", gen_count, "number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--min-parts", gen_min)->check(CLI::PositiveNumber);
  gen->add_option("--max-parts", gen_max)->check(CLI::PositiveNumber);
  gen->add_option("--sigma-axis-deg", gen_sigma_a, "detector axis noise")->check(CLI::NonNegativeNumber);
  gen->add_option("--sigma-origin", gen_sigma_o, "detector origin noise, meters")->check(CLI::NonNegativeNumber);
  gen->add_option("--type-flip", gen_flip, "probability of a wrong joint type hint")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--spec", gen_spec, "scene spec JSON instead of a random layout");
  gen->add_option("-o,--out", gen_out, "output directory")->required();

  // run
  auto* run = app.add_subcommand("run", "run the pipeline with checkpoints");
  ConfigArgs run_cfg;
  bool run_force = false, run_no_export = false;
  add_config_args(run, run_cfg);
  run->add_flag("--force", run_force, "ignore existing checkpoints");
  run->add_flag("--no-export", run_no_export, "stop after assembly");

  // eval
  auto* ev = app.add_subcommand("eval", "score predictions against ground truth");
  std::string ev_pred, ev_gt, ev_mesh, ev_verdicts, ev_format = "text", ev_out, ev_cfg;
  std::vector<std::string> ev_dirs, ev_set;
  ev->add_option("--pred", ev_pred, "scene.json or .urdf");
  ev->add_option("--gt", ev_gt, "ground_truth.json");
  ev->add_option("--mesh", ev_mesh, "scene mesh for radius matching");
  ev->add_option("--batch", ev_dirs, "scene directories to pool");
  ev->add_option("--verdicts", ev_verdicts, "viewer verdicts; flagged objects are excluded");
  ev->add_option("-c,--config", ev_cfg, "config file ([eval] section)");
  ev->add_option("--set", ev_set, "override, section.key=value");
  ev->add_option("--format", ev_format)->check(CLI::IsMember({"text", "csv", "json"}));
  ev->add_option("-o,--out", ev_out, "write the report here instead of stdout");

  // ablate
  auto* ab = app.add_subcommand("ablate", "refinement on/off comparison");
  std::vector<std::string> ab_dirs, ab_set;
  std::string ab_cfg, ab_format = "text", ab_out;
  int ab_synthetic = 0;
  std::uint64_t ab_seed = 1;
  double ab_sigma_a = 8.0, ab_sigma_o = 0.1, ab_tau = 0.25;
  ab->add_option("--scenes", ab_dirs, "scene directories");
  ab->add_option("--synthetic", ab_synthetic, "generate this many scenes instead");
  ab->add_option("--seed", ab_seed);
  ab->add_option("--sigma-axis-deg", ab_sigma_a);
  ab->add_option("--sigma-origin", ab_sigma_o);
  ab->add_option("--tau", ab_tau)->check(CLI::Range(0.0, 1.0));
  ab->add_option("-c,--config", ab_cfg);
  ab->add_option("--set", ab_set);
  ab->add_option("--format", ab_format)->check(CLI::IsMember({"text", "json"}));
  ab->add_option("-o,--out", ab_out);

  // export
  auto* ex = app.add_subcommand("export", "re-export an assembled scene");
  std::string ex_run, ex_out;
  bool ex_no_textures = false;
  int ex_scene_size = 0, ex_part_size = 0;
  ex->add_option("--run", ex_run, "pipeline output directory")->required();
  ex->add_option("-o,--out", ex_out, "export directory")->required();
  ex->add_flag("--no-textures", ex_no_textures, "vertex-colored OBJ instead of texture atlases");
  ex->add_option("--scene-texture", ex_scene_size)->check(CLI::PositiveNumber);
  ex->add_option("--part-texture", ex_part_size)->check(CLI::PositiveNumber);

  // inspect-dump
  auto* dump = app.add_subcommand("inspect-dump", "write a viewer bundle");
  std::string dump_run, dump_out;
  dump->add_option("--run", dump_run, "pipeline output directory")->required();
  dump->add_option("-o,--out", dump_out, "bundle directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (gen->parsed()) {
      for (int k = 0; k < gen_count; ++k) {
        SyntheticSceneSpec spec = gen_spec.empty() ? random_scene_spec(gen_seed + k, gen_min, gen_max)
                                                   : synthetic_spec_from_json(read_json_file(gen_spec));
        spec.noise = {gen_sigma_a, gen_sigma_o, gen_flip};
        if (!gen_spec.empty()) spec.seed = gen_seed + k;
        const fs::path dir = gen_count == 1 ? fs::path(gen_out) : fs::path(gen_out) / ("scene_" + std::to_string(k));
        write_synthetic(dir, generate_synthetic(spec), spec);
        std::cout << dir.string() << "\n";
      }
    } else if (run->parsed()) {
      const PipelineConfig c = resolve_config(run_cfg);
      const RunResult r = run_pipeline(c, {run_force, !run_no_export});
      std::cout << r.scene.objects.size() << " objects";
      if (!run_no_export) std::cout << ", exported to " << r.export_dir.string();
      std::cout << "\n";
    } else if (ev->parsed()) {
      PipelineConfig c = ev_cfg.empty() ? PipelineConfig{} : load_config(ev_cfg);
      for (const auto& s : ev_set) set_config_value(c, s);
      c.validate();
      EvalOptions opts = c.eval_options();
      std::vector<std::string> notes;
      if (!ev_verdicts.empty()) notes = apply_verdicts(load_verdicts(ev_verdicts), opts);
      std::vector<EvalJob> jobs;
      for (const auto& d : ev_dirs) jobs.push_back(eval_job_for_directory(d));
      if (!ev_pred.empty() || !ev_gt.empty()) {
        if (ev_pred.empty() || ev_gt.empty()) throw InvalidInput("--pred and --gt go together");
        jobs.push_back({fs::path(ev_pred).parent_path().filename().string(), ev_pred, ev_gt, ev_mesh});
      }
      if (jobs.empty()) throw InvalidInput("nothing to evaluate; pass --pred/--gt or --batch");
      std::vector<SceneEval> evals;
      for (const auto& j : jobs) evals.push_back(run_eval_job(j, opts));
      EvalReport rep = pool(evals, opts);
      rep.annotations = notes;
      if (ev_format == "json") {
        emit(to_json(rep).dump(2) + "\n", ev_out);
      } else if (ev_format == "csv") {
        emit(csv_table(rep), ev_out);
      } else {
        emit(text_table(rep), ev_out);
      }
    } else if (ab->parsed()) {
      PipelineConfig c = ab_cfg.empty() ? PipelineConfig{} : load_config(ab_cfg);
      for (const auto& s : ab_set) set_config_value(c, s);
      c.validate();
      std::vector<ExperimentScene> scenes;
      for (const auto& d : ab_dirs) scenes.push_back(load_experiment_scene(d));
      for (int k = 0; k < ab_synthetic; ++k) {
        SyntheticSceneSpec spec = random_scene_spec(ab_seed + k);
        spec.noise = {ab_sigma_a, ab_sigma_o, 0.0};
        scenes.push_back(experiment_scene("synthetic_" + std::to_string(ab_seed + k), generate_synthetic(spec)));
      }
      if (scenes.empty()) throw InvalidInput("no scenes; pass --scenes or --synthetic");
      const auto rows = run_ablation(scenes, c, ab_tau);
      emit(ab_format == "json" ? ablation_json(rows, ab_tau).dump(2) + "\n" : ablation_table(rows, ab_tau), ab_out);
    } else if (ex->parsed()) {
      const fs::path run_dir(ex_run);
      const fs::path cp = run_dir / "checkpoints" / "05_assemble.json";
      if (!fs::exists(cp)) throw InvalidInput(cp.string() + " not found; run the pipeline first");
      const InteractiveScene scene = interactive_scene_from_json(read_json_file(cp).at("data"));
      PipelineConfig c = fs::exists(run_dir / "config.toml") ? load_config(run_dir / "config.toml") : PipelineConfig{};
      ExportOptions eo = c.exporting;
      eo.dilation_steps = c.dilation_steps;
      eo.blur_radius = c.blur_radius;
      if (ex_no_textures) eo.textures = false;
      if (ex_scene_size > 0) eo.scene_texture_size = ex_scene_size;
      if (ex_part_size > 0) eo.part_texture_size = ex_part_size;
      try {
        export_scene(scene, ex_out, eo);
        write_json_file(fs::path(ex_out) / "golden_vectors.json", golden_vectors(scene));
      } catch (const Error& e) {
        throw StageError("export", e.what());
      }
      std::cout << "exported " << scene.objects.size() << " objects to " << ex_out << "\n";
    } else if (dump->parsed()) {
      const fs::path src = fs::path(dump_run) / "export";
      if (!fs::exists(src / "scene.json")) throw InvalidInput(src.string() + " has no scene.json; run the pipeline first");
      copy_tree(src, dump_out);
      if (!fs::exists(fs::path(dump_out) / "golden_vectors.json")) {
        const fs::path cp = fs::path(dump_run) / "checkpoints" / "05_assemble.json";
        const InteractiveScene scene = interactive_scene_from_json(read_json_file(cp).at("data"));
        write_json_file(fs::path(dump_out) / "golden_vectors.json", golden_vectors(scene));
      }
      save_verdicts(fs::path(dump_out) / "verdicts.json", {});
      std::cout << dump_out << "\n";
    }
  } catch (const StageError& e) {
    spdlog::error("{}", e.what());
    for (const auto& id : e.instance_ids()) spdlog::error("  instance {}", id);
    return kStageError;
  } catch (const AssemblyError& e) {
    spdlog::error("{}", e.what());
    return kStageError;
  } catch (const ExportError& e) {
    spdlog::error("{}", e.what());
    return kStageError;
  } catch (const UnwrapError& e) {
    spdlog::error("{}", e.what());
    return kStageError;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const Json::exception& e) {
    spdlog::error("malformed JSON: {}", e.what());
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  }
  return 0;
}
