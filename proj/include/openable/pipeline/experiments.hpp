#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "openable/export/export.hpp"
#include "openable/ingest/synthetic.hpp"
#include "openable/pipeline/pipeline.hpp"

namespace openable {

/// Predictions from an exported scene.json or a URDF. Part mesh vertices are
/// read (in world coordinates) when the referenced OBJ files exist.
std::vector<PredictedPart> load_predictions(const std::filesystem::path& path);

/// Applies viewer verdicts: objects flagged anything but ok are added to
/// opts.excluded. Returns one annotation line per verdict.
std::vector<std::string> apply_verdicts(const std::vector<VerdictRecord>& verdicts, EvalOptions& opts);

struct EvalJob {
  std::string name;
  std::filesystem::path predictions;  // scene.json or .urdf
  std::filesystem::path ground_truth;
  std::filesystem::path scene_mesh;   // only needed for radius matching; empty = from ground truth
};

/// Resolves a scene directory to a job: <dir>/ground_truth.json plus the first
/// of <dir>/out/export/scene.json, <dir>/export/scene.json, <dir>/scene.json.
EvalJob eval_job_for_directory(const std::filesystem::path& dir);

SceneEval run_eval_job(const EvalJob& job, const EvalOptions& opts);

struct ExperimentScene {
  std::string name;
  SceneInput input;
  std::vector<DetectionRecord> detections;
  GroundTruth ground_truth;
};

ExperimentScene experiment_scene(const std::string& name, const SyntheticScene& s);
ExperimentScene load_experiment_scene(const std::filesystem::path& dir);

struct AblationRow {
  std::string label;
  bool refinement = true;
  ThresholdMetrics metrics;  // at the ablation tau
};

/// Runs the pipeline with refinement off and on over the same inputs.
std::vector<AblationRow> run_ablation(const std::vector<ExperimentScene>& scenes, const PipelineConfig& cfg,
                                      double tau);
std::string ablation_table(const std::vector<AblationRow>& rows, double tau);
Json ablation_json(const std::vector<AblationRow>& rows, double tau);

}  // namespace openable
