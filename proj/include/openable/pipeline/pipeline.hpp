#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "openable/ingest/detections.hpp"
#include "openable/ingest/frames.hpp"
#include "openable/pipeline/config.hpp"

namespace openable {

/// A stage that failed after its inputs were accepted.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, std::vector<std::string> ids = {})
      : Error("stage " + stage + " failed: " + what), stage_(std::move(stage)), ids_(std::move(ids)) {}
  const std::string& stage() const { return stage_; }
  const std::vector<std::string>& instance_ids() const { return ids_; }

 private:
  std::string stage_;
  std::vector<std::string> ids_;
};

struct StageOutputs {
  std::vector<FusedInstance> instances;
  std::vector<PartCandidate> candidates;
  std::vector<ValidatedPart> parts;
  std::vector<InteractiveObject> objects;
  InteractiveScene scene;
  std::vector<Rejection> rejected;
};

std::vector<FusedInstance> stage_lift(const SceneInput& in, const std::vector<DetectionRecord>& dets,
                                      const PipelineConfig& cfg);
std::vector<PartCandidate> stage_part(const std::vector<FusedInstance>& instances, const SceneInput& in,
                                      const PipelineConfig& cfg, std::vector<Rejection>& rejected);
std::vector<ValidatedPart> stage_articulate(const std::vector<PartCandidate>& candidates, const SceneInput& in,
                                            const std::vector<DetectionRecord>& dets, const PipelineConfig& cfg,
                                            std::vector<Rejection>& rejected);
std::vector<InteractiveObject> stage_cavity(const std::vector<ValidatedPart>& parts, const SceneInput& in,
                                            const std::vector<DetectionRecord>& dets, const PipelineConfig& cfg);
InteractiveScene stage_assemble(const std::vector<InteractiveObject>& objects, const SceneInput& in,
                                const PipelineConfig& cfg);

/// Every stage up to assembly, in memory.
StageOutputs process_scene(const SceneInput& in, const std::vector<DetectionRecord>& dets,
                           const PipelineConfig& cfg);

/// Objects of an assembled scene as evaluation predictions.
std::vector<PredictedPart> predictions(const InteractiveScene& scene);

struct RunOptions {
  bool force = false;
  bool write_exports = true;
};

struct RunResult {
  InteractiveScene scene;
  std::vector<std::string> resumed_stages;   // loaded from checkpoints
  std::vector<std::string> computed_stages;
  std::filesystem::path export_dir;
};

/// ingest -> lift -> part -> articulate -> cavity -> assemble -> export with a
/// checkpoint after each stage under <out_dir>/checkpoints.
RunResult run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {});

/// Holds an exclusive flock on <dir>/.lock for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

// checkpoint encodings
Json to_json(const FusedInstance& i);
FusedInstance fused_instance_from_json(const Json& j);
Json to_json(const PartCandidate& c);
PartCandidate part_candidate_from_json(const Json& j);
Json to_json(const ValidatedPart& p);
ValidatedPart validated_part_from_json(const Json& j);
Json to_json(const InteractiveObject& o);
InteractiveObject interactive_object_from_json(const Json& j);
Json to_json(const InteractiveScene& s);
InteractiveScene interactive_scene_from_json(const Json& j);

}  // namespace openable
