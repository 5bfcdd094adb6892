#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "openable/assemble/assemble.hpp"
#include "openable/cavity/cavity.hpp"
#include "openable/evaluate/evaluate.hpp"
#include "openable/export/export.hpp"
#include "openable/lift/fuse.hpp"
#include "openable/part/extract.hpp"

namespace openable {

struct PipelineConfig {
  // [paths]
  std::string mesh = "mesh.ply";
  std::string frames = "frames.json";
  std::string detections = "detections.json";
  std::string ground_truth;
  std::string out_dir = "out";
  // [lift]
  FuseOptions fuse;
  int min_face_pixels = 3;
  // [part]
  PartExtractOptions part;
  // [articulate]
  double candidate_iou_threshold = 0.5;
  bool refinement = true;
  // [cavity]
  CavityOptions cavity;
  double cavity_max_depth = 0.0;  // 0 = unbounded
  // [assemble]
  DedupOptions dedup;
  double carve_margin = 0.002;
  // [texture]
  ExportOptions exporting;
  int dilation_steps = 4;
  double blur_radius = 1.0;
  // [eval]
  std::vector<double> eval_taus{0.25, 0.5};
  double mod_oe_deg = 10.0;
  double mod_md = 0.25;
  double match_radius = 0.0;
  bool macro = false;

  /// Throws InvalidInput naming the first out-of-range value.
  void validate() const;
  CavityOptions cavity_options() const;
  EvalOptions eval_options() const;
};

/// TOML-style text: [section] headers and `key = value` lines.
std::string serialize_config(const PipelineConfig& c);
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});
/// Applies one "section.key=value" override.
void set_config_value(PipelineConfig& c, const std::string& assignment);

/// FNV-1a over the serialized config without the output directory.
std::uint64_t config_hash(const PipelineConfig& c);

}  // namespace openable
