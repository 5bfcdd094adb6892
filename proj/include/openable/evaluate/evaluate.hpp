#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "openable/core/json_util.hpp"
#include "openable/ingest/ground_truth.hpp"

namespace openable {

enum class JointClass { kPrismatic, kRevoluteHorizontal, kRevoluteVertical };
std::string_view to_string(JointClass c);

/// Revolute axes less than 45° from the ground plane are horizontal.
JointClass joint_class(const Articulation& a);

/// Sign-invariant angle between axes, degrees.
double orientation_error_deg(const UnitVec3& a, const UnitVec3& b);
/// Shortest distance between the two joint lines, meters.
double line_distance(const Articulation& a, const Articulation& b);

struct PredictedPart {
  std::string id;
  std::vector<int> point_set;  // ascending scene-vertex indices (same-source matching)
  std::vector<Vec3> points;    // used when matching by radius
  Articulation articulation;
};

struct MatchResult {
  std::vector<int> pred_to_gt;  // -1 when unmatched
  std::vector<double> pred_iou;
  std::vector<bool> gt_matched;
};

/// Greedy one-to-one matching by descending IoU (ties: lower pred, then gt index).
MatchResult match_iou_matrix(const std::vector<std::vector<double>>& iou);

/// All-pairs IoU; exact index sets when match_radius == 0, radius matching otherwise.
std::vector<std::vector<double>> iou_matrix(const std::vector<PredictedPart>& preds,
                                            const std::vector<GroundTruthPart>& gts,
                                            const std::vector<std::vector<Vec3>>& gt_points,
                                            double match_radius);

struct ArticulationPair {
  Articulation pred, gt;
};

struct ClassErrors {
  std::size_t md_count = 0, oe_count = 0;
  double md_sum = 0.0, oe_sum = 0.0;
  std::optional<double> md_mean, oe_mean;
};

struct ArticulationMetrics {
  std::size_t pairs = 0;
  std::size_t class_correct = 0;
  std::optional<double> joint_acc;
  std::optional<double> md_mean;  // revolute only
  std::optional<double> oe_mean;
  std::size_t md_count = 0, oe_count = 0;
  double md_sum = 0.0, oe_sum = 0.0;
  std::array<ClassErrors, 3> per_class;  // indexed by JointClass of the ground truth
};

ArticulationMetrics articulation_metrics(const std::vector<ArticulationPair>& tp_pairs);

struct ModCutoffs {
  double oe_deg = 10.0;
  double md = 0.25;
};

struct ModCounts {
  std::size_t n_gt = 0, pdet = 0, m = 0, mo = 0, mod = 0;
  double rate(std::size_t k) const { return n_gt == 0 ? 0.0 : static_cast<double>(k) / n_gt; }
};

/// Cumulative staging over true-positive pairs; prismatic joints skip the MD stage.
ModCounts mod_table(const std::vector<ArticulationPair>& tp_pairs, std::size_t n_gt, const ModCutoffs& c);

/// Fraction of the points inside the box.
double box_coverage(const Obb& box, const std::vector<Vec3>& points);
/// Per ground-truth part: max coverage over boxes.
std::vector<double> box_coverage(const std::vector<Obb>& boxes, const std::vector<std::vector<Vec3>>& gts);

struct ThresholdMetrics {
  double tau = 0.5;
  std::size_t tp = 0, n_pred = 0, n_gt = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  ArticulationMetrics joints;
  ModCounts mod;
};

struct SceneEval {
  std::string name;
  std::vector<ThresholdMetrics> per_tau;
  std::vector<std::vector<ArticulationPair>> tp_pairs;  // per tau
};

struct EvalOptions {
  std::vector<double> taus{0.25, 0.5};
  ModCutoffs cutoffs;
  double match_radius = 0.0;
  bool macro = false;
  std::set<std::string> excluded;  // prediction ids to drop
};

/// gt_points is only needed for radius matching (positions of each GT part's vertices).
SceneEval evaluate_scene(const std::string& name, const std::vector<PredictedPart>& preds,
                         const GroundTruth& gt, const EvalOptions& opts,
                         const std::vector<std::vector<Vec3>>& gt_points = {});

struct EvalReport {
  bool macro = false;
  std::vector<std::string> scenes;
  std::vector<ThresholdMetrics> per_tau;
  std::vector<std::string> annotations;
};

/// Micro-averaged (pooled counts and pairs) or macro-averaged (mean of per-scene rates).
EvalReport pool(const std::vector<SceneEval>& scenes, const EvalOptions& opts);

Json to_json(const EvalReport& r);
std::string text_table(const EvalReport& r);
std::string csv_table(const EvalReport& r);

}  // namespace openable
