#include "openable/evaluate/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "openable/assemble/assemble.hpp"
#include "openable/core/geometry.hpp"

namespace openable {

std::string_view to_string(JointClass c) {
  switch (c) {
    case JointClass::kPrismatic: return "prismatic";
    case JointClass::kRevoluteHorizontal: return "revolute_horizontal";
    case JointClass::kRevoluteVertical: return "revolute_vertical";
  }
  return "prismatic";
}

JointClass joint_class(const Articulation& a) {
  if (a.type == JointType::kPrismatic) return JointClass::kPrismatic;
  // below 45° from the ground plane <=> |a_z| < sin 45°
  return std::abs(a.axis[2]) < std::sqrt(0.5) - 1e-12 ? JointClass::kRevoluteHorizontal
                                                       : JointClass::kRevoluteVertical;
}

double orientation_error_deg(const UnitVec3& a, const UnitVec3& b) {
  return axis_angle_unsigned(a, b) * 180.0 / std::numbers::pi;
}

double line_distance(const Articulation& a, const Articulation& b) {
  return line_line_distance(a.origin, a.axis, b.origin, b.axis);
}

MatchResult match_iou_matrix(const std::vector<std::vector<double>>& iou) {
  MatchResult m;
  const std::size_t np = iou.size();
  const std::size_t ng = np ? iou[0].size() : 0;
  m.pred_to_gt.assign(np, -1);
  m.pred_iou.assign(np, 0.0);
  m.gt_matched.assign(ng, false);
  struct Cell {
    double v;
    int p, g;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (iou[p][g] > 0) cells.push_back({iou[p][g], static_cast<int>(p), static_cast<int>(g)});
    }
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.v > b.v; });
  for (const auto& c : cells) {
    if (m.pred_to_gt[c.p] >= 0 || m.gt_matched[c.g]) continue;
    m.pred_to_gt[c.p] = c.g;
    m.pred_iou[c.p] = c.v;
    m.gt_matched[c.g] = true;
  }
  return m;
}

std::vector<std::vector<double>> iou_matrix(const std::vector<PredictedPart>& preds,
                                            const std::vector<GroundTruthPart>& gts,
                                            const std::vector<std::vector<Vec3>>& gt_points,
                                            double match_radius) {
  std::vector<std::vector<double>> m(preds.size(), std::vector<double>(gts.size(), 0.0));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      m[p][g] = match_radius > 0 ? pointset_iou(preds[p].points, gt_points.at(g), match_radius)
                                 : pointset_iou(preds[p].point_set, gts[g].vertex_indices);
    }
  }
  return m;
}

ArticulationMetrics articulation_metrics(const std::vector<ArticulationPair>& tp_pairs) {
  ArticulationMetrics r;
  r.pairs = tp_pairs.size();
  for (const auto& [pred, gt] : tp_pairs) {
    if (joint_class(pred) != joint_class(gt)) continue;
    ++r.class_correct;
    ClassErrors& c = r.per_class[static_cast<int>(joint_class(gt))];
    const double oe = orientation_error_deg(pred.axis, gt.axis);
    r.oe_sum += oe;
    ++r.oe_count;
    c.oe_sum += oe;
    ++c.oe_count;
    if (gt.type == JointType::kRevolute) {
      const double md = line_distance(pred, gt);
      r.md_sum += md;
      ++r.md_count;
      c.md_sum += md;
      ++c.md_count;
    }
  }
  for (auto& c : r.per_class) {
    if (c.oe_count) c.oe_mean = c.oe_sum / c.oe_count;
    if (c.md_count) c.md_mean = c.md_sum / c.md_count;
  }
  if (r.pairs) r.joint_acc = static_cast<double>(r.class_correct) / r.pairs;
  if (r.oe_count) r.oe_mean = r.oe_sum / r.oe_count;
  if (r.md_count) r.md_mean = r.md_sum / r.md_count;
  return r;
}

ModCounts mod_table(const std::vector<ArticulationPair>& tp_pairs, std::size_t n_gt, const ModCutoffs& c) {
  ModCounts m;
  m.n_gt = n_gt;
  for (const auto& [pred, gt] : tp_pairs) {
    ++m.pdet;
    if (joint_class(pred) != joint_class(gt)) continue;
    ++m.m;
    if (!(orientation_error_deg(pred.axis, gt.axis) < c.oe_deg)) continue;
    ++m.mo;
    if (gt.type == JointType::kRevolute && !(line_distance(pred, gt) < c.md)) continue;
    ++m.mod;
  }
  return m;
}

double box_coverage(const Obb& box, const std::vector<Vec3>& points) {
  if (points.empty()) return 0.0;
  std::size_t in = 0;
  for (const auto& p : points) in += point_in_obb(p, box, 0.0);
  return static_cast<double>(in) / points.size();
}

std::vector<double> box_coverage(const std::vector<Obb>& boxes, const std::vector<std::vector<Vec3>>& gts) {
  std::vector<double> out;
  for (const auto& g : gts) {
    double best = 0;
    for (const auto& b : boxes) best = std::max(best, box_coverage(b, g));
    out.push_back(best);
  }
  return out;
}

namespace {

void finish_rates(ThresholdMetrics& t) {
  t.precision = t.n_pred ? static_cast<double>(t.tp) / t.n_pred : 0.0;
  t.recall = t.n_gt ? static_cast<double>(t.tp) / t.n_gt : 0.0;
  t.f1 = t.precision + t.recall > 0 ? 2 * t.precision * t.recall / (t.precision + t.recall) : 0.0;
}

}  // namespace

SceneEval evaluate_scene(const std::string& name, const std::vector<PredictedPart>& all_preds,
                         const GroundTruth& gt, const EvalOptions& opts,
                         const std::vector<std::vector<Vec3>>& gt_points) {
  std::vector<PredictedPart> preds;
  for (const auto& p : all_preds) {
    if (!opts.excluded.count(p.id)) preds.push_back(p);
  }
  const auto iou = iou_matrix(preds, gt.parts, gt_points, opts.match_radius);
  const MatchResult match = match_iou_matrix(iou);
  SceneEval s;
  s.name = name;
  for (double tau : opts.taus) {
    ThresholdMetrics t;
    t.tau = tau;
    t.n_pred = preds.size();
    t.n_gt = gt.parts.size();
    std::vector<ArticulationPair> pairs;
    for (std::size_t p = 0; p < preds.size(); ++p) {
      if (match.pred_to_gt[p] < 0 || match.pred_iou[p] < tau) continue;
      ++t.tp;
      pairs.push_back({preds[p].articulation, gt.parts[match.pred_to_gt[p]].articulation});
    }
    finish_rates(t);
    t.joints = articulation_metrics(pairs);
    t.mod = mod_table(pairs, t.n_gt, opts.cutoffs);
    s.per_tau.push_back(t);
    s.tp_pairs.push_back(std::move(pairs));
  }
  return s;
}

EvalReport pool(const std::vector<SceneEval>& scenes, const EvalOptions& opts) {
  EvalReport r;
  r.macro = opts.macro;
  for (const auto& s : scenes) r.scenes.push_back(s.name);
  for (std::size_t k = 0; k < opts.taus.size(); ++k) {
    ThresholdMetrics t;
    t.tau = opts.taus[k];
    std::vector<ArticulationPair> pairs;
    for (const auto& s : scenes) {
      const auto& st = s.per_tau[k];
      t.tp += st.tp;
      t.n_pred += st.n_pred;
      t.n_gt += st.n_gt;
      pairs.insert(pairs.end(), s.tp_pairs[k].begin(), s.tp_pairs[k].end());
    }
    finish_rates(t);
    t.joints = articulation_metrics(pairs);
    t.mod = mod_table(pairs, t.n_gt, opts.cutoffs);
    if (opts.macro && !scenes.empty()) {
      const auto mean = [&](auto get) {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& s : scenes) {
          if (auto v = get(s.per_tau[k])) {
            sum += *v;
            ++n;
          }
        }
        return n ? std::optional<double>(sum / n) : std::nullopt;
      };
      t.precision = *mean([](const ThresholdMetrics& m) { return std::optional<double>(m.precision); });
      t.recall = *mean([](const ThresholdMetrics& m) { return std::optional<double>(m.recall); });
      t.f1 = *mean([](const ThresholdMetrics& m) { return std::optional<double>(m.f1); });
      t.joints.joint_acc = mean([](const ThresholdMetrics& m) { return m.joints.joint_acc; });
      t.joints.md_mean = mean([](const ThresholdMetrics& m) { return m.joints.md_mean; });
      t.joints.oe_mean = mean([](const ThresholdMetrics& m) { return m.joints.oe_mean; });
    }
    r.per_tau.push_back(t);
  }
  return r;
}

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string fmt(const std::optional<double>& v, const char* f) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, f, *v);
  return buf;
}

}  // namespace

Json to_json(const EvalReport& r) {
  Json rows = Json::array();
  for (const auto& t : r.per_tau) {
    Json classes = Json::object();
    for (int c = 0; c < 3; ++c) {
      const ClassErrors& e = t.joints.per_class[c];
      classes[std::string(to_string(static_cast<JointClass>(c)))] = {
          {"pairs", e.oe_count}, {"md_mean", opt(e.md_mean)}, {"oe_mean_deg", opt(e.oe_mean)}};
    }
    rows.push_back({{"tau", t.tau},
                    {"tp", t.tp},
                    {"n_pred", t.n_pred},
                    {"n_gt", t.n_gt},
                    {"precision", t.precision},
                    {"recall", t.recall},
                    {"f1", t.f1},
                    {"joint_acc", opt(t.joints.joint_acc)},
                    {"md_mean", opt(t.joints.md_mean)},
                    {"oe_mean_deg", opt(t.joints.oe_mean)},
                    {"per_class", classes},
                    {"mod",
                     {{"pdet", t.mod.rate(t.mod.pdet)},
                      {"m", t.mod.rate(t.mod.m)},
                      {"mo", t.mod.rate(t.mod.mo)},
                      {"mod", t.mod.rate(t.mod.mod)}}}});
  }
  return Json{{"averaging", r.macro ? "macro" : "micro"},
              {"scenes", r.scenes},
              {"thresholds", rows},
              {"annotations", r.annotations}};
}

std::string text_table(const EvalReport& r) {
  std::ostringstream o;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %6s %6s %6s %8s %8s %8s\n", "tau", "P", "R", "F1", "Acc(%)", "MD(m)",
                "OE(deg)");
  o << line;
  for (const auto& t : r.per_tau) {
    const auto acc = t.joints.joint_acc ? std::optional<double>(100 * *t.joints.joint_acc) : std::nullopt;
    std::snprintf(line, sizeof line, "%-6.2f %6.3f %6.3f %6.3f %8s %8s %8s\n", t.tau, t.precision, t.recall,
                  t.f1, fmt(acc, "%.1f").c_str(), fmt(t.joints.md_mean, "%.3f").c_str(),
                  fmt(t.joints.oe_mean, "%.3f").c_str());
    o << line;
  }
  std::snprintf(line, sizeof line, "\n%-6s %7s %7s %7s %7s\n", "tau", "PDet", "+M", "+MO", "+MOD");
  o << line;
  for (const auto& t : r.per_tau) {
    std::snprintf(line, sizeof line, "%-6.2f %7.1f %7.1f %7.1f %7.1f\n", t.tau, 100 * t.mod.rate(t.mod.pdet),
                  100 * t.mod.rate(t.mod.m), 100 * t.mod.rate(t.mod.mo), 100 * t.mod.rate(t.mod.mod));
    o << line;
  }
  return o.str();
}

std::string csv_table(const EvalReport& r) {
  std::ostringstream o;
  o << "tau,tp,n_pred,n_gt,precision,recall,f1,joint_acc,md_mean,oe_mean_deg,pdet,m,mo,mod\n";
  const auto cell = [](const std::optional<double>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& t : r.per_tau) {
    o << t.tau << "," << t.tp << "," << t.n_pred << "," << t.n_gt << "," << t.precision << "," << t.recall
      << "," << t.f1 << "," << cell(t.joints.joint_acc) << "," << cell(t.joints.md_mean) << ","
      << cell(t.joints.oe_mean) << "," << t.mod.rate(t.mod.pdet) << "," << t.mod.rate(t.mod.m) << ","
      << t.mod.rate(t.mod.mo) << "," << t.mod.rate(t.mod.mod) << "\n";
  }
  return o.str();
}

}  // namespace openable
