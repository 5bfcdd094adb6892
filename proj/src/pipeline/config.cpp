#include "openable/pipeline/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

namespace openable {

namespace {

using Field = std::variant<double*, int*, bool*, std::string*, std::uint64_t*, std::vector<double>*>;

struct Entry {
  std::string section, key;
  Field field;
};

std::vector<Entry> entries(PipelineConfig& c) {
  return {
      {"paths", "mesh", &c.mesh},
      {"paths", "frames", &c.frames},
      {"paths", "detections", &c.detections},
      {"paths", "ground_truth", &c.ground_truth},
      {"paths", "out_dir", &c.out_dir},
      {"lift", "fuse_iou_threshold", &c.fuse.iou_threshold},
      {"lift", "top_k", &c.fuse.top_k},
      {"lift", "adjacency_bonus", &c.fuse.adjacency_bonus},
      {"lift", "resolution", &c.fuse.resolution},
      {"lift", "seed", &c.fuse.seed},
      {"lift", "min_face_pixels", &c.min_face_pixels},
      {"part", "plane_thickness", &c.part.thickness},
      {"part", "vertical_tol_deg", &c.part.vertical_tol_deg},
      {"part", "n_planes", &c.part.n_planes},
      {"part", "ransac_iterations", &c.part.ransac_iterations},
      {"part", "ransac_seed", &c.part.ransac_seed},
      {"part", "min_part_faces", &c.part.min_part_faces},
      {"articulate", "candidate_iou_threshold", &c.candidate_iou_threshold},
      {"articulate", "refinement", &c.refinement},
      {"cavity", "ring_px", &c.cavity.ring_px},
      {"cavity", "r_fit", &c.cavity.r_fit},
      {"cavity", "min_fit_points", &c.cavity.min_fit_points},
      {"cavity", "min_inlier_fraction", &c.cavity.min_inlier_fraction},
      {"cavity", "fit_thickness", &c.cavity.fit_thickness},
      {"cavity", "d_min", &c.cavity.d_min},
      {"cavity", "max_depth", &c.cavity_max_depth},
      {"cavity", "wall_margin", &c.cavity.wall_margin},
      {"assemble", "tau_dup", &c.dedup.tau_dup},
      {"assemble", "tau_low", &c.dedup.tau_low},
      {"assemble", "max_subset", &c.dedup.max_subset},
      {"assemble", "carve_margin", &c.carve_margin},
      {"texture", "enabled", &c.exporting.textures},
      {"texture", "scene_size", &c.exporting.scene_texture_size},
      {"texture", "part_size", &c.exporting.part_texture_size},
      {"texture", "dilation_steps", &c.dilation_steps},
      {"texture", "blur_radius", &c.blur_radius},
      {"eval", "taus", &c.eval_taus},
      {"eval", "mod_oe_deg", &c.mod_oe_deg},
      {"eval", "mod_md", &c.mod_md},
      {"eval", "match_radius", &c.match_radius},
      {"eval", "macro", &c.macro},
  };
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') o += '\\';
    o += ch;
  }
  return o + "\"";
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw InvalidInput("config key " + key + ": cannot parse '" + v + "'");
  }
  return out;
}

std::string unquote(const std::string& v, const std::string& key) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
    throw InvalidInput("config key " + key + ": expected a quoted string");
  }
  std::string o;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\' && i + 2 < v.size()) ++i;
    o += v[i];
  }
  return o;
}

void assign(Field f, const std::string& v, const std::string& key) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          *p = parse_number<double>(v, key);
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          *p = parse_number<T>(v, key);
        } else if constexpr (std::is_same_v<T, bool>) {
          if (v != "true" && v != "false") throw InvalidInput("config key " + key + ": expected true or false");
          *p = v == "true";
        } else if constexpr (std::is_same_v<T, std::string>) {
          *p = unquote(v, key);
        } else {
          if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
            throw InvalidInput("config key " + key + ": expected [a, b, ...]");
          }
          p->clear();
          std::stringstream in(v.substr(1, v.size() - 2));
          std::string item;
          while (std::getline(in, item, ',')) {
            item = trim(item);
            if (!item.empty()) p->push_back(parse_number<double>(item, key));
          }
        }
      },
      f);
}

std::string render(Field f) {
  return std::visit(
      [](auto* p) -> std::string {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return num(*p);
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          return std::to_string(*p);
        } else if constexpr (std::is_same_v<T, bool>) {
          return *p ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return quote(*p);
        } else {
          std::string s = "[";
          for (std::size_t i = 0; i < p->size(); ++i) s += (i ? ", " : "") + num((*p)[i]);
          return s + "]";
        }
      },
      f);
}

Field find_field(PipelineConfig& c, const std::string& dotted) {
  for (const auto& e : entries(c)) {
    if (e.section + "." + e.key == dotted) return e.field;
  }
  throw InvalidInput("unknown config key '" + dotted + "'");
}

}  // namespace

void PipelineConfig::validate() const {
  const auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("config: " + what);
  };
  need(fuse.iou_threshold > 0 && fuse.iou_threshold <= 1, "lift.fuse_iou_threshold must lie in (0, 1]");
  need(fuse.top_k >= 1, "lift.top_k must be >= 1");
  need(fuse.adjacency_bonus >= 0, "lift.adjacency_bonus must be >= 0");
  need(fuse.resolution > 0, "lift.resolution must be > 0");
  need(min_face_pixels >= 1, "lift.min_face_pixels must be >= 1");
  need(part.thickness > 0, "part.plane_thickness must be > 0");
  need(part.vertical_tol_deg > 0 && part.vertical_tol_deg < 90, "part.vertical_tol_deg must lie in (0, 90)");
  need(part.n_planes >= 1, "part.n_planes must be >= 1");
  need(part.ransac_iterations >= 1, "part.ransac_iterations must be >= 1");
  need(part.min_part_faces >= 1, "part.min_part_faces must be >= 1");
  need(candidate_iou_threshold > 0 && candidate_iou_threshold <= 1,
       "articulate.candidate_iou_threshold must lie in (0, 1]");
  need(cavity.ring_px >= 1, "cavity.ring_px must be >= 1");
  need(cavity.r_fit > 0, "cavity.r_fit must be > 0");
  need(cavity.min_fit_points >= 3, "cavity.min_fit_points must be >= 3");
  need(cavity.min_inlier_fraction > 0 && cavity.min_inlier_fraction <= 1,
       "cavity.min_inlier_fraction must lie in (0, 1]");
  need(cavity.fit_thickness > 0, "cavity.fit_thickness must be > 0");
  need(cavity.d_min > 0, "cavity.d_min must be > 0");
  need(cavity_max_depth >= 0, "cavity.max_depth must be >= 0");
  need(cavity.wall_margin >= 0, "cavity.wall_margin must be >= 0");
  need(dedup.tau_low > 0 && dedup.tau_low < dedup.tau_dup && dedup.tau_dup <= 1,
       "assemble thresholds must satisfy 0 < tau_low < tau_dup <= 1");
  need(dedup.max_subset >= 1, "assemble.max_subset must be >= 1");
  need(carve_margin >= 0, "assemble.carve_margin must be >= 0");
  const auto pow2 = [](int n) { return n >= 64 && (n & (n - 1)) == 0; };
  need(pow2(exporting.scene_texture_size) && pow2(exporting.part_texture_size),
       "texture sizes must be powers of two >= 64");
  need(dilation_steps >= 0, "texture.dilation_steps must be >= 0");
  need(blur_radius >= 0, "texture.blur_radius must be >= 0");
  need(!eval_taus.empty(), "eval.taus must not be empty");
  for (double t : eval_taus) need(t > 0 && t <= 1, "eval.taus must lie in (0, 1]");
  need(mod_oe_deg > 0 && mod_md > 0, "eval MOD cutoffs must be > 0");
  need(match_radius >= 0, "eval.match_radius must be >= 0");
}

CavityOptions PipelineConfig::cavity_options() const {
  CavityOptions o = cavity;
  if (cavity_max_depth > 0) o.max_depth = cavity_max_depth;
  return o;
}

EvalOptions PipelineConfig::eval_options() const {
  EvalOptions o;
  o.taus = eval_taus;
  o.cutoffs = {mod_oe_deg, mod_md};
  o.match_radius = match_radius;
  o.macro = macro;
  return o;
}

std::string serialize_config(const PipelineConfig& cfg) {
  PipelineConfig c = cfg;
  std::ostringstream o;
  std::string section;
  for (const auto& e : entries(c)) {
    if (e.section != section) {
      o << (section.empty() ? "" : "\n") << "[" << e.section << "]\n";
      section = e.section;
    }
    o << e.key << " = " << render(e.field) << "\n";
  }
  return o.str();
}

PipelineConfig parse_config(const std::string& text, PipelineConfig c) {
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string dotted = section.empty() ? key : section + "." + key;
    assign(find_field(c, dotted), trim(line.substr(eq + 1)), dotted);
  }
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str(), std::move(base));
}

void set_config_value(PipelineConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidInput("override '" + assignment + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  Field f = find_field(c, key);
  if (std::holds_alternative<std::string*>(f) && (value.empty() || value.front() != '"')) value = quote(value);
  assign(f, value, key);
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  PipelineConfig c = cfg;
  c.out_dir.clear();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace openable
