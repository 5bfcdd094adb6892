#include "openable/export/export.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "openable/articulate/articulate.hpp"
#include "openable/core/png_io.hpp"

namespace openable {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string vec(const Vec3& v) { return num(v.x()) + " " + num(v.y()) + " " + num(v.z()); }

std::ofstream open_out(const fs::path& path) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ExportError("cannot write " + path.string());
  return out;
}

}  // namespace

void write_textured_obj(const fs::path& dir, const std::string& stem, const TexturedMesh& tex) {
  const TriMesh& m = tex.mesh;
  {
    std::ofstream obj = open_out(dir / (stem + ".obj"));
    obj << "mtllib " << stem << ".mtl\n";
    for (const auto& v : m.vertices) obj << "v " << vec(v) << "\n";
    for (const auto& uv : tex.layout.uvs) obj << "vt " << num(uv.x()) << " " << num(1.0 - uv.y()) << "\n";
    obj << "usemtl " << stem << "\n";
    for (std::size_t f = 0; f < m.face_count(); ++f) {
      obj << "f";
      for (int k = 0; k < 3; ++k) obj << " " << m.faces[f][k] + 1 << "/" << tex.layout.face_uv[f][k] + 1;
      obj << "\n";
    }
  }
  {
    std::ofstream mtl = open_out(dir / (stem + ".mtl"));
    mtl << "newmtl " << stem << "\nKa 1 1 1\nKd 1 1 1\nKs 0 0 0\nd 1\nillum 1\nmap_Kd " << stem << ".png\n";
  }
  write_png_rgb8(dir / (stem + ".png"), to_rgb8(tex.texture));
}

void write_colored_obj(const fs::path& path, const TriMesh& mesh) {
  std::ofstream obj = open_out(path);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    obj << "v " << vec(mesh.vertices[v]);
    if (mesh.has_colors()) {
      for (float c : mesh.colors[v]) obj << " " << num(c);
    }
    obj << "\n";
  }
  for (const auto& f : mesh.faces) obj << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

UrdfDocument make_urdf(const InteractiveScene& scene, const std::string& robot_name) {
  UrdfDocument d;
  d.robot_name = robot_name;
  d.links.push_back({"background", {{"meshes/background.obj"}}});
  for (const auto& o : scene.objects) {
    const std::string& id = o.object_id;
    const Articulation& a = o.part.articulation;
    d.links.push_back({id + "_base", {{"meshes/" + id + "_base.obj"}}});
    d.links.push_back({id + "_part", {{"meshes/" + id + "_part.obj", -a.origin}}});
    UrdfJoint fixed;
    fixed.name = id + "_base_fixed";
    fixed.type = "fixed";
    fixed.parent = "background";
    fixed.child = id + "_base";
    d.joints.push_back(fixed);
    UrdfJoint j;
    j.name = id + "_joint";
    j.type = std::string(to_string(a.type));
    j.parent = id + "_base";
    j.child = id + "_part";
    j.xyz = a.origin;
    j.axis = a.axis.vec();
    j.lower = 0.0;
    j.upper = a.range;
    d.joints.push_back(j);
  }
  return d;
}

std::string urdf_xml(const UrdfDocument& doc) {
  std::ostringstream x;
  x << "<?xml version=\"1.0\"?>\n<robot name=\"" << doc.robot_name << "\">\n";
  for (const auto& l : doc.links) {
    x << "  <link name=\"" << l.name << "\">\n";
    for (const auto& v : l.visuals) {
      x << "    <visual>\n      <origin xyz=\"" << vec(v.xyz) << "\" rpy=\"" << vec(v.rpy) << "\"/>\n"
        << "      <geometry>\n        <mesh filename=\"" << v.mesh << "\"/>\n      </geometry>\n    </visual>\n";
    }
    x << "    <inertial>\n      <mass value=\"1\"/>\n"
      << "      <inertia ixx=\"1\" ixy=\"0\" ixz=\"0\" iyy=\"1\" iyz=\"0\" izz=\"1\"/>\n    </inertial>\n";
    x << "  </link>\n";
  }
  for (const auto& j : doc.joints) {
    x << "  <joint name=\"" << j.name << "\" type=\"" << j.type << "\">\n"
      << "    <parent link=\"" << j.parent << "\"/>\n    <child link=\"" << j.child << "\"/>\n"
      << "    <origin xyz=\"" << vec(j.xyz) << "\" rpy=\"" << vec(j.rpy) << "\"/>\n";
    if (j.type != "fixed") {
      x << "    <axis xyz=\"" << vec(j.axis) << "\"/>\n"
        << "    <limit lower=\"" << num(j.lower) << "\" upper=\"" << num(j.upper)
        << "\" effort=\"100\" velocity=\"1\"/>\n";
    }
    x << "  </joint>\n";
  }
  x << "</robot>\n";
  return x.str();
}

namespace {

// Returns the root; throws `E` when the joints do not form a tree over the links.
template <typename E>
std::string tree_root(const UrdfDocument& doc) {
  std::set<std::string> links;
  for (const auto& l : doc.links) {
    if (!links.insert(l.name).second) throw E("duplicate link " + l.name);
  }
  std::map<std::string, std::string> parent;
  for (const auto& j : doc.joints) {
    if (!links.count(j.parent) || !links.count(j.child)) {
      throw E("joint " + j.name + " references an unknown link");
    }
    if (!parent.emplace(j.child, j.parent).second) throw E("link " + j.child + " has two parent joints");
  }
  std::vector<std::string> roots;
  for (const auto& l : links) {
    if (!parent.count(l)) roots.push_back(l);
  }
  if (roots.size() != 1) throw E("joint graph has " + std::to_string(roots.size()) + " roots (cycle or forest)");
  for (const auto& l : links) {
    std::set<std::string> seen;
    std::string cur = l;
    while (parent.count(cur)) {
      if (!seen.insert(cur).second) throw E("joint graph contains a cycle through " + cur);
      cur = parent.at(cur);
    }
  }
  return roots.front();
}

}  // namespace

void check_tree(const UrdfDocument& doc) { tree_root<ExportError>(doc); }

Json scene_json(const InteractiveScene& scene) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    const Articulation& a = o.part.articulation;
    Json j;
    j["id"] = o.object_id;
    j["joint"] = to_json(a);
    j["obb"] = to_json(o.part.obb);
    j["front_normal"] = to_json(o.part.front_normal.vec());
    j["part_mesh"] = "meshes/" + o.object_id + "_part.obj";
    j["inner_box_mesh"] = "meshes/" + o.object_id + "_base.obj";
    j["inner_box"] = {{"depth", o.inner_box.depth}, {"source", std::string(to_string(o.inner_box.source))}};
    j["point_set"] = o.point_set();
    objects.push_back(std::move(j));
  }
  return Json{{"format", "openable-scene"},
              {"version", 1},
              {"units", {{"length", "meters"}, {"up", "z"}}},
              {"background", {{"mesh", "meshes/background.obj"}}},
              {"objects", objects}};
}

void export_scene_json(const InteractiveScene& scene, const fs::path& path) {
  write_json_file(path, scene_json(scene));
}

std::vector<SceneObjectRecord> load_scene_json(const fs::path& path) {
  const Json j = read_json_file(path);
  std::vector<SceneObjectRecord> out;
  try {
    if (j.at("format") != "openable-scene") throw FormatError(path.string() + ": not a scene file");
    for (const auto& o : j.at("objects")) {
      SceneObjectRecord r;
      r.object_id = o.at("id").get<std::string>();
      r.articulation = articulation_from_json(o.at("joint"));
      r.obb = obb_from_json(o.at("obb"));
      r.point_set = o.value("point_set", std::vector<int>{});
      r.part_mesh = o.at("part_mesh").get<std::string>();
      r.inner_box_mesh = o.at("inner_box_mesh").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

ExportResult export_scene(const InteractiveScene& scene, const fs::path& out_dir, const ExportOptions& opts) {
  const fs::path meshes = out_dir / "meshes";
  fs::create_directories(meshes);
  const auto emit = [&](const std::string& stem, const TriMesh& m, int size) {
    if (opts.textures && !m.empty()) {
      write_textured_obj(meshes, stem, texture_mesh(m, size, {}, opts.dilation_steps, opts.blur_radius));
    } else {
      write_colored_obj(meshes / (stem + ".obj"), m);
    }
  };
  emit("background", scene.background, opts.scene_texture_size);
  for (const auto& o : scene.objects) {
    emit(o.object_id + "_part", o.part.candidate.part_mesh, opts.part_texture_size);
    emit(o.object_id + "_base", o.inner_box.mesh, std::max(64, opts.part_texture_size / 4));
  }
  ExportResult r;
  r.urdf = make_urdf(scene, opts.robot_name);
  check_tree(r.urdf);
  r.urdf_path = out_dir / "scene.urdf";
  {
    std::ofstream f = open_out(r.urdf_path);
    f << urdf_xml(r.urdf);
  }
  r.scene_json_path = out_dir / "scene.json";
  export_scene_json(scene, r.scene_json_path);
  return r;
}

Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

namespace {

namespace pt = boost::property_tree;

Vec3 parse_vec(const std::string& s, const std::string& what) {
  std::istringstream in(s);
  Vec3 v;
  if (!(in >> v.x() >> v.y() >> v.z())) throw ImportError("malformed vector '" + s + "' in " + what);
  std::string rest;
  if (in >> rest) throw ImportError("malformed vector '" + s + "' in " + what);
  return v;
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ImportError("malformed number '" + s + "' in " + what);
  }
}

}  // namespace

ImportedUrdf parse_urdf(const std::string& xml) {
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ImportError(std::string("malformed URDF: ") + e.what());
  }
  const auto robot = tree.get_child_optional("robot");
  if (!robot) throw ImportError("URDF has no <robot> element");
  ImportedUrdf out;
  out.doc.robot_name = robot->get<std::string>("<xmlattr>.name", "");
  for (const auto& [tag, node] : *robot) {
    if (tag == "link") {
      UrdfLink l;
      l.name = node.get<std::string>("<xmlattr>.name", "");
      if (l.name.empty()) throw ImportError("link without a name");
      for (const auto& [vt, vis] : node) {
        if (vt != "visual") continue;
        UrdfVisual v;
        v.mesh = vis.get<std::string>("geometry.mesh.<xmlattr>.filename", "");
        v.xyz = parse_vec(vis.get<std::string>("origin.<xmlattr>.xyz", "0 0 0"), l.name);
        v.rpy = parse_vec(vis.get<std::string>("origin.<xmlattr>.rpy", "0 0 0"), l.name);
        l.visuals.push_back(v);
      }
      out.doc.links.push_back(std::move(l));
    } else if (tag == "joint") {
      UrdfJoint j;
      j.name = node.get<std::string>("<xmlattr>.name", "");
      j.type = node.get<std::string>("<xmlattr>.type", "");
      if (j.type != "fixed" && j.type != "prismatic" && j.type != "revolute") {
        throw ImportError("joint " + j.name + " has unsupported type '" + j.type + "'");
      }
      j.parent = node.get<std::string>("parent.<xmlattr>.link", "");
      j.child = node.get<std::string>("child.<xmlattr>.link", "");
      j.xyz = parse_vec(node.get<std::string>("origin.<xmlattr>.xyz", "0 0 0"), j.name);
      j.rpy = parse_vec(node.get<std::string>("origin.<xmlattr>.rpy", "0 0 0"), j.name);
      j.axis = parse_vec(node.get<std::string>("axis.<xmlattr>.xyz", "1 0 0"), j.name);
      if (j.type != "fixed") {
        if (!node.get_child_optional("limit")) throw ImportError("joint " + j.name + " has no <limit>");
        j.lower = parse_num(node.get<std::string>("limit.<xmlattr>.lower", "0"), j.name);
        j.upper = parse_num(node.get<std::string>("limit.<xmlattr>.upper", "0"), j.name);
        if (!(j.axis.norm() > 1e-12)) throw ImportError("joint " + j.name + " has a zero axis");
      }
      out.doc.joints.push_back(std::move(j));
    }
  }
  out.root = tree_root<ImportError>(out.doc);

  std::map<std::string, const UrdfJoint*> by_child;
  for (const auto& j : out.doc.joints) by_child[j.child] = &j;
  std::map<std::string, Se3Pose> world;
  std::function<Se3Pose(const std::string&)> frame = [&](const std::string& link) -> Se3Pose {
    if (link == out.root) return {};
    if (auto it = world.find(link); it != world.end()) return it->second;
    const UrdfJoint& j = *by_child.at(link);
    const Se3Pose p = frame(j.parent) * Se3Pose{rpy_to_matrix(j.rpy), j.xyz};
    world[link] = p;
    return p;
  };
  for (const auto& j : out.doc.joints) {
    if (j.type == "fixed") continue;
    const Se3Pose p = frame(j.parent) * Se3Pose{rpy_to_matrix(j.rpy), j.xyz};
    ImportedJoint ij;
    ij.name = j.name;
    ij.parent = j.parent;
    ij.child = j.child;
    ij.world.type = joint_type_from_string(j.type);
    ij.world.origin = p.translation;
    ij.world.axis = UnitVec3::normalize(p.rotation * j.axis);
    ij.world.range = j.upper;
    out.movable.push_back(ij);
  }
  out.link_poses[out.root] = Se3Pose{};
  for (const auto& l : out.doc.links) out.link_poses[l.name] = frame(l.name);
  return out;
}

ImportedUrdf import_urdf(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImportError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_urdf(s.str());
}

Json golden_vectors(const InteractiveScene& scene) {
  Json objects = Json::array();
  for (const auto& o : scene.objects) {
    const Articulation& a = o.part.articulation;
    Json samples = Json::array();
    for (const double s : {0.0, 0.5 * a.range, a.range}) {
      const Mat4 m = articulation_transform(a, s).matrix();
      std::vector<double> flat;
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) flat.push_back(m(r, c));
      }
      samples.push_back({{"state", s}, {"matrix", flat}});
    }
    objects.push_back({{"id", o.object_id}, {"joint", to_json(a)}, {"samples", samples}});
  }
  return Json{{"format", "openable-golden"}, {"layout", "row-major 4x4, world frame"}, {"objects", objects}};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kOk: return "ok";
    case Verdict::kWrongAxis: return "wrong-axis";
    case Verdict::kWrongOrigin: return "wrong-origin";
    case Verdict::kWrongType: return "wrong-type";
  }
  return "ok";
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "ok") return Verdict::kOk;
  if (s == "wrong-axis") return Verdict::kWrongAxis;
  if (s == "wrong-origin") return Verdict::kWrongOrigin;
  if (s == "wrong-type") return Verdict::kWrongType;
  throw FormatError("unknown verdict '" + std::string(s) + "'");
}

std::vector<VerdictRecord> load_verdicts(const fs::path& path) {
  const Json j = read_json_file(path);
  std::vector<VerdictRecord> out;
  if (!j.contains("verdicts") || !j["verdicts"].is_array()) {
    throw FormatError(path.string() + ": expected {\"verdicts\": [...]}");
  }
  int i = 0;
  for (const auto& r : j["verdicts"]) {
    try {
      VerdictRecord v;
      v.object_id = r.at("object_id").get<std::string>();
      v.verdict = verdict_from_string(r.at("verdict").get<std::string>());
      v.state = r.value("state", 0.0);
      out.push_back(std::move(v));
    } catch (const Json::exception& e) {
      throw FormatError(path.string() + ": " + e.what(), i);
    } catch (const FormatError& e) {
      throw FormatError(e.what(), i);
    }
    ++i;
  }
  return out;
}

void save_verdicts(const fs::path& path, const std::vector<VerdictRecord>& verdicts) {
  Json arr = Json::array();
  for (const auto& v : verdicts) {
    arr.push_back({{"object_id", v.object_id}, {"verdict", std::string(to_string(v.verdict))}, {"state", v.state}});
  }
  write_json_file(path, Json{{"verdicts", arr}});
}

}  // namespace openable
