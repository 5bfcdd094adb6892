#include "openable/core/json_util.hpp"

#include <fstream>

namespace openable {

Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json to_json(const Articulation& a) {
  return Json{{"type", std::string(to_string(a.type))},
              {"origin", to_json(a.origin)},
              {"axis", to_json(a.axis.vec())},
              {"range", a.range}};
}

Articulation articulation_from_json(const Json& j) {
  Articulation a;
  a.type = joint_type_from_string(j.at("type").get<std::string>());
  a.origin = vec3_from_json(j.at("origin"));
  a.axis = UnitVec3::normalize(vec3_from_json(j.at("axis")));
  a.range = j.at("range").get<double>();
  return a;
}

Json to_json(const Obb& box) {
  return Json{{"center", to_json(box.center)},
              {"axes", Json::array({to_json(box.axes[0].vec()), to_json(box.axes[1].vec()),
                                    to_json(box.axes[2].vec())})},
              {"extents", to_json(box.extents)}};
}

Obb obb_from_json(const Json& j) {
  Obb box;
  box.center = vec3_from_json(j.at("center"));
  for (int k = 0; k < 3; ++k) box.axes[k] = UnitVec3::normalize(vec3_from_json(j.at("axes").at(k)));
  box.extents = vec3_from_json(j.at("extents"));
  return box;
}

Json to_json(const Plane& p) {
  return Json{{"normal", to_json(p.normal.vec())}, {"offset", p.offset}, {"thickness", p.thickness}};
}

Plane plane_from_json(const Json& j) {
  return Plane{UnitVec3::normalize(vec3_from_json(j.at("normal"))), j.at("offset").get<double>(),
               j.at("thickness").get<double>()};
}

Json to_json(const TriMesh& mesh) {
  Json verts = Json::array();
  for (const auto& v : mesh.vertices) {
    verts.push_back(v.x());
    verts.push_back(v.y());
    verts.push_back(v.z());
  }
  Json faces = Json::array();
  for (const auto& f : mesh.faces) {
    faces.push_back(f[0]);
    faces.push_back(f[1]);
    faces.push_back(f[2]);
  }
  Json out{{"vertices", std::move(verts)}, {"faces", std::move(faces)}};
  if (mesh.has_colors()) {
    Json cols = Json::array();
    for (const auto& c : mesh.colors) {
      cols.push_back(c[0]);
      cols.push_back(c[1]);
      cols.push_back(c[2]);
    }
    out["colors"] = std::move(cols);
  }
  return out;
}

TriMesh mesh_from_json(const Json& j) {
  TriMesh mesh;
  const auto& v = j.at("vertices");
  const auto& f = j.at("faces");
  if (v.size() % 3 != 0 || f.size() % 3 != 0) throw InvalidInput("mesh arrays not a multiple of 3");
  for (std::size_t i = 0; i < v.size(); i += 3) {
    mesh.vertices.emplace_back(v[i].get<double>(), v[i + 1].get<double>(), v[i + 2].get<double>());
  }
  for (std::size_t i = 0; i < f.size(); i += 3) {
    mesh.faces.push_back({f[i].get<int>(), f[i + 1].get<int>(), f[i + 2].get<int>()});
  }
  if (j.contains("colors")) {
    const auto& c = j["colors"];
    for (std::size_t i = 0; i + 2 < c.size(); i += 3) {
      mesh.colors.push_back({c[i].get<float>(), c[i + 1].get<float>(), c[i + 2].get<float>()});
    }
  }
  mesh.validate();
  return mesh;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace openable
