#include "openable/ingest/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

namespace openable {

namespace {

static_assert(std::endian::native == std::endian::little, "PLY binary I/O assumes little-endian");

enum class Scalar { kI8, kU8, kI16, kU16, kI32, kU32, kF32, kF64 };

Scalar parse_scalar(const std::string& t, const std::filesystem::path& path) {
  if (t == "char" || t == "int8") return Scalar::kI8;
  if (t == "uchar" || t == "uint8") return Scalar::kU8;
  if (t == "short" || t == "int16") return Scalar::kI16;
  if (t == "ushort" || t == "uint16") return Scalar::kU16;
  if (t == "int" || t == "int32") return Scalar::kI32;
  if (t == "uint" || t == "uint32") return Scalar::kU32;
  if (t == "float" || t == "float32") return Scalar::kF32;
  if (t == "double" || t == "float64") return Scalar::kF64;
  throw LoadError(path.string() + ": unknown PLY scalar type '" + t + "'");
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::kI8:
    case Scalar::kU8:
      return 1;
    case Scalar::kI16:
    case Scalar::kU16:
      return 2;
    case Scalar::kI32:
    case Scalar::kU32:
    case Scalar::kF32:
      return 4;
    case Scalar::kF64:
      return 8;
  }
  return 0;
}

bool is_integral(Scalar s) { return s != Scalar::kF32 && s != Scalar::kF64; }

struct Property {
  std::string name;
  Scalar type = Scalar::kF32;
  bool is_list = false;
  Scalar count_type = Scalar::kU8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;
};

class PlyReader {
 public:
  PlyReader(std::istream& in, bool binary, const std::filesystem::path& path)
      : in_(in), binary_(binary), path_(path) {}

  double read(Scalar s) {
    if (!binary_) {
      double v = 0;
      if (!(in_ >> v)) fail("truncated ASCII body");
      return v;
    }
    unsigned char buf[8];
    const std::size_t n = scalar_size(s);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
      fail("truncated binary body");
    }
    switch (s) {
      case Scalar::kI8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
      case Scalar::kU8: return static_cast<double>(buf[0]);
      case Scalar::kI16: return static_cast<double>(load<std::int16_t>(buf));
      case Scalar::kU16: return static_cast<double>(load<std::uint16_t>(buf));
      case Scalar::kI32: return static_cast<double>(load<std::int32_t>(buf));
      case Scalar::kU32: return static_cast<double>(load<std::uint32_t>(buf));
      case Scalar::kF32: return static_cast<double>(load<float>(buf));
      case Scalar::kF64: return load<double>(buf);
    }
    return 0;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw LoadError(path_.string() + ": " + msg);
  }

 private:
  template <typename T>
  static T load(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
  }

  std::istream& in_;
  bool binary_;
  std::filesystem::path path_;
};

void push_face(TriMesh& mesh, const std::vector<int>& poly, std::size_t& dropped) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Face f{poly[0], poly[k], poly[k + 1]};
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      ++dropped;
      continue;
    }
    mesh.faces.push_back(f);
  }
}

TriMesh read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open mesh file " + path.string());

  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw LoadError(path.string() + ": missing 'ply' magic");

  bool binary = false;
  bool have_format = false;
  std::vector<Element> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw LoadError(path.string() + ": unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (kw == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (count < 0) throw LoadError(path.string() + ": malformed element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (elements.empty()) throw LoadError(path.string() + ": property before element");
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_scalar(ct, path);
        p.type = parse_scalar(it, path);
      } else {
        p.type = parse_scalar(t, path);
        ls >> p.name;
      }
      if (p.name.empty()) throw LoadError(path.string() + ": malformed property line");
      elements.back().props.push_back(p);
    } else if (kw == "end_header") {
      break;
    } else if (kw == "comment" || kw == "obj_info" || kw.empty()) {
      continue;
    } else {
      throw LoadError(path.string() + ": unexpected header keyword '" + kw + "'");
    }
  }
  if (!have_format) throw LoadError(path.string() + ": missing format line");
  if (!in) throw LoadError(path.string() + ": missing end_header");

  TriMesh mesh;
  PlyReader reader(in, binary, path);
  std::size_t dropped = 0;
  bool saw_vertex = false;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      saw_vertex = true;
      int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const auto& n = e.props[k].name;
        if (e.props[k].is_list) reader.fail("list property on vertex element");
        if (n == "x") ix = static_cast<int>(k);
        if (n == "y") iy = static_cast<int>(k);
        if (n == "z") iz = static_cast<int>(k);
        if (n == "red" || n == "r") ir = static_cast<int>(k);
        if (n == "green" || n == "g") ig = static_cast<int>(k);
        if (n == "blue" || n == "b") ib = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) reader.fail("vertex element lacks x/y/z");
      const bool colored = ir >= 0 && ig >= 0 && ib >= 0;
      mesh.vertices.resize(e.count);
      if (colored) mesh.colors.resize(e.count);
      std::vector<double> vals(e.props.size());
      for (std::size_t v = 0; v < e.count; ++v) {
        for (std::size_t k = 0; k < e.props.size(); ++k) vals[k] = reader.read(e.props[k].type);
        mesh.vertices[v] = Vec3(vals[ix], vals[iy], vals[iz]);
        if (colored) {
          auto chan = [&](int idx) {
            const double raw = vals[idx];
            return static_cast<float>(is_integral(e.props[idx].type) ? raw / 255.0 : raw);
          };
          mesh.colors[v] = {chan(ir), chan(ig), chan(ib)};
        }
      }
    } else if (e.name == "face") {
      std::vector<int> poly;
      for (std::size_t f = 0; f < e.count; ++f) {
        bool got = false;
        for (const auto& p : e.props) {
          if (p.is_list) {
            const auto n = static_cast<long long>(reader.read(p.count_type));
            if (n < 0 || n > 1024) reader.fail("bad face list length");
            poly.assign(static_cast<std::size_t>(n), 0);
            for (auto& idx : poly) idx = static_cast<int>(reader.read(p.type));
            if (p.name == "vertex_indices" || p.name == "vertex_index") got = true;
          } else {
            reader.read(p.type);
          }
        }
        if (!got) reader.fail("face element lacks vertex_indices");
        push_face(mesh, poly, dropped);
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const auto& p : e.props) {
          if (p.is_list) {
            const auto n = static_cast<long long>(reader.read(p.count_type));
            for (long long k = 0; k < n; ++k) reader.read(p.type);
          } else {
            reader.read(p.type);
          }
        }
      }
    }
  }
  if (!saw_vertex) throw LoadError(path.string() + ": no vertex element");
  if (dropped > 0) spdlog::warn("{}: dropped {} degenerate faces", path.string(), dropped);
  return mesh;
}

TriMesh read_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open mesh file " + path.string());
  TriMesh mesh;
  bool any_color = false;
  std::vector<Rgb> colors;
  std::vector<int> poly;
  std::size_t dropped = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw LoadError(path.string() + ":" + std::to_string(lineno) + ": malformed vertex");
      }
      mesh.vertices.emplace_back(x, y, z);
      double r, g, b;
      if (ls >> r >> g >> b) {
        any_color = true;
        colors.push_back({static_cast<float>(r), static_cast<float>(g), static_cast<float>(b)});
      } else {
        colors.push_back({1.0f, 1.0f, 1.0f});
      }
    } else if (kw == "f") {
      poly.clear();
      std::string tok;
      while (ls >> tok) {
        const long long idx = std::stoll(tok.substr(0, tok.find('/')));
        const long long n = static_cast<long long>(mesh.vertices.size());
        const long long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n) {
          throw LoadError(path.string() + ":" + std::to_string(lineno) +
                          ": face index out of range");
        }
        poly.push_back(static_cast<int>(resolved));
      }
      push_face(mesh, poly, dropped);
    }
  }
  if (any_color) mesh.colors = std::move(colors);
  if (dropped > 0) spdlog::warn("{}: dropped {} degenerate faces", path.string(), dropped);
  return mesh;
}

}  // namespace

TriMesh read_mesh(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw LoadError("mesh file not found: " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  TriMesh mesh;
  if (ext == ".ply") {
    mesh = read_ply(path);
  } else if (ext == ".obj") {
    mesh = read_obj(path);
  } else {
    throw LoadError("unsupported mesh extension '" + ext + "' for " + path.string());
  }
  try {
    mesh.validate();
  } catch (const InvalidInput& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return mesh;
}

void write_ply(const std::filesystem::path& path, const TriMesh& mesh, PlyColorEncoding colors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  const bool colored = mesh.has_colors();
  if (colored) {
    const char* t = colors == PlyColorEncoding::kFloat ? "float" : "uchar";
    out << "property " << t << " red\nproperty " << t << " green\nproperty " << t << " blue\n";
  }
  out << "element face " << mesh.faces.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const double xyz[3] = {mesh.vertices[v].x(), mesh.vertices[v].y(), mesh.vertices[v].z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
    if (colored) {
      if (colors == PlyColorEncoding::kFloat) {
        out.write(reinterpret_cast<const char*>(mesh.colors[v].data()), 3 * sizeof(float));
      } else {
        unsigned char rgb[3];
        for (int k = 0; k < 3; ++k) {
          rgb[k] = static_cast<unsigned char>(
              std::lround(std::clamp(mesh.colors[v][k], 0.0f, 1.0f) * 255.0f));
        }
        out.write(reinterpret_cast<const char*>(rgb), 3);
      }
    }
  }
  for (const auto& f : mesh.faces) {
    const unsigned char n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    const std::int32_t idx[3] = {f[0], f[1], f[2]};
    out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace openable
