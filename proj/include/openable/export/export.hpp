#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "openable/assemble/assemble.hpp"
#include "openable/core/json_util.hpp"
#include "openable/texture/texture.hpp"

namespace openable {

struct ExportOptions {
  int scene_texture_size = 2048;
  int part_texture_size = 512;
  bool textures = true;
  int dilation_steps = 4;
  double blur_radius = 1.0;
  std::string robot_name = "scene";
};

/// Writes <stem>.obj, <stem>.mtl and <stem>.png (UVs with v flipped to OBJ convention).
void write_textured_obj(const std::filesystem::path& dir, const std::string& stem, const TexturedMesh& tex);

/// Plain OBJ with per-vertex colors as "v x y z r g b".
void write_colored_obj(const std::filesystem::path& path, const TriMesh& mesh);

struct UrdfVisual {
  std::string mesh;  // relative path
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
};

struct UrdfLink {
  std::string name;
  std::vector<UrdfVisual> visuals;
};

struct UrdfJoint {
  std::string name;
  std::string type;  // fixed, prismatic, revolute
  std::string parent, child;
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  double lower = 0.0, upper = 0.0;
};

struct UrdfDocument {
  std::string robot_name;
  std::vector<UrdfLink> links;
  std::vector<UrdfJoint> joints;
};

/// Document for a scene; mesh references follow the export layout.
UrdfDocument make_urdf(const InteractiveScene& scene, const std::string& robot_name);
std::string urdf_xml(const UrdfDocument& doc);
void check_tree(const UrdfDocument& doc);  // throws ExportError

struct ExportResult {
  UrdfDocument urdf;
  std::filesystem::path urdf_path;
  std::filesystem::path scene_json_path;
};

/// meshes/*.obj|mtl|png, scene.urdf and scene.json under out_dir.
ExportResult export_scene(const InteractiveScene& scene, const std::filesystem::path& out_dir,
                          const ExportOptions& opts = {});

struct ImportedJoint {
  std::string name, parent, child;
  Articulation world;  // origin and axis in the root frame
};

struct ImportedUrdf {
  UrdfDocument doc;
  std::string root;
  std::vector<ImportedJoint> movable;  // document order
  std::map<std::string, Se3Pose> link_poses;  // rest pose of every link in the root frame
};

/// Parses a URDF; throws ImportError on malformed XML, unsupported joint
/// types or a joint graph that is not a tree.
ImportedUrdf import_urdf(const std::filesystem::path& path);
ImportedUrdf parse_urdf(const std::string& xml);

Mat3 rpy_to_matrix(const Vec3& rpy);

Json scene_json(const InteractiveScene& scene);
void export_scene_json(const InteractiveScene& scene, const std::filesystem::path& path);

/// Object entry of a scene JSON, as read back for evaluation or viewing.
struct SceneObjectRecord {
  std::string object_id;
  Articulation articulation;
  Obb obb;
  std::vector<int> point_set;
  std::string part_mesh, inner_box_mesh;
};
std::vector<SceneObjectRecord> load_scene_json(const std::filesystem::path& path);

/// Transforms at states {0, ρ/2, ρ} per object.
Json golden_vectors(const InteractiveScene& scene);

enum class Verdict { kOk, kWrongAxis, kWrongOrigin, kWrongType };
std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

struct VerdictRecord {
  std::string object_id;
  Verdict verdict = Verdict::kOk;
  double state = 0.0;
};

/// Viewer verdicts file {"verdicts": [{object_id, verdict, state}]}; throws FormatError.
std::vector<VerdictRecord> load_verdicts(const std::filesystem::path& path);
void save_verdicts(const std::filesystem::path& path, const std::vector<VerdictRecord>& verdicts);

}  // namespace openable
