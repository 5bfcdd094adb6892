#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "openable/core/articulation.hpp"
#include "openable/core/types.hpp"

namespace openable {

using Json = nlohmann::json;

Json to_json(const Vec3& v);
Vec3 vec3_from_json(const Json& j);

Json to_json(const Articulation& a);
Articulation articulation_from_json(const Json& j);

Json to_json(const Obb& box);
Obb obb_from_json(const Json& j);

Json to_json(const Plane& p);
Plane plane_from_json(const Json& j);

/// Inline mesh encoding used by checkpoints (doubles round-trip exactly).
Json to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const Json& j);

/// Reads and parses a JSON file; throws LoadError on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);
/// Writes with 2-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace openable
