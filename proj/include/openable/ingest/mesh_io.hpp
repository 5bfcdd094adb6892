#pragma once

#include <filesystem>

#include "openable/core/types.hpp"

namespace openable {

/// Reads PLY (ASCII or binary little-endian; float/double coordinates;
/// uchar or float colors) or OBJ (optional "v x y z r g b" colors; polygon
/// faces are fan-triangulated). Throws LoadError.
TriMesh read_mesh(const std::filesystem::path& path);

enum class PlyColorEncoding { kUchar, kFloat };

/// Binary little-endian PLY with double coordinates. Float colors are exact
/// (used for checkpoints); uchar colors are the common interchange form.
void write_ply(const std::filesystem::path& path, const TriMesh& mesh,
               PlyColorEncoding colors = PlyColorEncoding::kUchar);

}  // namespace openable
