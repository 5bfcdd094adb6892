#pragma once

#include <array>
#include <vector>

#include "openable/core/png_io.hpp"
#include "openable/core/raster.hpp"
#include "openable/core/types.hpp"

namespace openable {

struct ChartRect {
  int x = 0, y = 0, w = 0, h = 0;  // texel footprint
};

/// Per-corner UVs as indices into `uvs`; a vertex has one UV per chart.
struct UvLayout {
  int size = 0;
  std::vector<Vec2> uvs;                    // texel units / size, v grows downward (image rows)
  std::vector<std::array<int, 3>> face_uv;  // per face
  std::vector<int> face_chart;              // per face
  std::vector<ChartRect> charts;
  double texels_per_meter = 0.0;
};

struct TexturedMesh {
  TriMesh mesh;
  UvLayout layout;
  Raster<Rgb> texture;
  Mask valid;
  Raster<int> chart_id;  // -1 outside every chart footprint
};

struct UnwrapOptions {
  double max_angle_deg = 60.0;
  int gutter = 2;
  double texels_per_meter = 0.0;  // 0 = largest density that fits
  int max_split_depth = 4;
};

/// Planar charts split at normal discontinuities, shelf-packed with gutters.
/// Throws UnwrapError when a chart cannot fit even after splitting.
UvLayout unwrap(const TriMesh& mesh, int texture_size, const UnwrapOptions& opts = {});

/// Barycentric bake of vertex colors into the layout's atlas.
TexturedMesh bake(const TriMesh& mesh, const UvLayout& layout);

/// Nearest-valid dilation (BFS, within chart footprints) then a chart-local
/// Gaussian blur with sigma = blur_radius texels.
TexturedMesh repair_and_smooth(TexturedMesh tex, int dilation_steps = 4, double blur_radius = 1.0);

TexturedMesh texture_mesh(const TriMesh& mesh, int texture_size, const UnwrapOptions& opts = {},
                          int dilation_steps = 4, double blur_radius = 1.0);

Rgb8Image to_rgb8(const Raster<Rgb>& texture);

}  // namespace openable
