#pragma once

#include <optional>
#include <string_view>

#include "openable/articulate/articulate.hpp"
#include "openable/ingest/frames.hpp"

namespace openable {

enum class DepthSource { kImage, kHit, kMesh };
std::string_view to_string(DepthSource s);
DepthSource depth_source_from_string(std::string_view s);

struct InnerBox {
  TriMesh mesh;  // open-front shell, world frame
  double depth = 0.0;
  DepthSource source = DepthSource::kMesh;
};

struct CavityOptions {
  int ring_px = 10;
  double r_fit = 0.15;
  int min_fit_points = 8;
  double min_inlier_fraction = 0.5;
  double fit_thickness = 0.02;
  int fit_iterations = 200;
  std::uint64_t fit_seed = 7;
  double d_min = 0.05;
  std::optional<double> max_depth;
  double wall_margin = 0.005;
  Rgb color{0.5f, 0.5f, 0.5f};
};

/// Farthest valid depth pixel around the mask (mask bounding box grown by
/// ring_px, minus the mask), measured from the front face along +n_front.
std::optional<double> depth_image_bound(const ValidatedPart& part, const CalibratedFrame& frame,
                                        const Mask& mask, int ring_px = 10);

/// Probe from the OBB center along +n_front; the hit counts when a plane fits
/// the scene vertices around it. `skip` marks faces to ignore (the part's own);
/// hits within the part's OBB slab are ignored as well.
std::optional<double> depth_hit_bound(const ValidatedPart& part, const TriMesh& scene,
                                      const std::vector<bool>& skip, const CavityOptions& opts);

/// Distance from the front face center along +n_front to the exit of the bounds.
double depth_mesh_bound(const ValidatedPart& part, const Obb& scene_bounds);

/// Axis-aligned bounds of a mesh as an Obb.
Obb mesh_bounds(const TriMesh& mesh);

InnerBox build_inner_box(const ValidatedPart& part, std::optional<double> d_image,
                         std::optional<double> d_hit, double d_mesh, const CavityOptions& opts);

}  // namespace openable
