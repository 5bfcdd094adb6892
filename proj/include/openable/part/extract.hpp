#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "openable/core/types.hpp"
#include "openable/ingest/frames.hpp"
#include "openable/lift/fuse.hpp"

namespace openable {

struct PartCandidate {
  std::string instance_id;
  TriMesh part_mesh;                // world frame
  std::vector<int> source_vertices;  // part vertex -> scene vertex
  std::vector<int> source_faces;     // part face -> scene face (provenance)
  Plane front_plane;                 // normal points into the furniture
  std::vector<SupportingView> views;
};

struct PartExtractOptions {
  double thickness = 0.03;
  double vertical_tol_deg = 10.0;
  int n_planes = 3;
  int ransac_iterations = 1000;
  std::uint64_t ransac_seed = 7;
  int min_part_faces = 20;
};

struct Rejection {
  std::string instance_id;
  std::string stage;
  std::string reason;
};

/// Plane fit, largest-contour selection and clipping of one fused instance.
/// Returns nullopt (and fills *why when given) when the instance is rejected.
std::optional<PartCandidate> extract_part(const FusedInstance& instance, const TriMesh& mesh,
                                          const std::vector<CalibratedFrame>& frames,
                                          const PartExtractOptions& opts,
                                          std::string* why = nullptr);

/// Area of the convex hull of points projected onto the plane.
double contour_area(const std::vector<Vec3>& points, const Plane& plane);

void write_rejections(const std::filesystem::path& path, const std::vector<Rejection>& rejected);

}  // namespace openable
