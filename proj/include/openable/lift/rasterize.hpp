#pragma once

#include <string>

#include "openable/core/raster.hpp"
#include "openable/core/types.hpp"
#include "openable/ingest/frames.hpp"

namespace openable {

inline constexpr double kNearPlane = 0.01;

struct FaceVisibilityMap {
  std::string frame_id;
  Raster<int> face;      // -1 = background
  Raster<double> depth;  // camera z, 0 where face == -1
};

/// Z-buffered rasterization sampled at pixel centers. Triangles are clipped
/// against z = kNearPlane and never culled. Depth ties go to the lower face index.
FaceVisibilityMap rasterize_view(const TriMesh& mesh, const Se3Pose& pose,
                                 const Intrinsics& intrinsics, std::string frame_id = {});

inline FaceVisibilityMap rasterize_view(const TriMesh& mesh, const CalibratedFrame& frame) {
  return rasterize_view(mesh, frame.pose, frame.intrinsics, frame.frame_id);
}

}  // namespace openable
