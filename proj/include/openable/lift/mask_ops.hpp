#pragma once

#include <optional>
#include <utility>

#include "openable/core/raster.hpp"

namespace openable {

struct PixelBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive
};

/// Flood-fills the off-pixels reachable from the border (4-connected);
/// every other off-pixel is a hole and is switched on. Idempotent.
Mask fill_holes(const Mask& mask);

/// Square-neighbourhood (Chebyshev) dilation.
Mask dilate(const Mask& mask, int radius);

std::optional<PixelBox> bounding_box(const Mask& mask);

/// Mean pixel-center coordinate of the on-pixels.
std::optional<std::pair<double, double>> mask_centroid(const Mask& mask);

}  // namespace openable
