#include "openable/lift/mask_ops.hpp"

#include <algorithm>
#include <vector>

namespace openable {

Mask fill_holes(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Raster<std::uint8_t> outside(w, h, 0);
  std::vector<std::pair<int, int>> stack;
  auto seed = [&](int x, int y) {
    if (mask.at(x, y) == 0 && !outside.at(x, y)) {
      outside.at(x, y) = 1;
      stack.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  Mask out(w, h, 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = outside[i] ? 0 : 1;
  return out;
}

Mask dilate(const Mask& mask, int radius) {
  if (radius <= 0) return mask;
  const int w = mask.width();
  const int h = mask.height();
  // separable max filter
  Mask rows(w, h, 0);
  for (int y = 0; y < h; ++y) {
    int last_on = -1000000;
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y)) last_on = x;
      if (x - last_on <= radius) rows.at(x, y) = 1;
    }
    last_on = 1000000;
    for (int x = w - 1; x >= 0; --x) {
      if (mask.at(x, y)) last_on = x;
      if (last_on - x <= radius) rows.at(x, y) = 1;
    }
  }
  Mask out(w, h, 0);
  for (int x = 0; x < w; ++x) {
    int last_on = -1000000;
    for (int y = 0; y < h; ++y) {
      if (rows.at(x, y)) last_on = y;
      if (y - last_on <= radius) out.at(x, y) = 1;
    }
    last_on = 1000000;
    for (int y = h - 1; y >= 0; --y) {
      if (rows.at(x, y)) last_on = y;
      if (last_on - y <= radius) out.at(x, y) = 1;
    }
  }
  return out;
}

std::optional<PixelBox> bounding_box(const Mask& mask) {
  PixelBox b{mask.width(), mask.height(), -1, -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
    }
  }
  if (b.x1 < 0) return std::nullopt;
  return b;
}

std::optional<std::pair<double, double>> mask_centroid(const Mask& mask) {
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      sx += x + 0.5;
      sy += y + 0.5;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return std::make_pair(sx / static_cast<double>(n), sy / static_cast<double>(n));
}

}  // namespace openable
