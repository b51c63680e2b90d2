#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "trayrec/errors.hpp"
#include "trayrec/region.hpp"

namespace trayrec {

/// Row-major 8-bit RGB pixels.
struct RgbPatch {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * 3 bytes

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
};

/// 8x8x8 RGB color histogram: each channel bucketed by value / 32, counts
/// reported as reals. Callers normalize the result before matching.
inline std::vector<double> histogram_descriptor(const RgbPatch& patch) {
  if (patch.height < 1 || patch.width < 1 || patch.pixels.empty()) {
    throw EmptyPatchError("histogram descriptor needs a non-empty patch");
  }
  if (patch.pixels.size() != patch.pixel_count() * 3) {
    throw InvalidParameterError("patch byte count does not match height * width * 3");
  }
  std::vector<double> bins(512, 0.0);
  for (std::size_t p = 0; p < patch.pixel_count(); ++p) {
    const std::uint8_t r = patch.pixels[p * 3];
    const std::uint8_t g = patch.pixels[p * 3 + 1];
    const std::uint8_t b = patch.pixels[p * 3 + 2];
    bins[static_cast<std::size_t>(r / 32) * 64 + static_cast<std::size_t>(g / 32) * 8 +
         static_cast<std::size_t>(b / 32)] += 1.0;
  }
  return bins;
}

/// Copies the pixels of `area` (absolute coordinates) out of a full image.
inline RgbPatch crop_patch(const RgbPatch& image, const Region& area) {
  if (area.x < 0 || area.y < 0 || area.right() > image.width || area.bottom() > image.height ||
      area.width <= 0 || area.height <= 0) {
    throw InvalidParameterError("crop area lies outside the image");
  }
  RgbPatch out;
  out.height = area.height;
  out.width = area.width;
  out.pixels.reserve(static_cast<std::size_t>(area.width) * area.height * 3);
  for (int row = 0; row < area.height; ++row) {
    const std::size_t begin =
        (static_cast<std::size_t>(area.y + row) * image.width + area.x) * 3;
    out.pixels.insert(out.pixels.end(), image.pixels.begin() + begin,
                      image.pixels.begin() + begin + static_cast<std::size_t>(area.width) * 3);
  }
  return out;
}

}  // namespace trayrec
