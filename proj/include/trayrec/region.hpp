#pragma once

#include <string>

#include "trayrec/errors.hpp"

namespace trayrec {

/// Axis-aligned pixel rectangle, top-left origin.
struct Region {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Region&, const Region&) = default;

  int right() const noexcept { return x + width; }
  int bottom() const noexcept { return y + height; }

  bool contains(const Region& inner) const noexcept {
    return inner.x >= x && inner.y >= y && inner.right() <= right() && inner.bottom() <= bottom();
  }
};

inline void validate_region(const Region& r, const std::string& what) {
  if (r.width <= 0 || r.height <= 0) {
    throw ValidationError(what + " has non-positive width or height");
  }
}

}  // namespace trayrec
