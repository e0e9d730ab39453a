// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

namespace detgeom {

/// Corner form (x1, y1, x2, y2) with x1 <= x2 and y1 <= y2.
struct Corners {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  friend bool operator==(const Corners&, const Corners&) = default;
};

/// Axis-aligned box in center form. This is the canonical representation
/// throughout the library; corner form exists for I/O.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  static Box from_corners(const Corners& c) {
    return Box{0.5 * (c.x1 + c.x2), 0.5 * (c.y1 + c.y2), c.x2 - c.x1,
               c.y2 - c.y1};
  }
  static Box from_corners(double x1, double y1, double x2, double y2) {
    return from_corners(Corners{x1, y1, x2, y2});
  }

  Corners corners() const {
    return Corners{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  }

  std::array<double, 4> as_array() const { return {cx, cy, w, h}; }
  static Box from_array(const std::array<double, 4>& a) {
    return Box{a[0], a[1], a[2], a[3]};
  }

  friend bool operator==(const Box&, const Box&) = default;
};

/// Image-size box in normalized coordinates.
inline constexpr Box kImageBox{0.5, 0.5, 1.0, 1.0};

/// Throws InputError unless w, h are finite and non-negative.
void validate(const Box& b);

}  // namespace detgeom
