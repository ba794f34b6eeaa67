// Copyright 2026 The mtvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mtv/errors.hpp"

namespace mtv {

// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  static Frame black(int width, int height) {
    if (width < 1 || height < 1)
      throw InvalidParameter("Frame: dimensions must be >= 1x1, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    Frame f;
    f.width = width;
    f.height = height;
    f.rgb.assign(static_cast<std::size_t>(width) * height * 3, 0);
    return f;
  }

  std::uint8_t channel(int x, int y, int c) const {
    return rgb[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }

  std::array<std::uint8_t, 3> pixel(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[i], rgb[i + 1], rgb[i + 2]};
  }

  bool operator==(const Frame& rhs) const {
    return width == rhs.width && height == rhs.height && rgb == rhs.rgb;
  }
};

}  // namespace mtv
