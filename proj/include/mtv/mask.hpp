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

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mtv/errors.hpp"

namespace mtv {

// Binary occupancy grid; 0/1 in memory, 0/255 on disk.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // row-major, one byte per pixel

  static Mask zeros(int width, int height) {
    if (width < 1 || height < 1)
      throw InvalidParameter("Mask: dimensions must be >= 1x1, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    Mask m;
    m.width = width;
    m.height = height;
    m.data.assign(static_cast<std::size_t>(width) * height, 0);
    return m;
  }

  bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }

  void set(int x, int y, bool fg) {
    data[static_cast<std::size_t>(y) * width + x] = fg ? 1 : 0;
  }

  std::size_t foreground_count() const {
    return static_cast<std::size_t>(std::count_if(data.begin(), data.end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  }

  bool empty_foreground() const { return foreground_count() == 0; }

  bool operator==(const Mask& rhs) const {
    return width == rhs.width && height == rhs.height && data == rhs.data;
  }
};

using MaskSequence = std::vector<Mask>;

struct ObjectDescription {
  std::string text;
  std::string object_id;
};

inline bool same_size(const Mask& a, const Mask& b) {
  return a.width == b.width && a.height == b.height;
}

inline Mask mask_union(const Mask& a, const Mask& b) {
  if (!same_size(a, b))
    throw DimensionMismatch("mask_union: " + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height));
  Mask out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = (a.data[i] | b.data[i]) ? 1 : 0;
  return out;
}

// Fills [x0,x1) x [y0,y1), clipped to the mask bounds.
inline void fill_rect(Mask& mask, int x0, int y0, int x1, int y1) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, mask.width);
  y1 = std::min(y1, mask.height);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) mask.set(x, y, true);
}

// Shifts foreground by (dx, dy); pixels pushed past the border are dropped.
inline Mask translate_mask(const Mask& mask, int dx, int dy) {
  Mask out = Mask::zeros(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y) {
    const int ny = y + dy;
    if (ny < 0 || ny >= mask.height) continue;
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      const int nx = x + dx;
      if (nx >= 0 && nx < mask.width) out.set(nx, ny, true);
    }
  }
  return out;
}

inline void check_uniform_sequence(const MaskSequence& seq, const std::string& what) {
  if (seq.empty()) throw InvalidParameter(what + ": empty mask sequence");
  for (std::size_t t = 1; t < seq.size(); ++t)
    if (!same_size(seq[t], seq[0]))
      throw DimensionMismatch(what + ": frame " + std::to_string(t) +
                              " dimensions differ from frame 0");
}

// Frame-0 mask of one object sequence.
inline Mask initial_frame_prior(const MaskSequence& seq) {
  if (seq.empty()) throw InvalidParameter("initial_frame_prior: empty sequence");
  return seq.front();
}

// Multi-object scenes: frame-0 masks are unioned into one foreground prior.
inline Mask initial_frame_prior(const std::vector<MaskSequence>& sequences) {
  if (sequences.empty()) throw InvalidParameter("initial_frame_prior: no sequences");
  Mask prior = initial_frame_prior(sequences.front());
  for (std::size_t i = 1; i < sequences.size(); ++i)
    prior = mask_union(prior, initial_frame_prior(sequences[i]));
  return prior;
}

}  // namespace mtv
