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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtv/errors.hpp"
#include "mtv/json_util.hpp"

namespace mtv {

// Token bookkeeping for the multi-view latent layout: each view contributes
// one reference slot plus T frame slots. Blocks are opaque; only shape
// metadata and identity matter here, no tensor contents.
struct BlockShape {
  int c = 0;
  int h = 0;
  int w = 0;

  bool operator==(const BlockShape& rhs) const = default;

  std::string str() const {
    return "(" + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
  }
};

struct TokenBlock {
  BlockShape shape;
  std::uint64_t label = 0;  // caller-chosen identity, threaded through untouched
  bool reference = false;

  bool operator==(const TokenBlock& rhs) const = default;
};

// V rows of 1+T columns, row-major; column 0 of every row is the reference.
struct TokenGrid {
  int views = 0;
  int frames = 0;
  BlockShape block_shape;
  std::vector<TokenBlock> payload;

  std::size_t index(int v, int col) const {
    return static_cast<std::size_t>(v) * (frames + 1) + static_cast<std::size_t>(col);
  }

  const TokenBlock& at(int v, int col) const { return payload[index(v, col)]; }
  TokenBlock& at(int v, int col) { return payload[index(v, col)]; }
};

// Grid row v = [reference_v, frames_v[0..T-1]]. All blocks must share one
// shape; the offender is named by (view, frame) position.
inline TokenGrid assemble(const std::vector<TokenBlock>& references,
                          const std::vector<std::vector<TokenBlock>>& frames) {
  if (frames.size() != references.size())
    throw ShapeMismatch("assemble: " + std::to_string(references.size()) + " references vs " +
                        std::to_string(frames.size()) + " frame rows");
  if (references.empty()) return TokenGrid{};  // V=0: empty grid, trivially valid
  const std::size_t T = frames.front().size();
  const BlockShape shape = references.front().shape;
  TokenGrid grid;
  grid.views = static_cast<int>(references.size());
  grid.frames = static_cast<int>(T);
  grid.block_shape = shape;
  grid.payload.reserve(references.size() * (T + 1));
  for (std::size_t v = 0; v < references.size(); ++v) {
    if (frames[v].size() != T)
      throw ShapeMismatch("assemble: view " + std::to_string(v) + " has " +
                          std::to_string(frames[v].size()) + " frames, expected " +
                          std::to_string(T));
    if (!(references[v].shape == shape))
      throw ShapeMismatch("assemble: reference at view " + std::to_string(v) + " has shape " +
                          references[v].shape.str() + ", expected " + shape.str());
    TokenBlock ref = references[v];
    ref.reference = true;
    grid.payload.push_back(ref);
    for (std::size_t t = 0; t < T; ++t) {
      if (!(frames[v][t].shape == shape))
        throw ShapeMismatch("assemble: block at view " + std::to_string(v) + ", frame " +
                            std::to_string(t) + " has shape " + frames[v][t].shape.str() +
                            ", expected " + shape.str());
      TokenBlock block = frames[v][t];
      block.reference = false;
      grid.payload.push_back(block);
    }
  }
  return grid;
}

// X_kept: the payload minus column 0, row order preserved.
inline std::vector<std::vector<TokenBlock>> strip_references(const TokenGrid& grid) {
  std::vector<std::vector<TokenBlock>> kept(static_cast<std::size_t>(grid.views));
  for (int v = 0; v < grid.views; ++v) {
    kept[static_cast<std::size_t>(v)].reserve(static_cast<std::size_t>(grid.frames));
    for (int t = 0; t < grid.frames; ++t)
      kept[static_cast<std::size_t>(v)].push_back(grid.at(v, t + 1));
  }
  return kept;
}

// Serialization order for downstream consumers: view-major keeps each
// view's reference adjacent to its frames.
struct IndexMap {
  int views = 0;
  int frames = 0;
  BlockShape block_shape;
  std::string order = "view_major";
};

inline std::pair<std::vector<TokenBlock>, IndexMap> flatten(const TokenGrid& grid) {
  IndexMap map;
  map.views = grid.views;
  map.frames = grid.frames;
  map.block_shape = grid.block_shape;
  return {grid.payload, map};
}

inline TokenGrid unflatten(const std::vector<TokenBlock>& stream, const IndexMap& map) {
  if (map.order != "view_major")
    throw InvalidIndexMap("unflatten: unknown order \"" + map.order + "\"");
  if (map.views < 0 || map.frames < 0)
    throw InvalidIndexMap("unflatten: V and T must be >= 0");
  const std::size_t expected =
      static_cast<std::size_t>(map.views) * (static_cast<std::size_t>(map.frames) + 1);
  if (stream.size() != expected)
    throw InvalidIndexMap("unflatten: stream holds " + std::to_string(stream.size()) +
                          " blocks, index map implies " + std::to_string(expected));
  for (const TokenBlock& block : stream)
    if (!(block.shape == map.block_shape))
      throw InvalidIndexMap("unflatten: block shape " + block.shape.str() +
                            " contradicts index map shape " + map.block_shape.str());
  TokenGrid grid;
  grid.views = map.views;
  grid.frames = map.frames;
  grid.block_shape = map.block_shape;
  grid.payload = stream;
  return grid;
}

inline json to_json(const IndexMap& map) {
  return {{"V", map.views},
          {"T", map.frames},
          {"block_shape", json::array({map.block_shape.c, map.block_shape.h, map.block_shape.w})},
          {"order", map.order}};
}

inline IndexMap index_map_from_json(const json& j, const std::string& what) {
  IndexMap map;
  map.views = static_cast<int>(number_field(j, "V", what));
  map.frames = static_cast<int>(number_field(j, "T", what));
  if (!j.contains("block_shape") || !j.at("block_shape").is_array() ||
      j.at("block_shape").size() != 3)
    throw InvalidIndexMap(what + ": block_shape must be [c,h,w]");
  map.block_shape.c = j.at("block_shape")[0].get<int>();
  map.block_shape.h = j.at("block_shape")[1].get<int>();
  map.block_shape.w = j.at("block_shape")[2].get<int>();
  if (!j.contains("order") || !j.at("order").is_string())
    throw InvalidIndexMap(what + ": missing \"order\"");
  map.order = j.at("order").get<std::string>();
  return map;
}

}  // namespace mtv
