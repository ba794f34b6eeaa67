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

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mtv/latentgrid.hpp"

namespace {

constexpr mtv::BlockShape kShape{16, 3, 4};

mtv::TokenBlock block(std::uint64_t label, mtv::BlockShape shape = kShape) {
  mtv::TokenBlock b;
  b.shape = shape;
  b.label = label;
  return b;
}

// References labeled 100+v, frame blocks labeled 1000*(v+1)+t; every label
// in a grid is unique so misplacements are detectable.
struct LabeledInput {
  std::vector<mtv::TokenBlock> references;
  std::vector<std::vector<mtv::TokenBlock>> frames;
};

LabeledInput labeled_input(int views, int frames) {
  LabeledInput in;
  for (int v = 0; v < views; ++v) {
    in.references.push_back(block(100 + static_cast<std::uint64_t>(v)));
    std::vector<mtv::TokenBlock> row;
    for (int t = 0; t < frames; ++t)
      row.push_back(block(1000 * static_cast<std::uint64_t>(v + 1) + t));
    in.frames.push_back(row);
  }
  return in;
}

TEST(Assemble, SingleViewWithNoFramesIsOneReferenceColumn) {
  const LabeledInput in = labeled_input(1, 0);
  const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
  EXPECT_EQ(grid.views, 1);
  EXPECT_EQ(grid.frames, 0);
  ASSERT_EQ(grid.payload.size(), 1u);
  EXPECT_TRUE(grid.at(0, 0).reference);
  EXPECT_EQ(grid.at(0, 0).label, 100u);
}

TEST(Assemble, TwoViewsThreeFramesLayOutAsTwoByFour) {
  const LabeledInput in = labeled_input(2, 3);
  const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
  EXPECT_EQ(grid.views, 2);
  EXPECT_EQ(grid.frames, 3);
  ASSERT_EQ(grid.payload.size(), 8u);
  for (int v = 0; v < 2; ++v) {
    EXPECT_TRUE(grid.at(v, 0).reference);
    EXPECT_EQ(grid.at(v, 0).label, 100u + v);
    for (int t = 0; t < 3; ++t) {
      EXPECT_FALSE(grid.at(v, t + 1).reference);
      EXPECT_EQ(grid.at(v, t + 1).label, 1000u * (v + 1) + t) << "v=" << v << " t=" << t;
      EXPECT_EQ(grid.at(v, t + 1).shape, kShape);
    }
  }
}

TEST(Assemble, FullEpisodeScaleIsTwoByEightyTwo) {
  const LabeledInput in = labeled_input(2, 81);
  const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
  EXPECT_EQ(grid.views, 2);
  EXPECT_EQ(grid.frames, 81);
  EXPECT_EQ(grid.payload.size(), 2u * 82u);
  EXPECT_EQ(grid.at(1, 82 - 1).label, 2000u + 80u);
}

TEST(Assemble, NormalizesReferenceFlagsFromInput) {
  // Whatever flags the caller set, column 0 ends up flagged and the frame
  // columns end up unflagged.
  LabeledInput in = labeled_input(1, 2);
  in.references[0].reference = false;
  in.frames[0][1].reference = true;
  const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
  EXPECT_TRUE(grid.at(0, 0).reference);
  EXPECT_FALSE(grid.at(0, 1).reference);
  EXPECT_FALSE(grid.at(0, 2).reference);
}

TEST(Assemble, NoViewsGiveAnEmptyGrid) {
  const mtv::TokenGrid grid = mtv::assemble({}, {});
  EXPECT_EQ(grid.views, 0);
  EXPECT_EQ(grid.frames, 0);
  EXPECT_TRUE(grid.payload.empty());
}

TEST(Assemble, RejectsRowCountMismatch) {
  const LabeledInput in = labeled_input(2, 2);
  EXPECT_THROW(mtv::assemble(in.references, {in.frames[0]}), mtv::ShapeMismatch);
}

TEST(Assemble, NamesViewWithRaggedFrameRow) {
  LabeledInput in = labeled_input(2, 2);
  in.frames[1].pop_back();
  try {
    mtv::assemble(in.references, in.frames);
    FAIL() << "expected ShapeMismatch";
  } catch (const mtv::ShapeMismatch& e) {
    EXPECT_NE(std::string(e.what()).find("view 1"), std::string::npos);
  }
}

TEST(Assemble, NamesViewWithOddReferenceShape) {
  LabeledInput in = labeled_input(3, 1);
  in.references[1].shape = mtv::BlockShape{8, 3, 4};
  try {
    mtv::assemble(in.references, in.frames);
    FAIL() << "expected ShapeMismatch";
  } catch (const mtv::ShapeMismatch& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("view 1"), std::string::npos);
    EXPECT_NE(what.find("(8,3,4)"), std::string::npos);
  }
}

TEST(Assemble, NamesViewAndFrameOfOddBlock) {
  LabeledInput in = labeled_input(2, 4);
  in.frames[1][2].shape = mtv::BlockShape{16, 3, 5};
  try {
    mtv::assemble(in.references, in.frames);
    FAIL() << "expected ShapeMismatch";
  } catch (const mtv::ShapeMismatch& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("view 1"), std::string::npos);
    EXPECT_NE(what.find("frame 2"), std::string::npos);
  }
}

TEST(StripReferences, InvertsAssembleBlockForBlock) {
  const LabeledInput in = labeled_input(3, 4);
  const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
  const std::vector<std::vector<mtv::TokenBlock>> kept = mtv::strip_references(grid);
  ASSERT_EQ(kept.size(), in.frames.size());
  for (std::size_t v = 0; v < kept.size(); ++v) {
    ASSERT_EQ(kept[v].size(), in.frames[v].size()) << "view " << v;
    for (std::size_t t = 0; t < kept[v].size(); ++t)
      EXPECT_EQ(kept[v][t], in.frames[v][t]) << "v=" << v << " t=" << t;
  }
}

TEST(StripReferences, NoReferenceLabelOrFlagSurvives) {
  const LabeledInput in = labeled_input(2, 5);
  std::set<std::uint64_t> reference_labels;
  for (const mtv::TokenBlock& r : in.references) reference_labels.insert(r.label);
  const std::vector<std::vector<mtv::TokenBlock>> kept =
      mtv::strip_references(mtv::assemble(in.references, in.frames));
  for (const auto& row : kept)
    for (const mtv::TokenBlock& b : row) {
      EXPECT_FALSE(b.reference);
      EXPECT_EQ(reference_labels.count(b.label), 0u);
    }
}

TEST(StripReferences, HandlesDegenerateGrids) {
  const LabeledInput no_frames = labeled_input(2, 0);
  const auto kept = mtv::strip_references(mtv::assemble(no_frames.references, no_frames.frames));
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_TRUE(kept[0].empty());
  EXPECT_TRUE(kept[1].empty());
  EXPECT_TRUE(mtv::strip_references(mtv::TokenGrid{}).empty());
}

TEST(Flatten, StreamIsViewMajorWithReferenceFirst) {
  const LabeledInput in = labeled_input(2, 2);
  const auto [stream, map] = mtv::flatten(mtv::assemble(in.references, in.frames));
  ASSERT_EQ(stream.size(), 6u);
  const std::uint64_t want[6] = {100, 1000, 1001, 101, 2000, 2001};
  for (int i = 0; i < 6; ++i) EXPECT_EQ(stream[i].label, want[i]) << "slot " << i;
  EXPECT_TRUE(stream[0].reference);
  EXPECT_TRUE(stream[3].reference);
  EXPECT_EQ(map.views, 2);
  EXPECT_EQ(map.frames, 2);
  EXPECT_EQ(map.block_shape, kShape);
  EXPECT_EQ(map.order, "view_major");
}

TEST(Flatten, SingleViewSingleFrame) {
  const LabeledInput in = labeled_input(1, 1);
  const auto [stream, map] = mtv::flatten(mtv::assemble(in.references, in.frames));
  ASSERT_EQ(stream.size(), 2u);
  EXPECT_EQ(stream[0].label, 100u);
  EXPECT_TRUE(stream[0].reference);
  EXPECT_EQ(stream[1].label, 1000u);
  EXPECT_FALSE(stream[1].reference);
  EXPECT_EQ(map.views, 1);
  EXPECT_EQ(map.frames, 1);
}

TEST(Flatten, UnflattenRoundTripsTheGrid) {
  for (const auto [views, frames] : {std::pair<int, int>{1, 0}, {1, 1}, {2, 3}, {3, 7}, {2, 81}}) {
    const LabeledInput in = labeled_input(views, frames);
    const mtv::TokenGrid grid = mtv::assemble(in.references, in.frames);
    const auto [stream, map] = mtv::flatten(grid);
    const mtv::TokenGrid back = mtv::unflatten(stream, map);
    EXPECT_EQ(back.views, grid.views);
    EXPECT_EQ(back.frames, grid.frames);
    EXPECT_EQ(back.block_shape, grid.block_shape);
    EXPECT_EQ(back.payload, grid.payload);
  }
}

TEST(Unflatten, RejectsCorruptIndexMaps) {
  const LabeledInput in = labeled_input(2, 2);
  const auto [stream, map] = mtv::flatten(mtv::assemble(in.references, in.frames));

  mtv::IndexMap bad_order = map;
  bad_order.order = "frame_major";
  EXPECT_THROW(mtv::unflatten(stream, bad_order), mtv::InvalidIndexMap);

  mtv::IndexMap negative = map;
  negative.views = -1;
  EXPECT_THROW(mtv::unflatten(stream, negative), mtv::InvalidIndexMap);

  mtv::IndexMap short_map = map;
  short_map.frames = 1;  // implies 4 blocks, stream has 6
  EXPECT_THROW(mtv::unflatten(stream, short_map), mtv::InvalidIndexMap);

  mtv::IndexMap wrong_shape = map;
  wrong_shape.block_shape = mtv::BlockShape{8, 3, 4};
  EXPECT_THROW(mtv::unflatten(stream, wrong_shape), mtv::InvalidIndexMap);

  std::vector<mtv::TokenBlock> tampered = stream;
  tampered[2].shape = mtv::BlockShape{16, 3, 5};
  EXPECT_THROW(mtv::unflatten(tampered, map), mtv::InvalidIndexMap);
}

TEST(Unflatten, AcceptsEmptyStreamForEmptyMap) {
  mtv::IndexMap map;
  map.views = 0;
  map.frames = 0;
  const mtv::TokenGrid grid = mtv::unflatten({}, map);
  EXPECT_EQ(grid.views, 0);
  EXPECT_TRUE(grid.payload.empty());
}

TEST(IndexMapJson, RoundTripsAllFields) {
  mtv::IndexMap map;
  map.views = 2;
  map.frames = 81;
  map.block_shape = kShape;
  const mtv::IndexMap back = mtv::index_map_from_json(mtv::to_json(map), "test");
  EXPECT_EQ(back.views, map.views);
  EXPECT_EQ(back.frames, map.frames);
  EXPECT_EQ(back.block_shape, map.block_shape);
  EXPECT_EQ(back.order, map.order);
}

TEST(IndexMapJson, RejectsMalformedDocuments) {
  const mtv::json good = mtv::to_json(mtv::IndexMap{2, 3, kShape});
  mtv::json no_v = good;
  no_v.erase("V");
  EXPECT_THROW(mtv::index_map_from_json(no_v, "test"), mtv::ConfigError);
  mtv::json bad_shape = good;
  bad_shape["block_shape"] = mtv::json::array({16, 3});
  EXPECT_THROW(mtv::index_map_from_json(bad_shape, "test"), mtv::InvalidIndexMap);
  mtv::json no_order = good;
  no_order.erase("order");
  EXPECT_THROW(mtv::index_map_from_json(no_order, "test"), mtv::InvalidIndexMap);
}

}  // namespace
