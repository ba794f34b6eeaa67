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
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mtv/camera.hpp"
#include "mtv/errors.hpp"
#include "mtv/frame.hpp"
#include "mtv/json_util.hpp"
#include "mtv/mask.hpp"
#include "mtv/util.hpp"

namespace mtv {

// Projected end-effector path for one arm; one point per frame.
struct ArmTrack {
  std::string arm_id;
  PixelTrack points;
};

using RgbColor = std::array<std::uint8_t, 3>;

// Trail-rendering parameters. The defaults fill in what the source model
// leaves free: 12-frame linear fade, radius-6 linear glow, green/red arms,
// blue mask prior at 50% alpha, 384x288 canvas, 81 frames.
struct TrajVideoSpec {
  int trail_length = 12;  // K: count of past points drawn
  int point_radius = 6;   // r: glow radius in pixels
  // Explicit per-age weights; empty selects linear decay 1 - age/K.
  std::vector<double> decay;
  std::map<std::string, RgbColor> arm_colors = {{"left", {0, 255, 0}}, {"right", {255, 0, 0}}};
  RgbColor mask_color = {0, 0, 255};
  int width = 384;
  int height = 288;
  int frame_count = 81;  // T_total

  double decay_weight(int age) const {
    if (decay.empty()) return 1.0 - static_cast<double>(age) / trail_length;
    return decay[static_cast<std::size_t>(age)];
  }

  void validate() const {
    if (trail_length < 1) throw InvalidParameter("TrajVideoSpec: trail_length must be >= 1");
    if (point_radius < 1) throw InvalidParameter("TrajVideoSpec: point_radius must be >= 1");
    if (width < 1 || height < 1) throw InvalidParameter("TrajVideoSpec: canvas must be >= 1x1");
    if (frame_count < 1) throw InvalidParameter("TrajVideoSpec: frame_count must be >= 1");
    if (!decay.empty()) {
      if (decay.size() != static_cast<std::size_t>(trail_length))
        throw InvalidParameter("TrajVideoSpec: decay must list one weight per trail age");
      if (decay.front() != 1.0) throw InvalidParameter("TrajVideoSpec: decay weight at age 0 must be 1");
      for (std::size_t a = 0; a < decay.size(); ++a) {
        if (!(decay[a] >= 0.0 && decay[a] <= 1.0))
          throw InvalidParameter("TrajVideoSpec: decay weights must lie in [0,1]");
        if (a > 0 && decay[a] > decay[a - 1])
          throw InvalidParameter("TrajVideoSpec: decay weights must be non-increasing");
      }
    }
  }
};

// Linear radial falloff, zero at and beyond `radius`.
inline double glow_kernel(double distance, double radius) {
  if (radius < 1.0) throw InvalidParameter("glow_kernel: radius must be >= 1");
  return std::max(0.0, 1.0 - distance / radius);
}

namespace detail {

// Accumulation canvas: contributions sum in doubles and quantize to 8 bits
// exactly once, so overlapping splats are order-independent.
inline void splat(std::vector<double>& acc, int width, int height, const PixelPoint& point,
                  const RgbColor& color, double weight, int radius) {
  const int cu = static_cast<int>(round_half_up(point.u));
  const int cv = static_cast<int>(round_half_up(point.v));
  for (int dy = -radius; dy <= radius; ++dy) {
    const int y = cv + dy;
    if (y < 0 || y >= height) continue;
    for (int dx = -radius; dx <= radius; ++dx) {
      const int x = cu + dx;
      if (x < 0 || x >= width) continue;
      const double d = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
      const double k = glow_kernel(d, radius);
      if (k <= 0.0) continue;
      const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
      acc[i] += color[0] * weight * k;
      acc[i + 1] += color[1] * weight * k;
      acc[i + 2] += color[2] * weight * k;
    }
  }
}

inline Frame quantize(const std::vector<double>& acc, int width, int height) {
  Frame out = Frame::black(width, height);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const long long v = round_half_up(acc[i]);
    out.rgb[i] = static_cast<std::uint8_t>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
  return out;
}

inline Frame render_trail_onto(const Frame& base, const std::vector<ArmTrack>& tracks, int t,
                               const TrajVideoSpec& spec) {
  spec.validate();
  if (t < 0 || t >= spec.frame_count)
    throw InvalidParameter("render_trail_frame: frame index " + std::to_string(t) +
                           " outside [0," + std::to_string(spec.frame_count) + ")");
  std::vector<double> acc(base.rgb.size());
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = base.rgb[i];
  for (const ArmTrack& track : tracks) {
    const auto color_it = spec.arm_colors.find(track.arm_id);
    if (color_it == spec.arm_colors.end())
      throw InvalidParameter("render_trail_frame: no color for arm \"" + track.arm_id + "\"");
    for (int age = 0; age < spec.trail_length; ++age) {
      const int idx = t - age;
      if (idx < 0) break;
      if (static_cast<std::size_t>(idx) >= track.points.size()) continue;
      const PixelPoint& p = track.points[static_cast<std::size_t>(idx)];
      if (!p.visible) continue;  // off-screen points contribute nothing
      splat(acc, spec.width, spec.height, p, color_it->second, spec.decay_weight(age),
            spec.point_radius);
    }
  }
  return quantize(acc, spec.width, spec.height);
}

}  // namespace detail

inline Frame render_trail_frame(const std::vector<ArmTrack>& tracks, int t,
                                const TrajVideoSpec& spec) {
  return detail::render_trail_onto(Frame::black(spec.width, spec.height), tracks, t, spec);
}

// Mask prior sits beneath the trails: foreground pixels become a 50/50 blend
// of mask_color and the existing frame content.
inline Frame composite_mask_prior(const Frame& frame, const Mask& mask,
                                  const TrajVideoSpec& spec) {
  if (frame.width != mask.width || frame.height != mask.height)
    throw DimensionMismatch("composite_mask_prior: frame " + std::to_string(frame.width) + "x" +
                            std::to_string(frame.height) + " vs mask " +
                            std::to_string(mask.width) + "x" + std::to_string(mask.height));
  Frame out = frame;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      if (!mask.at(x, y)) continue;
      const std::size_t i = (static_cast<std::size_t>(y) * frame.width + x) * 3;
      for (int c = 0; c < 3; ++c) {
        const long long v = round_half_up(0.5 * spec.mask_color[static_cast<std::size_t>(c)] +
                                          0.5 * out.rgb[i + static_cast<std::size_t>(c)]);
        out.rgb[i + static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(v > 255 ? 255 : v);
      }
    }
  }
  return out;
}

// All V views rendered in lockstep: per view, the initial mask prior is laid
// down once, then each frame adds the trails visible at that time.
inline std::vector<std::vector<Frame>> synth_trajectory_video(
    const std::vector<std::vector<ArmTrack>>& tracks_per_view,
    const std::vector<Mask>& initial_masks, const TrajVideoSpec& spec) {
  spec.validate();
  if (tracks_per_view.size() != initial_masks.size())
    throw DimensionMismatch("synth_trajectory_video: " + std::to_string(tracks_per_view.size()) +
                            " track lists vs " + std::to_string(initial_masks.size()) + " masks");
  std::vector<std::vector<Frame>> views;
  views.reserve(tracks_per_view.size());
  for (std::size_t v = 0; v < tracks_per_view.size(); ++v) {
    const std::string where = "view " + std::to_string(v);
    if (initial_masks[v].width != spec.width || initial_masks[v].height != spec.height)
      throw DimensionMismatch(where + ": mask dimensions do not match canvas");
    for (const ArmTrack& track : tracks_per_view[v])
      if (track.points.size() != static_cast<std::size_t>(spec.frame_count))
        throw DimensionMismatch(where + ": arm \"" + track.arm_id + "\" has " +
                                std::to_string(track.points.size()) + " points, expected " +
                                std::to_string(spec.frame_count));
    Frame base = composite_mask_prior(Frame::black(spec.width, spec.height), initial_masks[v],
                                      spec);
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(spec.frame_count));
    for (int t = 0; t < spec.frame_count; ++t)
      frames.push_back(detail::render_trail_onto(base, tracks_per_view[v], t, spec));
    views.push_back(std::move(frames));
  }
  return views;
}

inline MaskSequence duplicate_mask(const Mask& mask, int frames) {
  if (frames < 1) throw InvalidParameter("duplicate_mask: frame count must be >= 1");
  return MaskSequence(static_cast<std::size_t>(frames), mask);
}

inline json to_json(const TrajVideoSpec& spec) {
  json colors = json::object();
  for (const auto& [arm, rgb] : spec.arm_colors)
    colors[arm] = json::array({rgb[0], rgb[1], rgb[2]});
  return {{"trail_length", spec.trail_length},
          {"point_radius", spec.point_radius},
          {"decay", spec.decay},
          {"arm_colors", colors},
          {"mask_color", json::array({spec.mask_color[0], spec.mask_color[1], spec.mask_color[2]})},
          {"width", spec.width},
          {"height", spec.height},
          {"frame_count", spec.frame_count}};
}

inline RgbColor rgb_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(what + ": expected [r,g,b]");
  RgbColor c;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255)
      throw ConfigError(what + ": channel values must be integers in [0,255]");
    c[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(j[i].get<int>());
  }
  return c;
}

// Partial overrides: fields absent from the JSON keep the defaults in `spec`.
inline TrajVideoSpec traj_spec_from_json(const json& j, TrajVideoSpec spec,
                                         const std::string& what) {
  if (j.contains("trail_length")) spec.trail_length = static_cast<int>(number_field(j, "trail_length", what));
  if (j.contains("point_radius")) spec.point_radius = static_cast<int>(number_field(j, "point_radius", what));
  if (j.contains("decay")) {
    spec.decay.clear();
    for (const auto& w : j.at("decay")) {
      if (!w.is_number()) throw ConfigError(what + ".decay: weights must be numbers");
      spec.decay.push_back(w.get<double>());
    }
  }
  if (j.contains("arm_colors")) {
    spec.arm_colors.clear();
    for (const auto& [arm, rgb] : j.at("arm_colors").items())
      spec.arm_colors[arm] = rgb_from_json(rgb, what + ".arm_colors." + arm);
  }
  if (j.contains("mask_color")) spec.mask_color = rgb_from_json(j.at("mask_color"), what + ".mask_color");
  if (j.contains("width")) spec.width = static_cast<int>(number_field(j, "width", what));
  if (j.contains("height")) spec.height = static_cast<int>(number_field(j, "height", what));
  if (j.contains("frame_count")) spec.frame_count = static_cast<int>(number_field(j, "frame_count", what));
  try {
    spec.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(what + ": " + e.what());
  }
  return spec;
}

}  // namespace mtv
