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

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtv/errors.hpp"
#include "mtv/json_util.hpp"

namespace mtv {

// Points closer than this to the image plane count as behind the camera.
inline constexpr double kDepthEpsilon = 1e-6;

struct CameraCalib {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  // Camera-to-base: R maps camera axes into the base frame, t is the
  // camera center in base coordinates. World->camera is Rt(p - t).
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
  int width = 0, height = 0;
};

struct PixelPoint {
  double u = -1.0;
  double v = -1.0;
  // True iff in front of the camera and inside the image bounds. u,v stay
  // finite either way (-1 sentinel when the depth is degenerate).
  bool visible = false;
};

using PixelTrack = std::vector<PixelPoint>;

inline Eigen::Vector3d world_to_camera(const CameraCalib& calib, const Eigen::Vector3d& p_w) {
  if (!p_w.allFinite()) throw InvalidParameter("world_to_camera: non-finite point");
  return calib.R.transpose() * (p_w - calib.t);
}

inline PixelPoint project(const CameraCalib& calib, const Eigen::Vector3d& p_c) {
  if (!p_c.allFinite()) throw InvalidParameter("project: non-finite point");
  if (p_c.z() <= kDepthEpsilon) return PixelPoint{-1.0, -1.0, false};
  PixelPoint out;
  out.u = calib.fx * p_c.x() / p_c.z() + calib.cx;
  out.v = calib.fy * p_c.y() / p_c.z() + calib.cy;
  out.visible = out.u >= 0.0 && out.u < calib.width && out.v >= 0.0 && out.v < calib.height;
  return out;
}

inline PixelPoint project_world(const CameraCalib& calib, const Eigen::Vector3d& p_w) {
  return project(calib, world_to_camera(calib, p_w));
}

// Empty result means the calibration satisfies every invariant.
inline std::vector<std::string> validate_calib(const CameraCalib& calib) {
  std::vector<std::string> violations;
  if (!(calib.fx > 0.0) || !std::isfinite(calib.fx)) violations.push_back("fx must be > 0");
  if (!(calib.fy > 0.0) || !std::isfinite(calib.fy)) violations.push_back("fy must be > 0");
  if (!std::isfinite(calib.cx) || !std::isfinite(calib.cy))
    violations.push_back("principal point must be finite");
  if (!calib.R.allFinite() ||
      (calib.R.transpose() * calib.R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(calib.R.determinant() - 1.0) > 1e-9)
    violations.push_back("R must be orthonormal with det +1");
  if (!calib.t.allFinite()) violations.push_back("t must be finite");
  if (calib.width < 1) violations.push_back("width must be >= 1");
  if (calib.height < 1) violations.push_back("height must be >= 1");
  return violations;
}

inline PixelTrack track_from_trajectory(const CameraCalib& calib,
                                        const std::vector<Eigen::Vector3d>& points) {
  PixelTrack track;
  track.reserve(points.size());
  for (const Eigen::Vector3d& p : points) track.push_back(project_world(calib, p));
  return track;
}

inline json to_json(const CameraCalib& calib) {
  return {{"fx", calib.fx}, {"fy", calib.fy}, {"cx", calib.cx},       {"cy", calib.cy},
          {"R", to_json(calib.R)},            {"t", to_json(calib.t)}, {"width", calib.width},
          {"height", calib.height}};
}

inline CameraCalib calib_from_json(const json& j, const std::string& what) {
  CameraCalib calib;
  calib.fx = number_field(j, "fx", what);
  calib.fy = number_field(j, "fy", what);
  calib.cx = number_field(j, "cx", what);
  calib.cy = number_field(j, "cy", what);
  if (!j.contains("R")) throw ConfigError(what + ": missing \"R\"");
  calib.R = matrix3_from_json(j.at("R"), what + ".R");
  if (!j.contains("t")) throw ConfigError(what + ": missing \"t\"");
  calib.t = vector3_from_json(j.at("t"), what + ".t");
  calib.width = static_cast<int>(number_field(j, "width", what));
  calib.height = static_cast<int>(number_field(j, "height", what));
  const auto violations = validate_calib(calib);
  if (!violations.empty()) {
    std::string msg = what + ": invalid calibration:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw ConfigError(msg);
  }
  return calib;
}

inline CameraCalib load_calib(const std::filesystem::path& path) {
  return calib_from_json(load_json(path), path.string());
}

inline void save_calib(const std::filesystem::path& path, const CameraCalib& calib) {
  save_json(path, to_json(calib));
}

}  // namespace mtv
