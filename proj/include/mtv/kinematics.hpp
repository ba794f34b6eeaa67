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

// Rigid transform. apply() maps a point from the child frame into the
// parent frame; composition follows the same parent-on-the-left order.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }

  Pose operator*(const Pose& rhs) const {
    return Pose{rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  bool is_rigid(double tol = 1e-9) const {
    const Eigen::Matrix3d err = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

// One Denavit-Hartenberg row, classic distal convention. Angles in
// radians, lengths in meters.
struct DHRow {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
};

struct DHChain {
  Pose base;
  std::vector<DHRow> rows;

  std::size_t dof() const { return rows.size(); }
};

using JointVector = std::vector<double>;
using JointTrajectory = std::vector<JointVector>;

// Link transform RotZ(theta + theta_offset) * TransZ(d) * TransX(a) *
// RotX(alpha), written in closed form so no intermediate 4x4 products are
// needed.
inline Pose dh_link_transform(const DHRow& row, double theta) {
  if (!std::isfinite(row.a) || !std::isfinite(row.alpha) || !std::isfinite(row.d) ||
      !std::isfinite(row.theta_offset) || !std::isfinite(theta))
    throw InvalidParameter("dh_link_transform: non-finite parameter");
  const double th = theta + row.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Pose out;
  out.rotation << ct, -st * ca, st * sa,
                  st, ct * ca, -ct * sa,
                  0.0, sa, ca;
  out.translation << row.a * ct, row.a * st, row.d;
  return out;
}

// Pose of every link frame expressed in the base-chain's world frame:
// result[0] is the chain base, result[i] the frame after row i-1, so the
// end effector is result.back().
inline std::vector<Pose> forward_kinematics(const DHChain& chain, const JointVector& joints) {
  if (joints.size() != chain.rows.size())
    throw DimensionMismatch("forward_kinematics: " + std::to_string(joints.size()) +
                            " joint values for " + std::to_string(chain.rows.size()) + " rows");
  std::vector<Pose> frames;
  frames.reserve(chain.rows.size() + 1);
  frames.push_back(chain.base);
  for (std::size_t i = 0; i < chain.rows.size(); ++i)
    frames.push_back(frames.back() * dh_link_transform(chain.rows[i], joints[i]));
  return frames;
}

inline Pose ee_pose(const DHChain& chain, const JointVector& joints) {
  return forward_kinematics(chain, joints).back();
}

// End-effector position for every frame of a trajectory. Errors are
// re-raised with the offending frame index attached.
inline std::vector<Eigen::Vector3d> ee_positions(const DHChain& chain,
                                                 const JointTrajectory& trajectory) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(trajectory.size());
  for (std::size_t f = 0; f < trajectory.size(); ++f) {
    try {
      out.push_back(ee_pose(chain, trajectory[f]).translation);
    } catch (const Error& e) {
      throw DimensionMismatch("frame " + std::to_string(f) + ": " + e.what());
    }
  }
  return out;
}

inline json to_json(const DHChain& chain) {
  json rows = json::array();
  for (const DHRow& r : chain.rows)
    rows.push_back({{"a", r.a}, {"alpha", r.alpha}, {"d", r.d}, {"theta_offset", r.theta_offset}});
  return {{"base",
           {{"rotation", to_json(chain.base.rotation)},
            {"translation", to_json(chain.base.translation)}}},
          {"rows", rows}};
}

inline DHChain dh_chain_from_json(const json& j, const std::string& what) {
  DHChain chain;
  if (j.contains("base")) {
    const json& base = j.at("base");
    if (base.contains("rotation"))
      chain.base.rotation = matrix3_from_json(base.at("rotation"), what + ".base.rotation");
    if (base.contains("translation"))
      chain.base.translation = vector3_from_json(base.at("translation"), what + ".base.translation");
  }
  if (!chain.base.is_rigid(1e-6)) throw ConfigError(what + ".base.rotation is not a rotation");
  if (!j.contains("rows") || !j.at("rows").is_array() || j.at("rows").empty())
    throw ConfigError(what + ": missing non-empty \"rows\" array");
  for (std::size_t i = 0; i < j.at("rows").size(); ++i) {
    const json& row = j.at("rows")[i];
    const std::string where = what + ".rows[" + std::to_string(i) + "]";
    chain.rows.push_back(DHRow{number_field(row, "a", where), number_field(row, "alpha", where),
                               number_field(row, "d", where),
                               number_field(row, "theta_offset", where)});
  }
  return chain;
}

inline DHChain load_dh_chain(const std::filesystem::path& path) {
  return dh_chain_from_json(load_json(path), path.string());
}

inline void save_dh_chain(const std::filesystem::path& path, const DHChain& chain) {
  save_json(path, to_json(chain));
}

}  // namespace mtv
