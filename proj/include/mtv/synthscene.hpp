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
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtv/camera.hpp"
#include "mtv/errors.hpp"
#include "mtv/image_io.hpp"
#include "mtv/json_util.hpp"
#include "mtv/kinematics.hpp"
#include "mtv/mask.hpp"
#include "mtv/trajvideo.hpp"
#include "mtv/util.hpp"

// Deterministic synthetic episodes: a desk-scale two-arm scene whose joint
// trajectories, calibrations, and object motion are all closed-form, so the
// whole FK -> projection -> render -> evaluate pipeline can be checked
// against analytic oracles.

namespace mtv {

struct Box3 {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d half_extent = Eigen::Vector3d::Zero();
};

struct MotionKey {
  int t = 0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

// Axis-aligned box following a piecewise-linear script; during the grasp
// window it rides the grasping arm's end effector instead.
struct SceneObject {
  std::string object_id;
  std::string description;
  Eigen::Vector3d half_extent = Eigen::Vector3d::Zero();
  std::vector<MotionKey> script;  // sorted by t, non-empty
  int grasp_start = -1;           // [grasp_start, grasp_end), -1 = never grasped
  int grasp_end = -1;
  std::string grasp_arm;

  Eigen::Vector3d scripted_center(int t) const {
    if (script.empty()) throw InvalidParameter("SceneObject: empty motion script");
    if (t <= script.front().t) return script.front().center;
    if (t >= script.back().t) return script.back().center;
    for (std::size_t k = 1; k < script.size(); ++k) {
      if (t <= script[k].t) {
        const MotionKey& a = script[k - 1];
        const MotionKey& b = script[k];
        const double f = static_cast<double>(t - a.t) / (b.t - a.t);
        return a.center + f * (b.center - a.center);
      }
    }
    return script.back().center;
  }
};

// Scripted end-effector path: a circle in the arm's horizontal reach plane,
// traced at constant angular rate. Constant-rate circles keep consecutive
// projected points well separated, which the render-loop oracle relies on.
struct ArmPath {
  Eigen::Vector2d circle_center = Eigen::Vector2d::Zero();
  double circle_radius = 0.0;
  double phase0 = 0.0;
  double revolutions = 1.0;

  Eigen::Vector2d target_xy(int t, int t_total) const {
    const double angle = phase0 + 2.0 * kPi * revolutions * t / (t_total - 1);
    return circle_center + circle_radius * Eigen::Vector2d(std::cos(angle), std::sin(angle));
  }
};

struct SceneTemplate {
  std::uint64_t seed = 0;
  std::string task_label;
  std::map<std::string, DHChain> chains;  // arm_id -> chain
  std::map<std::string, ArmPath> paths;   // arm_id -> scripted path
  std::vector<CameraCalib> calibs;        // index v -> view(v+1)
  std::vector<SceneObject> objects;
  int t_total = 81;
  TrajVideoSpec video;

  void validate() const {
    if (t_total < 2) throw InvalidParameter("SceneTemplate: t_total must be >= 2");
    if (objects.size() < 2)
      throw InvalidParameter("SceneTemplate: scenes carry at least two objects");
    if (calibs.empty()) throw InvalidParameter("SceneTemplate: at least one view required");
    for (std::size_t v = 0; v < calibs.size(); ++v) {
      const auto violations = validate_calib(calibs[v]);
      if (!violations.empty())
        throw InvalidParameter("SceneTemplate: view " + std::to_string(v + 1) +
                               " calibration invalid: " + violations.front());
    }
    if (chains.empty()) throw InvalidParameter("SceneTemplate: no arms");
    for (const auto& [arm, path] : paths)
      if (chains.find(arm) == chains.end())
        throw InvalidParameter("SceneTemplate: path for unknown arm \"" + arm + "\"");
    for (const SceneObject& obj : objects) {
      if (obj.script.empty())
        throw InvalidParameter("SceneTemplate: object " + obj.object_id + " has no script");
      if (obj.grasp_start >= 0 && chains.find(obj.grasp_arm) == chains.end())
        throw InvalidParameter("SceneTemplate: object " + obj.object_id +
                               " grasped by unknown arm \"" + obj.grasp_arm + "\"");
    }
    video.validate();
    if (video.frame_count != t_total)
      throw InvalidParameter("SceneTemplate: video frame_count must equal t_total");
  }
};

struct ViewPaths {
  std::string view_id;
  std::string calib;     // all paths relative to the episode directory
  std::string gt_masks;
  std::string traj;
};

struct EpisodeManifest {
  std::string episode_id;
  std::string task_id;
  bool success = true;
  int t_total = 0;
  std::string joints = "joints.json";
  std::string chains = "chains.json";
  std::vector<ViewPaths> views;
  std::vector<ObjectDescription> objects;
  TrajVideoSpec video;
};

inline json to_json(const EpisodeManifest& m) {
  json views = json::array();
  for (const ViewPaths& v : m.views)
    views.push_back({{"view_id", v.view_id},
                     {"calib", v.calib},
                     {"gt_masks", v.gt_masks},
                     {"traj", v.traj}});
  json objects = json::array();
  for (const ObjectDescription& o : m.objects)
    objects.push_back({{"object_id", o.object_id}, {"description", o.text}});
  return {{"episode_id", m.episode_id}, {"task_id", m.task_id},   {"success", m.success},
          {"t_total", m.t_total},       {"joints", m.joints},     {"chains", m.chains},
          {"views", views},             {"objects", objects},     {"video_spec", to_json(m.video)}};
}

inline EpisodeManifest manifest_from_json(const json& j, const std::string& what) {
  EpisodeManifest m;
  for (const char* key : {"episode_id", "task_id", "joints", "chains"})
    if (!j.contains(key) || !j.at(key).is_string())
      throw ConfigError(what + ": missing string field \"" + std::string(key) + "\"");
  m.episode_id = j.at("episode_id").get<std::string>();
  m.task_id = j.at("task_id").get<std::string>();
  m.joints = j.at("joints").get<std::string>();
  m.chains = j.at("chains").get<std::string>();
  if (!j.contains("success") || !j.at("success").is_boolean())
    throw ConfigError(what + ": missing boolean \"success\"");
  m.success = j.at("success").get<bool>();
  m.t_total = static_cast<int>(number_field(j, "t_total", what));
  if (!j.contains("views") || !j.at("views").is_array() || j.at("views").empty())
    throw ConfigError(what + ": missing \"views\"");
  for (const auto& v : j.at("views")) {
    ViewPaths vp;
    for (const char* key : {"view_id", "calib", "gt_masks", "traj"})
      if (!v.contains(key) || !v.at(key).is_string())
        throw ConfigError(what + ".views: missing \"" + std::string(key) + "\"");
    vp.view_id = v.at("view_id").get<std::string>();
    vp.calib = v.at("calib").get<std::string>();
    vp.gt_masks = v.at("gt_masks").get<std::string>();
    vp.traj = v.at("traj").get<std::string>();
    m.views.push_back(vp);
  }
  if (j.contains("objects"))
    for (const auto& o : j.at("objects"))
      m.objects.push_back(ObjectDescription{o.at("description").get<std::string>(),
                                            o.at("object_id").get<std::string>()});
  if (j.contains("video_spec"))
    m.video = traj_spec_from_json(j.at("video_spec"), TrajVideoSpec{}, what + ".video_spec");
  return m;
}

inline EpisodeManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(load_json(path), path.string());
}

inline void save_manifest(const std::filesystem::path& path, const EpisodeManifest& m) {
  save_json(path, to_json(m));
}

inline std::string frame_file_name(int t) {
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%05d.png", t);
  return name;
}

// GT mask: the axis-aligned pixel bounding box of the 8 projected box
// corners, clipped to the canvas. A box fully behind the camera renders as
// an empty mask; corners at degenerate depth are ignored.
inline Mask render_gt_mask(const CameraCalib& calib, const Box3& box) {
  Mask mask = Mask::zeros(calib.width, calib.height);
  double umin = 0.0, umax = 0.0, vmin = 0.0, vmax = 0.0;
  bool any = false;
  for (int corner = 0; corner < 8; ++corner) {
    const Eigen::Vector3d offset((corner & 1) ? box.half_extent.x() : -box.half_extent.x(),
                                 (corner & 2) ? box.half_extent.y() : -box.half_extent.y(),
                                 (corner & 4) ? box.half_extent.z() : -box.half_extent.z());
    const Eigen::Vector3d p_c = world_to_camera(calib, box.center + offset);
    if (p_c.z() <= kDepthEpsilon) continue;
    const double u = calib.fx * p_c.x() / p_c.z() + calib.cx;
    const double v = calib.fy * p_c.y() / p_c.z() + calib.cy;
    if (!any) {
      umin = umax = u;
      vmin = vmax = v;
      any = true;
    } else {
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  if (!any) return mask;
  const int x0 = static_cast<int>(round_half_up(umin));
  const int x1 = static_cast<int>(round_half_up(umax));
  const int y0 = static_cast<int>(round_half_up(vmin));
  const int y1 = static_cast<int>(round_half_up(vmax));
  fill_rect(mask, x0, y0, x1 + 1, y1 + 1);
  return mask;
}

// Known-J oracle construction: translate every mask, clipping at borders.
inline MaskSequence perturb_masks(const MaskSequence& seq, int dx, int dy) {
  MaskSequence out;
  out.reserve(seq.size());
  for (const Mask& m : seq) out.push_back(translate_mask(m, dx, dy));
  return out;
}

namespace detail {

// Closed-form IK for the planar 2R portion of the arm (rows 0 and 1 carry
// link lengths; the remaining rows are zero stubs). Elbow-down branch.
inline JointVector planar_ik(const DHChain& chain, const Eigen::Vector2d& world_xy) {
  const double l1 = chain.rows.at(0).a;
  const double l2 = chain.rows.at(1).a;
  const Eigen::Vector2d local = world_xy - chain.base.translation.head<2>();
  const double r2 = local.squaredNorm();
  const double reach_max = l1 + l2;
  const double reach_min = std::abs(l1 - l2);
  if (r2 > reach_max * reach_max || r2 < reach_min * reach_min)
    throw InvalidParameter("planar_ik: target outside the reach annulus");
  double cos_q2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  cos_q2 = std::clamp(cos_q2, -1.0, 1.0);
  const double q2 = std::acos(cos_q2);
  const double q1 = std::atan2(local.y(), local.x()) -
                    std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  JointVector q(chain.rows.size(), 0.0);
  q[0] = q1;
  q[1] = q2;
  return q;
}

}  // namespace detail

// Scripted joint trajectory: IK onto the arm's circle at every frame.
inline JointTrajectory scripted_joint_trajectory(const DHChain& chain, const ArmPath& path,
                                                 int t_total) {
  JointTrajectory traj;
  traj.reserve(static_cast<std::size_t>(t_total));
  for (int t = 0; t < t_total; ++t)
    traj.push_back(detail::planar_ik(chain, path.target_xy(t, t_total)));
  return traj;
}

// Object centers per frame. A grasped object rides the arm's end effector
// from grasp_start on, keeping the relative offset it had at pickup, and
// stays where it was released. Failure episodes pass attach=false: the
// gripper runs the full trajectory but the object never moves with it.
inline std::vector<Eigen::Vector3d> object_centers(
    const SceneObject& obj, const std::map<std::string, std::vector<Eigen::Vector3d>>& ee_paths,
    int t_total, bool attach) {
  std::vector<Eigen::Vector3d> centers;
  centers.reserve(static_cast<std::size_t>(t_total));
  const bool grasped = attach && obj.grasp_start >= 0 && obj.grasp_end > obj.grasp_start;
  if (!grasped) {
    for (int t = 0; t < t_total; ++t) centers.push_back(obj.scripted_center(t));
    return centers;
  }
  const auto ee_it = ee_paths.find(obj.grasp_arm);
  if (ee_it == ee_paths.end())
    throw InvalidParameter("object_centers: no end-effector path for arm \"" + obj.grasp_arm +
                           "\"");
  const std::vector<Eigen::Vector3d>& ee = ee_it->second;
  const int gs = obj.grasp_start;
  const int ge = std::min(obj.grasp_end, t_total);
  const Eigen::Vector3d offset = obj.scripted_center(gs) - ee[static_cast<std::size_t>(gs)];
  for (int t = 0; t < t_total; ++t) {
    if (t < gs)
      centers.push_back(obj.scripted_center(t));
    else if (t < ge)
      centers.push_back(ee[static_cast<std::size_t>(t)] + offset);
    else
      centers.push_back(ee[static_cast<std::size_t>(ge - 1)] + offset);
  }
  return centers;
}

// Re-renders an episode's trajectory videos from its on-disk artifacts
// (manifest, chains, joints, calibs, frame-0 masks). Both the generator and
// the synth-traj command call this, so regeneration is byte-identical. A
// spec override patches the manifest's render parameters for this render
// only; the sidecar records whatever spec was actually used.
inline void render_episode_traj(const std::filesystem::path& episode_dir,
                                const json* spec_override = nullptr) {
  EpisodeManifest manifest = load_manifest(episode_dir / "manifest.json");
  if (spec_override != nullptr)
    manifest.video = traj_spec_from_json(*spec_override, manifest.video, "spec override");
  const json chains_json = load_json(episode_dir / manifest.chains);
  const json joints_json = load_json(episode_dir / manifest.joints);
  std::map<std::string, std::vector<Eigen::Vector3d>> ee_paths;
  for (const auto& [arm, chain_json] : chains_json.items()) {
    const DHChain chain = dh_chain_from_json(chain_json, manifest.chains + "." + arm);
    if (!joints_json.contains(arm))
      throw ConfigError(manifest.joints + ": missing trajectory for arm \"" + arm + "\"");
    JointTrajectory traj;
    for (const auto& frame : joints_json.at(arm)) {
      JointVector q;
      for (const auto& value : frame) q.push_back(value.get<double>());
      traj.push_back(std::move(q));
    }
    ee_paths[arm] = ee_positions(chain, traj);
  }
  std::vector<std::vector<ArmTrack>> tracks_per_view;
  std::vector<Mask> priors;
  for (const ViewPaths& view : manifest.views) {
    const CameraCalib calib = [&] {
      try {
        return load_calib(episode_dir / view.calib);
      } catch (const Error& e) {
        throw ConfigError("view \"" + view.view_id + "\": " + e.what());
      }
    }();
    std::vector<ArmTrack> tracks;
    for (const auto& [arm, ee] : ee_paths)
      tracks.push_back(ArmTrack{arm, track_from_trajectory(calib, ee)});
    tracks_per_view.push_back(std::move(tracks));
    // Foreground prior: union of every object's frame-0 mask.
    Mask prior = Mask::zeros(calib.width, calib.height);
    for (const ObjectDescription& obj : manifest.objects) {
      const std::filesystem::path mask0 =
          episode_dir / view.gt_masks / obj.object_id / frame_file_name(0);
      prior = mask_union(prior, load_mask_png(mask0));
    }
    priors.push_back(std::move(prior));
  }
  const std::vector<std::vector<Frame>> videos =
      synth_trajectory_video(tracks_per_view, priors, manifest.video);
  for (std::size_t v = 0; v < manifest.views.size(); ++v) {
    const std::filesystem::path traj_dir = episode_dir / manifest.views[v].traj;
    std::filesystem::create_directories(traj_dir);
    for (int t = 0; t < manifest.t_total; ++t)
      save_frame_png(traj_dir / frame_file_name(t), videos[v][static_cast<std::size_t>(t)]);
    save_json(traj_dir / "sidecar.json", json{{"view", manifest.views[v].view_id},
                                              {"frames", manifest.t_total},
                                              {"width", manifest.video.width},
                                              {"height", manifest.video.height},
                                              {"spec", to_json(manifest.video)}});
  }
}

// Emits one full episode tree under episode_dir. Everything downstream of
// the template is closed-form, so equal templates give byte-equal trees.
inline EpisodeManifest generate_episode(const SceneTemplate& tpl,
                                        const std::filesystem::path& episode_dir,
                                        const std::string& episode_id, bool success) {
  tpl.validate();
  std::filesystem::create_directories(episode_dir);

  // Joint trajectories and end-effector paths per arm.
  json chains_json = json::object();
  json joints_json = json::object();
  std::map<std::string, std::vector<Eigen::Vector3d>> ee_paths;
  for (const auto& [arm, chain] : tpl.chains) {
    const JointTrajectory traj = scripted_joint_trajectory(chain, tpl.paths.at(arm), tpl.t_total);
    chains_json[arm] = to_json(chain);
    json frames = json::array();
    for (const JointVector& q : traj) frames.push_back(q);
    joints_json[arm] = frames;
    ee_paths[arm] = ee_positions(chain, traj);
  }
  save_json(episode_dir / "chains.json", chains_json);
  save_json(episode_dir / "joints.json", joints_json);

  EpisodeManifest manifest;
  manifest.episode_id = episode_id;
  manifest.task_id = tpl.task_label;
  manifest.success = success;
  manifest.t_total = tpl.t_total;
  manifest.video = tpl.video;
  for (const SceneObject& obj : tpl.objects)
    manifest.objects.push_back(ObjectDescription{obj.description, obj.object_id});

  for (std::size_t v = 0; v < tpl.calibs.size(); ++v) {
    const std::string view_id = "view" + std::to_string(v + 1);
    ViewPaths paths;
    paths.view_id = view_id;
    paths.calib = view_id + "/calib.json";
    paths.gt_masks = view_id + "/gt_masks";
    paths.traj = view_id + "/traj";
    save_calib(episode_dir / paths.calib, tpl.calibs[v]);
    for (const SceneObject& obj : tpl.objects) {
      const std::vector<Eigen::Vector3d> centers =
          object_centers(obj, ee_paths, tpl.t_total, success);
      const std::filesystem::path mask_dir = episode_dir / paths.gt_masks / obj.object_id;
      std::filesystem::create_directories(mask_dir);
      for (int t = 0; t < tpl.t_total; ++t) {
        const Box3 box{centers[static_cast<std::size_t>(t)], obj.half_extent};
        save_mask_png(mask_dir / frame_file_name(t), render_gt_mask(tpl.calibs[v], box));
      }
    }
    manifest.views.push_back(paths);
  }
  save_manifest(episode_dir / "manifest.json", manifest);
  render_episode_traj(episode_dir);
  return manifest;
}

// ---------------------------------------------------------------------------
// Default desk-scale scene: two planar 6-row arms over a table at z=0, two
// calibrated views, two objects. Task templates vary the circle paths, the
// grasp window, and the object sizes; the numbers below were chosen so every
// projected end-effector step moves >= 6 px in both views (twice the glow
// radius), which guarantees a unique brightest pixel at the trail head.

inline DHChain default_arm_chain(double base_y) {
  DHChain chain;
  chain.base.translation = Eigen::Vector3d(0.0, base_y, 0.0);
  chain.rows = {
      DHRow{0.32, 0.0, 0.18, 0.0},  // shoulder: lifts the plane, link l1
      DHRow{0.26, 0.0, 0.0, 0.0},   // elbow: link l2
      DHRow{0.0, 0.0, 0.0, 0.0},    // wrist stubs: zero rows keep 6 DoF
      DHRow{0.0, 0.0, 0.0, 0.0},   DHRow{0.0, 0.0, 0.0, 0.0},
      DHRow{0.0, 0.0, 0.0, 0.0},
  };
  return chain;
}

// Camera-to-base pose looking from `eye` toward `target`, x right, y down.
inline CameraCalib look_at_calib(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                                 double focal, int width, int height) {
  const Eigen::Vector3d z = (target - eye).normalized();
  const Eigen::Vector3d up(0.0, 0.0, 1.0);
  const Eigen::Vector3d x = z.cross(up).normalized();
  const Eigen::Vector3d y = z.cross(x);
  CameraCalib calib;
  calib.fx = focal;
  calib.fy = focal;
  calib.cx = width / 2.0;
  calib.cy = height / 2.0;
  calib.R.col(0) = x;
  calib.R.col(1) = y;
  calib.R.col(2) = z;
  calib.t = eye;
  calib.width = width;
  calib.height = height;
  return calib;
}

inline SceneTemplate default_scene_template(int task_index) {
  if (task_index < 0 || task_index >= 15)
    throw InvalidParameter("default_scene_template: task index must be in [0,15)");
  static constexpr const char* kColors[] = {"red",    "blue",  "yellow", "green", "purple",
                                            "orange", "black", "white",  "brown", "pink",
                                            "gray",   "cyan",  "violet", "olive", "teal"};
  SceneTemplate tpl;
  char label[16];
  std::snprintf(label, sizeof(label), "task_%02d", task_index + 1);
  tpl.task_label = label;
  tpl.t_total = 81;
  tpl.chains["left"] = default_arm_chain(0.25);
  tpl.chains["right"] = default_arm_chain(-0.25);

  // Revolution counts put every projected step near 7 px (comfortably above
  // twice the glow radius, so trail heads stay uniquely brightest) while one
  // revolution spans ~18 frames, far beyond the 8-frame trail, so the path
  // never overlaps its own live trail.
  ArmPath left;
  left.circle_center = Eigen::Vector2d(0.30, 0.25);
  left.circle_radius = 0.090 + 0.002 * (task_index % 4);
  left.phase0 = 2.0 * kPi * task_index / 15.0;
  left.revolutions = 4.2 + 0.1 * (task_index % 3);
  ArmPath right;
  right.circle_center = Eigen::Vector2d(0.30, -0.25);
  right.circle_radius = 0.088 + 0.002 * (task_index % 3);
  right.phase0 = 2.0 * kPi * (task_index + 7) / 15.0;
  right.revolutions = -(4.3 + 0.1 * (task_index % 2));  // opposite sweep direction
  tpl.paths["left"] = left;
  tpl.paths["right"] = right;

  // Two steep oblique views; elevation keeps horizontal motion from
  // foreshortening below the trail-separation floor anywhere on the circles.
  tpl.calibs.push_back(
      look_at_calib(Eigen::Vector3d(1.05, 0.0, 0.95), Eigen::Vector3d(0.30, 0.0, 0.15), 400.0,
                    384, 288));
  tpl.calibs.push_back(
      look_at_calib(Eigen::Vector3d(0.35, 0.75, 1.00), Eigen::Vector3d(0.30, 0.0, 0.12), 400.0,
                    384, 288));

  const std::string grasp_arm = (task_index % 2 == 0) ? "left" : "right";
  const int gs = 18 + 3 * (task_index % 4);
  const int ge = 58 + 4 * (task_index % 3);
  SceneObject target;
  target.object_id = "obj_00";
  target.description = std::string("the ") + kColors[task_index] + " block";
  target.half_extent = Eigen::Vector3d(0.024 + 0.001 * (task_index % 3), 0.024, 0.022);
  // Placed exactly where the gripper passes at grasp_start, slightly below
  // the end-effector plane, so attachment is seamless.
  const ArmPath& gpath = tpl.paths.at(grasp_arm);
  const Eigen::Vector2d pickup = gpath.target_xy(gs, tpl.t_total);
  target.script = {MotionKey{0, Eigen::Vector3d(pickup.x(), pickup.y(), 0.13)}};
  target.grasp_start = gs;
  target.grasp_end = ge;
  target.grasp_arm = grasp_arm;
  tpl.objects.push_back(target);

  SceneObject distractor;
  distractor.object_id = "obj_01";
  distractor.description = std::string("the ") + kColors[(task_index + 5) % 15] + " cup";
  distractor.half_extent = Eigen::Vector3d(0.020, 0.020, 0.030);
  distractor.script = {
      MotionKey{0, Eigen::Vector3d(0.16 + 0.004 * (task_index % 5),
                                   0.05 - 0.007 * (task_index % 4), 0.03)}};
  tpl.objects.push_back(distractor);

  TrajVideoSpec video;
  video.trail_length = 8;
  video.point_radius = 3;
  video.width = 384;
  video.height = 288;
  video.frame_count = tpl.t_total;
  tpl.video = video;
  return tpl;
}

inline std::vector<SceneTemplate> default_scene_templates() {
  std::vector<SceneTemplate> templates;
  templates.reserve(15);
  for (int i = 0; i < 15; ++i) templates.push_back(default_scene_template(i));
  return templates;
}

inline json to_json(const SceneTemplate& tpl) {
  json chains = json::object();
  for (const auto& [arm, chain] : tpl.chains) chains[arm] = to_json(chain);
  json paths = json::object();
  for (const auto& [arm, path] : tpl.paths)
    paths[arm] = {{"circle_center", json::array({path.circle_center.x(), path.circle_center.y()})},
                  {"circle_radius", path.circle_radius},
                  {"phase0", path.phase0},
                  {"revolutions", path.revolutions}};
  json calibs = json::array();
  for (const CameraCalib& c : tpl.calibs) calibs.push_back(to_json(c));
  json objects = json::array();
  for (const SceneObject& o : tpl.objects) {
    json script = json::array();
    for (const MotionKey& k : o.script)
      script.push_back({{"t", k.t}, {"center", to_json(k.center)}});
    objects.push_back({{"object_id", o.object_id},
                       {"description", o.description},
                       {"half_extent", to_json(o.half_extent)},
                       {"script", script},
                       {"grasp_start", o.grasp_start},
                       {"grasp_end", o.grasp_end},
                       {"grasp_arm", o.grasp_arm}});
  }
  return {{"seed", tpl.seed},     {"task_label", tpl.task_label}, {"chains", chains},
          {"paths", paths},       {"calibs", calibs},             {"objects", objects},
          {"t_total", tpl.t_total}, {"video", to_json(tpl.video)}};
}

inline SceneTemplate scene_template_from_json(const json& j, const std::string& what) {
  SceneTemplate tpl;
  if (j.contains("seed")) tpl.seed = j.at("seed").get<std::uint64_t>();
  if (!j.contains("task_label") || !j.at("task_label").is_string())
    throw ConfigError(what + ": missing \"task_label\"");
  tpl.task_label = j.at("task_label").get<std::string>();
  if (!j.contains("chains") || !j.at("chains").is_object())
    throw ConfigError(what + ": missing \"chains\"");
  for (const auto& [arm, chain] : j.at("chains").items())
    tpl.chains[arm] = dh_chain_from_json(chain, what + ".chains." + arm);
  if (!j.contains("paths") || !j.at("paths").is_object())
    throw ConfigError(what + ": missing \"paths\"");
  for (const auto& [arm, p] : j.at("paths").items()) {
    const std::string where = what + ".paths." + arm;
    ArmPath path;
    if (!p.contains("circle_center") || !p.at("circle_center").is_array() ||
        p.at("circle_center").size() != 2)
      throw ConfigError(where + ": circle_center must be [x,y]");
    path.circle_center.x() = p.at("circle_center")[0].get<double>();
    path.circle_center.y() = p.at("circle_center")[1].get<double>();
    path.circle_radius = number_field(p, "circle_radius", where);
    path.phase0 = number_field(p, "phase0", where);
    path.revolutions = number_field(p, "revolutions", where);
    tpl.paths[arm] = path;
  }
  if (!j.contains("calibs") || !j.at("calibs").is_array())
    throw ConfigError(what + ": missing \"calibs\"");
  for (std::size_t v = 0; v < j.at("calibs").size(); ++v)
    tpl.calibs.push_back(
        calib_from_json(j.at("calibs")[v], what + ".calibs[" + std::to_string(v) + "]"));
  if (!j.contains("objects") || !j.at("objects").is_array())
    throw ConfigError(what + ": missing \"objects\"");
  for (const auto& o : j.at("objects")) {
    const std::string where = what + ".objects";
    SceneObject obj;
    if (!o.contains("object_id") || !o.at("object_id").is_string())
      throw ConfigError(where + ": missing \"object_id\"");
    obj.object_id = o.at("object_id").get<std::string>();
    if (!o.contains("description") || !o.at("description").is_string())
      throw ConfigError(where + ": missing \"description\"");
    obj.description = o.at("description").get<std::string>();
    if (!o.contains("half_extent")) throw ConfigError(where + ": missing \"half_extent\"");
    obj.half_extent = vector3_from_json(o.at("half_extent"), where + ".half_extent");
    if (!o.contains("script") || !o.at("script").is_array() || o.at("script").empty())
      throw ConfigError(where + ": missing non-empty \"script\"");
    for (const auto& k : o.at("script"))
      obj.script.push_back(MotionKey{static_cast<int>(number_field(k, "t", where + ".script")),
                                     vector3_from_json(k.at("center"), where + ".script.center")});
    if (o.contains("grasp_start")) obj.grasp_start = static_cast<int>(number_field(o, "grasp_start", where));
    if (o.contains("grasp_end")) obj.grasp_end = static_cast<int>(number_field(o, "grasp_end", where));
    if (o.contains("grasp_arm") && o.at("grasp_arm").is_string())
      obj.grasp_arm = o.at("grasp_arm").get<std::string>();
    tpl.objects.push_back(std::move(obj));
  }
  tpl.t_total = static_cast<int>(number_field(j, "t_total", what));
  if (j.contains("video")) tpl.video = traj_spec_from_json(j.at("video"), TrajVideoSpec{}, what + ".video");
  tpl.video.frame_count = tpl.t_total;
  try {
    tpl.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(what + ": " + e.what());
  }
  return tpl;
}

// A template file holds either one template object or an array of them.
inline std::vector<SceneTemplate> load_scene_templates(const std::filesystem::path& path) {
  const json j = load_json(path);
  std::vector<SceneTemplate> templates;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      templates.push_back(
          scene_template_from_json(j[i], path.string() + "[" + std::to_string(i) + "]"));
  } else {
    templates.push_back(scene_template_from_json(j, path.string()));
  }
  if (templates.empty()) throw ConfigError(path.string() + ": no templates");
  return templates;
}

// Episode-level variation: the seed perturbs path phases and the distractor
// position, leaving the task's structure alone. Pure function of (base,
// seed), so regeneration is reproducible.
inline SceneTemplate instantiate_template(const SceneTemplate& base, std::uint64_t seed) {
  SceneTemplate tpl = base;
  tpl.seed = seed;
  DetRng rng(seed);
  for (auto& [arm, path] : tpl.paths) path.phase0 += rng.uniform(0.0, 2.0 * kPi);
  // Re-anchor the target to the perturbed pickup point.
  for (SceneObject& obj : tpl.objects) {
    if (obj.grasp_start >= 0) {
      const Eigen::Vector2d pickup =
          tpl.paths.at(obj.grasp_arm).target_xy(obj.grasp_start, tpl.t_total);
      const double z = obj.script.front().center.z();
      obj.script = {MotionKey{0, Eigen::Vector3d(pickup.x(), pickup.y(), z)}};
    } else if (!obj.script.empty()) {
      Eigen::Vector3d c = obj.script.front().center;
      c.x() += rng.uniform(-0.015, 0.015);
      c.y() += rng.uniform(-0.015, 0.015);
      obj.script = {MotionKey{0, c}};
    }
  }
  return tpl;
}

}  // namespace mtv
