// Copyright 2026 The mtvkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// mtv: one binary, seven subcommands, two pipelines. Synthesis goes
// synth-scene -> synth-traj; evaluation goes eval (or report, from saved
// scores). fk, project, and latent-check are small diagnostics.
//
// Exit codes are a stable contract:
//   0 success, 1 check failure (latent-check), 2 input/config error,
//   3 runtime error (remote backends, unexpected failures).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtv/clients.hpp"
#include "mtv/evalcore.hpp"
#include "mtv/kinematics.hpp"
#include "mtv/latentgrid.hpp"
#include "mtv/pipeline.hpp"
#include "mtv/synthscene.hpp"

namespace {

// A chain file is either one chain object or a map of per-arm chains
// (the layout synth-scene writes). --arm picks from a map.
mtv::DHChain pick_chain(const mtv::json& j, const std::string& what, const std::string& arm) {
  if (j.is_object() && j.contains("rows")) return mtv::dh_chain_from_json(j, what);
  if (j.is_object() && !j.empty()) {
    if (!arm.empty()) {
      if (!j.contains(arm))
        throw mtv::ConfigError(what + ": no chain for arm \"" + arm + "\"");
      return mtv::dh_chain_from_json(j.at(arm), what + "." + arm);
    }
    if (j.size() == 1)
      return mtv::dh_chain_from_json(j.begin().value(), what + "." + j.begin().key());
    throw mtv::ConfigError(what + ": holds several chains, pass --arm");
  }
  throw mtv::ConfigError(what + ": expected a DH chain object");
}

// Joints: a plain array of frames, {"frames": [...]}, or a per-arm map.
mtv::JointTrajectory pick_joints(const mtv::json& j, const std::string& what,
                                 const std::string& arm) {
  const mtv::json* frames = nullptr;
  std::string where = what;
  if (j.is_array()) {
    frames = &j;
  } else if (j.is_object()) {
    if (j.contains("frames")) {
      frames = &j.at("frames");
      where += ".frames";
    } else if (!arm.empty() && j.contains(arm)) {
      frames = &j.at(arm);
      where += "." + arm;
    } else if (arm.empty() && j.size() == 1) {
      frames = &j.begin().value();
      where += "." + j.begin().key();
    } else if (!arm.empty()) {
      throw mtv::ConfigError(what + ": no trajectory for arm \"" + arm + "\"");
    } else {
      throw mtv::ConfigError(what + ": holds several trajectories, pass --arm");
    }
  }
  if (frames == nullptr || !frames->is_array())
    throw mtv::ConfigError(where + ": expected an array of joint vectors");
  mtv::JointTrajectory traj;
  traj.reserve(frames->size());
  for (std::size_t t = 0; t < frames->size(); ++t) {
    const mtv::json& frame = (*frames)[t];
    if (!frame.is_array())
      throw mtv::ConfigError(where + "[" + std::to_string(t) + "]: expected a joint vector");
    mtv::JointVector q;
    q.reserve(frame.size());
    for (const auto& value : frame) {
      if (!value.is_number())
        throw mtv::ConfigError(where + "[" + std::to_string(t) + "]: joints must be numbers");
      q.push_back(value.get<double>());
    }
    traj.push_back(std::move(q));
  }
  return traj;
}

void emit_json(const mtv::json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    mtv::save_json(out_path, j);
}

// Config-file fallback: a flag that was not passed takes its value from the
// config when present. Flags always win.
template <typename T>
void config_fallback(const CLI::Option* opt, const mtv::json& config, const char* key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (config.is_object() && config.contains(key)) value = config.at(key).get<T>();
}

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : mtv::default_jobs(); }

int run_fk(const std::string& chain_file, const std::string& joints_file, const std::string& arm,
           const std::string& out_path) {
  const mtv::DHChain chain = pick_chain(mtv::load_json(chain_file), chain_file, arm);
  const mtv::JointTrajectory traj = pick_joints(mtv::load_json(joints_file), joints_file, arm);
  const std::vector<Eigen::Vector3d> positions = mtv::ee_positions(chain, traj);
  mtv::json out = mtv::json::array();
  for (const Eigen::Vector3d& p : positions) out.push_back(mtv::to_json(p));
  emit_json(out, out_path);
  return 0;
}

int run_project(const std::string& calib_file, const std::string& points_file,
                const std::string& out_path) {
  const mtv::CameraCalib calib = mtv::load_calib(calib_file);
  const mtv::json pts = mtv::load_json(points_file);
  const mtv::json* arr = &pts;
  std::string where = points_file;
  if (pts.is_object() && pts.contains("points")) {
    arr = &pts.at("points");
    where += ".points";
  }
  if (!arr->is_array()) throw mtv::ConfigError(where + ": expected an array of 3-vectors");
  mtv::json out = mtv::json::array();
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const Eigen::Vector3d p =
        mtv::vector3_from_json((*arr)[i], where + "[" + std::to_string(i) + "]");
    const mtv::PixelPoint px = mtv::project_world(calib, p);
    out.push_back({{"u", px.u}, {"v", px.v}, {"visible", px.visible}});
  }
  emit_json(out, out_path);
  return 0;
}

int run_synth_scene(const std::string& out_dir, int episodes, std::uint64_t seed, int jobs,
                    const std::string& template_file) {
  std::vector<mtv::SceneTemplate> templates;
  if (template_file.empty())
    templates = mtv::default_scene_templates();
  else
    templates = mtv::load_scene_templates(template_file);
  mtv::synth_scene_run(out_dir, episodes, seed, resolve_jobs(jobs), templates);
  std::cout << "generated " << episodes << " episode(s) under " << out_dir << "\n";
  return 0;
}

int run_synth_traj(const std::string& root, int jobs, const mtv::json& config) {
  const mtv::json* spec_override = nullptr;
  if (config.is_object() && config.contains("spec")) spec_override = &config.at("spec");
  mtv::synth_traj_run(root, resolve_jobs(jobs), spec_override);
  const std::size_t n = mtv::episode_dirs(root).size();
  std::cout << "rendered trajectory videos for " << n << " episode(s) under " << root << "\n";
  return 0;
}

std::unique_ptr<mtv::SegmentationClient> make_segmenter(const std::string& fixtures_dir) {
  if (!fixtures_dir.empty())
    return std::make_unique<mtv::MockSegmentationClient>(fixtures_dir);
  const std::string url = mtv::env_or("MTV_RVOS_URL", "");
  if (url.empty()) return nullptr;
  mtv::HttpEndpoint endpoint;
  endpoint.url = url;
  endpoint.api_token = mtv::env_or("MTV_API_TOKEN", "");
  return std::make_unique<mtv::HttpSegmentationClient>(endpoint);
}

void print_overall(const mtv::EvalReport& report) {
  for (const auto& [view, j] : report.overall)
    std::cout << "overall " << view << ": " << mtv::format_percent_1dp(j) << "\n";
}

int run_eval(const std::string& pred, const std::string& gt, const std::string& out_dir,
             const std::string& format, int bins, int jobs, const std::string& fixtures_dir) {
  const std::unique_ptr<mtv::SegmentationClient> segmenter = make_segmenter(fixtures_dir);
  const std::vector<mtv::VideoScore> scores =
      mtv::eval_trees(pred, gt, resolve_jobs(jobs), segmenter.get());
  const mtv::EvalReport report = mtv::write_eval_outputs(scores, out_dir, format, bins);
  print_overall(report);
  return 0;
}

int run_report(const std::string& scores_file, const std::string& out_dir,
               const std::string& format, int bins) {
  const std::vector<mtv::VideoScore> scores = mtv::load_scores_jsonl(scores_file);
  const mtv::EvalReport report = mtv::write_eval_outputs(scores, out_dir, format, bins);
  print_overall(report);
  return 0;
}

// Round-trips labeled token blocks through assemble -> strip -> flatten ->
// unflatten and verifies every label and flag lands back where it started.
// --inject-corruption flips one flattened label to prove the check can fail.
int run_latent_check(int views, int frames, bool inject_corruption) {
  const auto fail = [&](const std::string& why) {
    std::cout << "FAIL latent-check (V=" << views << ", T=" << frames << "): " << why << "\n";
    return 1;
  };
  try {
    const mtv::BlockShape shape{16, 3, 4};
    std::vector<mtv::TokenBlock> refs;
    std::vector<std::vector<mtv::TokenBlock>> frame_blocks;
    for (int v = 0; v < views; ++v) {
      refs.push_back(mtv::TokenBlock{shape, 1000u + static_cast<std::uint64_t>(v), false});
      std::vector<mtv::TokenBlock> row;
      for (int t = 0; t < frames; ++t)
        row.push_back(mtv::TokenBlock{
            shape, 10000u * static_cast<std::uint64_t>(v + 1) + static_cast<std::uint64_t>(t),
            false});
      frame_blocks.push_back(std::move(row));
    }
    const mtv::TokenGrid grid = mtv::assemble(refs, frame_blocks);
    for (int v = 0; v < views; ++v) {
      if (!grid.at(v, 0).reference) return fail("reference flag missing after assemble");
      for (int t = 0; t < frames; ++t)
        if (grid.at(v, 1 + t).label != frame_blocks[static_cast<std::size_t>(v)]
                                           [static_cast<std::size_t>(t)].label)
          return fail("frame label moved during assemble");
    }
    const std::vector<std::vector<mtv::TokenBlock>> stripped = mtv::strip_references(grid);
    if (static_cast<int>(stripped.size()) != views) return fail("strip changed the view count");
    for (int v = 0; v < views; ++v)
      for (int t = 0; t < frames; ++t) {
        const mtv::TokenBlock& b = stripped[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)];
        if (b.reference) return fail("reference block survived strip");
        if (b.label != frame_blocks[static_cast<std::size_t>(v)][static_cast<std::size_t>(t)].label)
          return fail("frame label moved during strip");
      }
    auto [payload, map] = mtv::flatten(grid);
    if (inject_corruption && !payload.empty()) payload.front().label ^= 1u;
    const mtv::TokenGrid rebuilt = mtv::unflatten(payload, map);
    for (int v = 0; v < views; ++v)
      for (int s = 0; s < 1 + frames; ++s) {
        const mtv::TokenBlock& got = rebuilt.at(v, s);
        const mtv::TokenBlock& want = grid.at(v, s);
        if (got.label != want.label || got.reference != want.reference ||
            !(got.shape == want.shape))
          return fail("flatten/unflatten round-trip mismatch at view " + std::to_string(v) +
                      " slot " + std::to_string(s));
      }
  } catch (const mtv::Error& e) {
    return fail(e.what());
  }
  std::cout << "PASS latent-check (V=" << views << ", T=" << frames << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory-video control signals and mask-based evaluation"};
  app.require_subcommand(1);

  int rc = 0;

  // fk
  auto* fk = app.add_subcommand("fk", "forward kinematics: DH chain + joints -> EE positions");
  std::string fk_chain, fk_joints, fk_arm, fk_out;
  fk->add_option("--chain", fk_chain, "DH chain JSON file")->required();
  fk->add_option("--joints", fk_joints, "joint trajectory JSON file")->required();
  fk->add_option("--arm", fk_arm, "arm to pick when files hold several");
  fk->add_option("--out", fk_out, "output JSON path (default: stdout)");
  fk->callback([&] { rc = run_fk(fk_chain, fk_joints, fk_arm, fk_out); });

  // project
  auto* project = app.add_subcommand("project", "project world points through a camera");
  std::string pr_calib, pr_points, pr_out;
  project->add_option("--calib", pr_calib, "camera calibration JSON file")->required();
  project->add_option("--points", pr_points, "JSON array of world 3-vectors")->required();
  project->add_option("--out", pr_out, "output JSON path (default: stdout)");
  project->callback([&] { rc = run_project(pr_calib, pr_points, pr_out); });

  // synth-scene
  auto* scene = app.add_subcommand("synth-scene", "generate synthetic episode trees");
  std::string sc_out, sc_template, sc_config;
  int sc_episodes = 15;
  std::uint64_t sc_seed = 42;
  int sc_jobs = 0;
  auto* sc_out_opt = scene->add_option("--out", sc_out, "output root directory");
  auto* sc_ep_opt = scene->add_option("--episodes", sc_episodes, "episode count (default 15)");
  auto* sc_seed_opt = scene->add_option("--seed", sc_seed, "master seed (default 42)");
  auto* sc_jobs_opt = scene->add_option("--jobs", sc_jobs, "worker threads (default: cores)");
  auto* sc_tpl_opt = scene->add_option("--template", sc_template, "scene template JSON file");
  scene->add_option("--config", sc_config, "config JSON; flags override its keys");
  scene->callback([&] {
    mtv::json config;
    if (!sc_config.empty()) config = mtv::load_json(sc_config);
    config_fallback(sc_out_opt, config, "out", sc_out);
    config_fallback(sc_ep_opt, config, "episodes", sc_episodes);
    config_fallback(sc_seed_opt, config, "seed", sc_seed);
    config_fallback(sc_jobs_opt, config, "jobs", sc_jobs);
    config_fallback(sc_tpl_opt, config, "template", sc_template);
    if (sc_out.empty()) throw mtv::ConfigError("synth-scene: --out (or config \"out\") required");
    rc = run_synth_scene(sc_out, sc_episodes, sc_seed, sc_jobs, sc_template);
  });

  // synth-traj
  auto* traj = app.add_subcommand("synth-traj", "render trajectory videos for episode trees");
  std::string tj_root, tj_config;
  int tj_jobs = 0;
  auto* tj_root_opt = traj->add_option("--root", tj_root, "episode tree root");
  auto* tj_jobs_opt = traj->add_option("--jobs", tj_jobs, "worker threads (default: cores)");
  traj->add_option("--config", tj_config,
                   "config JSON; may carry a \"spec\" render override; flags win");
  traj->callback([&] {
    mtv::json config;
    if (!tj_config.empty()) config = mtv::load_json(tj_config);
    config_fallback(tj_root_opt, config, "root", tj_root);
    config_fallback(tj_jobs_opt, config, "jobs", tj_jobs);
    if (tj_root.empty()) throw mtv::ConfigError("synth-traj: --root (or config \"root\") required");
    rc = run_synth_traj(tj_root, tj_jobs, config);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "score predicted episodes against ground truth");
  std::string ev_pred, ev_gt, ev_out, ev_format = "md", ev_fixtures, ev_config;
  int ev_bins = 0;
  int ev_jobs = 0;
  auto* ev_pred_opt = eval->add_option("--pred", ev_pred, "predicted episode tree root");
  auto* ev_gt_opt = eval->add_option("--gt", ev_gt, "ground-truth episode tree root");
  auto* ev_out_opt = eval->add_option("--out", ev_out, "output directory");
  auto* ev_fmt_opt =
      eval->add_option("--format", ev_format, "report format: md or csv (default md)");
  auto* ev_bins_opt =
      eval->add_option("--bins", ev_bins, "progress-curve bin count (0 disables)");
  auto* ev_jobs_opt = eval->add_option("--jobs", ev_jobs, "worker threads (default: cores)");
  eval->add_option("--fixtures", ev_fixtures,
                   "segmentation fixture root (offline stand-in for MTV_RVOS_URL)");
  eval->add_option("--config", ev_config, "config JSON; flags override its keys");
  eval->callback([&] {
    mtv::json config;
    if (!ev_config.empty()) config = mtv::load_json(ev_config);
    config_fallback(ev_pred_opt, config, "pred", ev_pred);
    config_fallback(ev_gt_opt, config, "gt", ev_gt);
    config_fallback(ev_out_opt, config, "out", ev_out);
    config_fallback(ev_fmt_opt, config, "format", ev_format);
    config_fallback(ev_bins_opt, config, "bins", ev_bins);
    config_fallback(ev_jobs_opt, config, "jobs", ev_jobs);
    if (ev_pred.empty()) throw mtv::ConfigError("eval: --pred (or config \"pred\") required");
    if (ev_gt.empty()) throw mtv::ConfigError("eval: --gt (or config \"gt\") required");
    if (ev_out.empty()) throw mtv::ConfigError("eval: --out (or config \"out\") required");
    rc = run_eval(ev_pred, ev_gt, ev_out, ev_format, ev_bins, ev_jobs, ev_fixtures);
  });

  // report
  auto* report = app.add_subcommand("report", "rebuild reports from saved scores");
  std::string rp_scores, rp_out, rp_format = "md";
  int rp_bins = 0;
  report->add_option("--scores", rp_scores, "scores.jsonl path")->required();
  report->add_option("--out", rp_out, "output directory")->required();
  report->add_option("--format", rp_format, "report format: md or csv (default md)");
  report->add_option("--bins", rp_bins, "progress-curve bin count (0 disables)");
  report->callback([&] { rc = run_report(rp_scores, rp_out, rp_format, rp_bins); });

  // latent-check
  auto* latent = app.add_subcommand("latent-check", "token grid round-trip diagnostic");
  int lc_views = 2;
  int lc_frames = 81;
  bool lc_corrupt = false;
  latent->add_option("--views", lc_views, "view count V (default 2)");
  latent->add_option("--frames", lc_frames, "frame count T (default 81)");
  latent->add_flag("--inject-corruption", lc_corrupt, "corrupt one label to force FAIL")
      ->group("");  // test hook, hidden from help
  latent->callback([&] {
    if (lc_views < 0 || lc_frames < 0)
      throw mtv::ConfigError("latent-check: --views and --frames must be >= 0");
    rc = run_latent_check(lc_views, lc_frames, lc_corrupt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  } catch (const mtv::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtv::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtv::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtv::DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtv::LengthMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mtv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
