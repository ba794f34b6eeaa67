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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtv/clients.hpp"
#include "mtv/errors.hpp"
#include "mtv/evalcore.hpp"
#include "mtv/synthscene.hpp"
#include "mtv/util.hpp"

// Orchestration over episode trees: scene generation, trajectory-video
// regeneration, and tree-vs-tree evaluation. All fan-out is across episodes
// (pure per-episode work), collected back in episode order so outputs are
// byte-stable at any parallelism degree.

namespace mtv {

inline std::string episode_dir_name(int index) {
  char name[16];
  std::snprintf(name, sizeof(name), "ep_%04d", index);
  return name;
}

inline std::vector<std::filesystem::path> episode_dirs(const std::filesystem::path& root) {
  const std::filesystem::path episodes = root / "episodes";
  if (!std::filesystem::is_directory(episodes))
    throw ConfigError(episodes.string() + " is not a directory");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(episodes))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// Round-robin across templates; every fifth episode is a scripted failure
// (gripper misses: the full trajectory runs, the object never moves).
inline void synth_scene_run(const std::filesystem::path& out_root, int n_episodes,
                            std::uint64_t seed, int jobs,
                            const std::vector<SceneTemplate>& templates) {
  if (n_episodes < 0) throw InvalidParameter("synth_scene_run: negative episode count");
  if (templates.empty()) throw InvalidParameter("synth_scene_run: no templates");
  if (n_episodes == 0) return;
  parallel_for(static_cast<std::size_t>(n_episodes), jobs, [&](std::size_t i) {
    const SceneTemplate tpl = instantiate_template(templates[i % templates.size()],
                                                    DetRng::mix(seed, i));
    const std::string id = episode_dir_name(static_cast<int>(i));
    const bool success = (i % 5) != 4;
    generate_episode(tpl, out_root / "episodes" / id, id, success);
  });
}

inline void synth_traj_run(const std::filesystem::path& root, int jobs,
                           const json* spec_override = nullptr) {
  const std::vector<std::filesystem::path> dirs = episode_dirs(root);
  parallel_for(dirs.size(), jobs, [&](std::size_t i) {
    render_episode_traj(dirs[i], spec_override);
  });
}

namespace detail {

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir,
                                                         bool directories) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory() == directories) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline MaskSequence load_mask_sequence(const std::filesystem::path& dir) {
  MaskSequence seq;
  for (const std::filesystem::path& p : sorted_entries(dir, /*directories=*/false))
    if (p.extension() == ".png") seq.push_back(load_mask_png(p));
  if (seq.empty()) throw ConfigError(dir.string() + ": no mask frames");
  return seq;
}

// A predicted tree mirrors the ground-truth layout; its masks may sit under
// the same relative path or under view<k>/masks when the tree was produced
// by a segmentation backend.
inline std::filesystem::path resolve_pred_mask_dir(const std::filesystem::path& pred_episode,
                                                   const ViewPaths& view) {
  const std::filesystem::path mirrored = pred_episode / view.gt_masks;
  if (std::filesystem::is_directory(mirrored)) return mirrored;
  const std::filesystem::path renamed = pred_episode / view.view_id / "masks";
  if (std::filesystem::is_directory(renamed)) return renamed;
  return {};
}

inline std::vector<Frame> load_frame_sequence(const std::filesystem::path& dir) {
  std::vector<Frame> frames;
  for (const std::filesystem::path& p : sorted_entries(dir, /*directories=*/false))
    if (p.extension() == ".png") frames.push_back(load_frame_png(p));
  if (frames.empty()) throw ConfigError(dir.string() + ": no frames");
  return frames;
}

}  // namespace detail

// Scores one episode of the predicted tree against its ground-truth twin.
// Ground truth provides the object structure; when the predicted tree has
// no masks for a view and a segmentation client is supplied, the predicted
// trajectory frames are segmented per object description instead.
inline std::vector<VideoScore> eval_episode(const std::filesystem::path& pred_episode,
                                            const std::filesystem::path& gt_episode,
                                            SegmentationClient* segmenter = nullptr) {
  const EpisodeManifest manifest = load_manifest(gt_episode / "manifest.json");
  std::vector<VideoScore> scores;
  for (const ViewPaths& view : manifest.views) {
    const std::filesystem::path gt_dir = gt_episode / view.gt_masks;
    if (!std::filesystem::is_directory(gt_dir))
      throw ConfigError(gt_dir.string() + ": ground-truth mask directory missing");
    const std::vector<std::filesystem::path> gt_objects =
        detail::sorted_entries(gt_dir, /*directories=*/true);
    std::vector<MaskSequence> gts;
    if (gt_objects.empty())
      gts.push_back(detail::load_mask_sequence(gt_dir));
    else
      for (const auto& obj : gt_objects) gts.push_back(detail::load_mask_sequence(obj));

    std::vector<MaskSequence> preds;
    const std::filesystem::path pred_dir = detail::resolve_pred_mask_dir(pred_episode, view);
    if (!pred_dir.empty()) {
      const std::vector<std::filesystem::path> pred_objects =
          detail::sorted_entries(pred_dir, /*directories=*/true);
      if (pred_objects.empty())
        preds.push_back(detail::load_mask_sequence(pred_dir));
      else
        for (const auto& obj : pred_objects) preds.push_back(detail::load_mask_sequence(obj));
      if (preds.size() != gts.size())
        throw ConfigError(manifest.episode_id + "/" + view.view_id + ": predicted tree has " +
                          std::to_string(preds.size()) + " object mask sets, ground truth has " +
                          std::to_string(gts.size()));
    } else if (segmenter != nullptr) {
      const std::vector<Frame> frames =
          detail::load_frame_sequence(pred_episode / view.traj);
      if (manifest.objects.size() != gts.size())
        throw ConfigError(manifest.episode_id + "/" + view.view_id +
                          ": manifest object list does not match mask directories");
      for (const ObjectDescription& desc : manifest.objects)
        preds.push_back(segment_video(*segmenter, frames, desc));
    } else {
      throw ConfigError(pred_episode.string() + "/" + view.view_id +
                        ": no predicted masks found (and no segmentation backend configured)");
    }
    scores.push_back(jaccard_video_multi(preds, gts, manifest.episode_id, view.view_id,
                                         manifest.task_id));
  }
  return scores;
}

// Evaluates matching episode trees. Episodes present in the ground truth
// but absent from the predicted tree are a hard error, listed by name.
inline std::vector<VideoScore> eval_trees(const std::filesystem::path& pred_root,
                                          const std::filesystem::path& gt_root, int jobs,
                                          SegmentationClient* segmenter = nullptr) {
  const std::vector<std::filesystem::path> gt_dirs = episode_dirs(gt_root);
  std::vector<std::filesystem::path> pred_dirs;
  std::string missing;
  for (const std::filesystem::path& gt : gt_dirs) {
    const std::filesystem::path pred = pred_root / "episodes" / gt.filename();
    if (!std::filesystem::is_directory(pred))
      missing += missing.empty() ? gt.filename().string() : ", " + gt.filename().string();
    else
      pred_dirs.push_back(pred);
  }
  if (!missing.empty())
    throw ConfigError("predicted tree is missing episodes: " + missing);
  std::vector<std::vector<VideoScore>> per_episode(gt_dirs.size());
  parallel_for(gt_dirs.size(), jobs, [&](std::size_t i) {
    per_episode[i] = eval_episode(pred_dirs[i], gt_dirs[i], segmenter);
  });
  std::vector<VideoScore> scores;
  for (const auto& batch : per_episode) scores.insert(scores.end(), batch.begin(), batch.end());
  return scores;
}

// scores.jsonl + report.<format> + per-view ranking CSVs, plus the rollout
// progress-curve CSV when bins >= 1.
inline EvalReport write_eval_outputs(const std::vector<VideoScore>& scores,
                                     const std::filesystem::path& out_dir,
                                     const std::string& format, int bins) {
  std::filesystem::create_directories(out_dir);
  save_scores_jsonl(out_dir / "scores.jsonl", scores);
  const EvalReport report = aggregate(scores);
  emit_report(report, format, out_dir / ("report." + format));
  for (const auto& [view, cells] : report.views) {
    std::string csv = "task,mean_j\n";
    for (const auto& [task, mean] : rank_tasks(report, view))
      csv += task + "," + format_percent_1dp(mean) + "\n";
    write_file(out_dir / ("ranking_" + view + ".csv"), csv);
  }
  if (bins >= 1) {
    std::string csv = "bin,mean_j\n";
    for (const auto& [bin, mean] : progress_curve(scores, bins))
      csv += std::to_string(bin) + "," + format_percent_1dp(mean) + "\n";
    write_file(out_dir / "progress.csv", csv);
  }
  return report;
}

}  // namespace mtv
