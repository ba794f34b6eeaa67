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
#include <string>
#include <utility>
#include <vector>

#include "mtv/errors.hpp"
#include "mtv/json_util.hpp"
#include "mtv/mask.hpp"
#include "mtv/util.hpp"

namespace mtv {

struct FrameScore {
  int t = 0;
  double j = 0.0;
  bool both_empty = false;
};

struct VideoScore {
  std::string episode_id;
  std::string view_id;
  std::string task_id;
  std::vector<FrameScore> frame_scores;
  double j_video = 0.0;
};

struct TaskCell {
  double mean_j = 0.0;
  std::size_t episodes = 0;
};

struct EvalReport {
  // view_id -> task_id -> cell; overall is the unweighted mean of the
  // per-task means within each view.
  std::map<std::string, std::map<std::string, TaskCell>> views;
  std::map<std::string, double> overall;
};

namespace detail {

// Extended-precision accumulation: sums of a few thousand equal frame
// scores stay exact, so a constant-j video reports exactly that j.
inline double mean_of(const std::vector<double>& values) {
  long double sum = 0.0L;
  for (double v : values) sum += v;
  return static_cast<double>(sum / static_cast<long double>(values.size()));
}

}  // namespace detail

// Frame-level Jaccard |pred ∩ gt| / |pred ∪ gt|. Two empty masks score 1
// with both_empty set (standard video-segmentation convention for the 0/0
// case), so callers can exclude such frames if they disagree.
inline FrameScore jaccard_frame(const Mask& pred, const Mask& gt) {
  if (!same_size(pred, gt))
    throw DimensionMismatch("jaccard_frame: pred " + std::to_string(pred.width) + "x" +
                            std::to_string(pred.height) + " vs gt " + std::to_string(gt.width) +
                            "x" + std::to_string(gt.height));
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const bool p = pred.data[i] != 0;
    const bool g = gt.data[i] != 0;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  FrameScore score;
  if (uni == 0) {
    score.j = 1.0;
    score.both_empty = true;
  } else {
    score.j = static_cast<double>(inter) / static_cast<double>(uni);
  }
  return score;
}

inline VideoScore jaccard_video(const MaskSequence& preds, const MaskSequence& gts,
                                std::string episode_id = "", std::string view_id = "",
                                std::string task_id = "") {
  if (preds.size() != gts.size())
    throw LengthMismatch("jaccard_video: " + std::to_string(preds.size()) +
                         " predicted frames vs " + std::to_string(gts.size()) + " ground truth");
  if (preds.empty()) throw InvalidParameter("jaccard_video: empty sequences");
  VideoScore score;
  score.episode_id = std::move(episode_id);
  score.view_id = std::move(view_id);
  score.task_id = std::move(task_id);
  std::vector<double> js;
  js.reserve(preds.size());
  for (std::size_t t = 0; t < preds.size(); ++t) {
    FrameScore fs = jaccard_frame(preds[t], gts[t]);
    fs.t = static_cast<int>(t);
    js.push_back(fs.j);
    score.frame_scores.push_back(fs);
  }
  score.j_video = detail::mean_of(js);
  return score;
}

// Multi-object episodes: per-object Jaccard per frame, averaged across
// objects before the temporal mean. both_empty marks frames where every
// object pair was empty/empty.
inline VideoScore jaccard_video_multi(const std::vector<MaskSequence>& preds_per_object,
                                      const std::vector<MaskSequence>& gts_per_object,
                                      std::string episode_id = "", std::string view_id = "",
                                      std::string task_id = "") {
  if (preds_per_object.size() != gts_per_object.size())
    throw LengthMismatch("jaccard_video_multi: " + std::to_string(preds_per_object.size()) +
                         " predicted objects vs " + std::to_string(gts_per_object.size()));
  if (preds_per_object.empty()) throw InvalidParameter("jaccard_video_multi: no objects");
  const std::size_t frames = gts_per_object.front().size();
  for (std::size_t o = 0; o < preds_per_object.size(); ++o)
    if (preds_per_object[o].size() != frames || gts_per_object[o].size() != frames)
      throw LengthMismatch("jaccard_video_multi: object " + std::to_string(o) +
                           " sequence length differs");
  if (frames == 0) throw InvalidParameter("jaccard_video_multi: empty sequences");
  VideoScore score;
  score.episode_id = std::move(episode_id);
  score.view_id = std::move(view_id);
  score.task_id = std::move(task_id);
  std::vector<double> js;
  js.reserve(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> per_object;
    per_object.reserve(preds_per_object.size());
    bool all_empty = true;
    for (std::size_t o = 0; o < preds_per_object.size(); ++o) {
      const FrameScore fs = jaccard_frame(preds_per_object[o][t], gts_per_object[o][t]);
      per_object.push_back(fs.j);
      all_empty = all_empty && fs.both_empty;
    }
    FrameScore fs;
    fs.t = static_cast<int>(t);
    fs.j = detail::mean_of(per_object);
    fs.both_empty = all_empty;
    js.push_back(fs.j);
    score.frame_scores.push_back(fs);
  }
  score.j_video = detail::mean_of(js);
  return score;
}

inline EvalReport aggregate(const std::vector<VideoScore>& scores) {
  EvalReport report;
  std::map<std::string, std::map<std::string, std::vector<double>>> buckets;
  for (const VideoScore& s : scores) buckets[s.view_id][s.task_id].push_back(s.j_video);
  for (const auto& [view, tasks] : buckets) {
    std::vector<double> task_means;
    task_means.reserve(tasks.size());
    for (const auto& [task, js] : tasks) {
      TaskCell cell;
      cell.mean_j = detail::mean_of(js);
      cell.episodes = js.size();
      report.views[view][task] = cell;
      task_means.push_back(cell.mean_j);
    }
    report.overall[view] = detail::mean_of(task_means);
  }
  return report;
}

// Per-frame scores pooled into n_bins equal slices of normalized rollout
// progress; bin = floor(n_bins * t / T) with T the episode's own length.
// Only bins that received at least one frame appear in the output.
inline std::vector<std::pair<int, double>> progress_curve(const std::vector<VideoScore>& scores,
                                                          int n_bins) {
  if (n_bins < 1) throw InvalidParameter("progress_curve: n_bins must be >= 1");
  std::map<int, std::vector<double>> bins;
  for (const VideoScore& s : scores) {
    const int frames = static_cast<int>(s.frame_scores.size());
    if (frames == 0) continue;
    for (const FrameScore& fs : s.frame_scores) {
      int bin = static_cast<int>(static_cast<long long>(n_bins) * fs.t / frames);
      bin = std::min(bin, n_bins - 1);
      bins[bin].push_back(fs.j);
    }
  }
  std::vector<std::pair<int, double>> curve;
  curve.reserve(bins.size());
  for (const auto& [bin, js] : bins) curve.emplace_back(bin, detail::mean_of(js));
  return curve;
}

// Descending by mean score; equal means fall back to ascending task id.
inline std::vector<std::pair<std::string, double>> rank_tasks(const EvalReport& report,
                                                              const std::string& view_id) {
  const auto it = report.views.find(view_id);
  if (it == report.views.end()) throw UnknownView("rank_tasks: no view \"" + view_id + "\"");
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(it->second.size());
  for (const auto& [task, cell] : it->second) ranked.emplace_back(task, cell.mean_j);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return ranked;
}

namespace detail {

inline std::vector<std::string> report_task_ids(const EvalReport& report) {
  std::vector<std::string> tasks;
  for (const auto& [view, cells] : report.views)
    for (const auto& [task, cell] : cells)
      if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) tasks.push_back(task);
  std::sort(tasks.begin(), tasks.end());
  return tasks;
}

}  // namespace detail

// Scores render as percentages, one decimal, half-up; cells carry the
// episode count in parentheses.
inline std::string render_report_markdown(const EvalReport& report) {
  const std::vector<std::string> tasks = detail::report_task_ids(report);
  std::string out = "| Task |";
  for (const auto& [view, cells] : report.views) out += " " + view + " |";
  out += "\n| --- |";
  for (std::size_t i = 0; i < report.views.size(); ++i) out += " --- |";
  out += "\n";
  for (const std::string& task : tasks) {
    out += "| " + task + " |";
    for (const auto& [view, cells] : report.views) {
      const auto cell = cells.find(task);
      if (cell == cells.end())
        out += " - |";
      else
        out += " " + format_percent_1dp(cell->second.mean_j) + " (" +
               std::to_string(cell->second.episodes) + ") |";
    }
    out += "\n";
  }
  out += "| Overall |";
  for (const auto& [view, mean] : report.overall) out += " " + format_percent_1dp(mean) + " |";
  out += "\n";
  return out;
}

inline std::string render_report_csv(const EvalReport& report) {
  std::string out = "task,view,mean_j,episodes\n";
  for (const auto& [view, cells] : report.views) {
    std::size_t total_episodes = 0;
    for (const auto& [task, cell] : cells) {
      out += task + "," + view + "," + format_percent_1dp(cell.mean_j) + "," +
             std::to_string(cell.episodes) + "\n";
      total_episodes += cell.episodes;
    }
    out += "Overall," + view + "," + format_percent_1dp(report.overall.at(view)) + "," +
           std::to_string(total_episodes) + "\n";
  }
  return out;
}

inline void emit_report(const EvalReport& report, const std::string& format,
                        const std::filesystem::path& path) {
  if (format == "md")
    write_file(path, render_report_markdown(report));
  else if (format == "csv")
    write_file(path, render_report_csv(report));
  else
    throw InvalidParameter("emit_report: format must be md or csv, got \"" + format + "\"");
}

inline json to_json(const VideoScore& score) {
  json frames = json::array();
  for (const FrameScore& fs : score.frame_scores)
    frames.push_back({{"t", fs.t}, {"j", fs.j}, {"both_empty", fs.both_empty}});
  return {{"episode_id", score.episode_id},
          {"view_id", score.view_id},
          {"task_id", score.task_id},
          {"j_video", score.j_video},
          {"frame_scores", frames}};
}

inline VideoScore video_score_from_json(const json& j, const std::string& what) {
  VideoScore score;
  for (const char* key : {"episode_id", "view_id", "task_id"})
    if (!j.contains(key) || !j.at(key).is_string())
      throw ConfigError(what + ": missing string field \"" + std::string(key) + "\"");
  score.episode_id = j.at("episode_id").get<std::string>();
  score.view_id = j.at("view_id").get<std::string>();
  score.task_id = j.at("task_id").get<std::string>();
  score.j_video = number_field(j, "j_video", what);
  if (!j.contains("frame_scores") || !j.at("frame_scores").is_array())
    throw ConfigError(what + ": missing \"frame_scores\"");
  for (const auto& f : j.at("frame_scores")) {
    FrameScore fs;
    fs.t = static_cast<int>(number_field(f, "t", what + ".frame_scores"));
    fs.j = number_field(f, "j", what + ".frame_scores");
    if (!f.contains("both_empty") || !f.at("both_empty").is_boolean())
      throw ConfigError(what + ".frame_scores: missing \"both_empty\"");
    fs.both_empty = f.at("both_empty").get<bool>();
    score.frame_scores.push_back(fs);
  }
  return score;
}

// JSON-lines dump, one VideoScore per line.
inline void save_scores_jsonl(const std::filesystem::path& path,
                              const std::vector<VideoScore>& scores) {
  std::string out;
  for (const VideoScore& s : scores) out += to_json(s).dump() + "\n";
  write_file(path, out);
}

inline std::vector<VideoScore> load_scores_jsonl(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<VideoScore> scores;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON line");
    scores.push_back(video_score_from_json(j, path.string() + ":" + std::to_string(line_no)));
  }
  return scores;
}

}  // namespace mtv
