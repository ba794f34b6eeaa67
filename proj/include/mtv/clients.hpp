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

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

// Eigen must be parsed before httplib: httplib drags in <resolv.h>, whose
// _res macro mangles Eigen sources that are still unparsed at that point.
#include "mtv/json_util.hpp"

#include <httplib.h>

#include "mtv/errors.hpp"
#include "mtv/frame.hpp"
#include "mtv/image_io.hpp"
#include "mtv/mask.hpp"
#include "mtv/util.hpp"

namespace mtv {

// Narrow boundary to the external VLM (object descriptions) and RVOS
// (referring segmentation) models. Real backends are HTTP; mocks replay
// content-hash-keyed fixtures so the pipeline tests run byte-stable with no
// inference service.
class DescriptionClient {
 public:
  virtual ~DescriptionClient() = default;
  virtual std::vector<ObjectDescription> describe(const Frame& image) = 0;
};

class SegmentationClient {
 public:
  virtual ~SegmentationClient() = default;
  // One mask per input frame; a per-frame failure yields an empty mask for
  // that frame plus an entry in `warnings`.
  virtual MaskSequence segment(const std::vector<Frame>& frames, const ObjectDescription& desc,
                               std::vector<std::string>* warnings) = 0;
};

inline std::vector<ObjectDescription> describe_objects(DescriptionClient& client,
                                                       const Frame& image) {
  std::vector<ObjectDescription> out = client.describe(image);
  if (out.empty()) throw NoObjectsFound("description client returned no objects");
  return out;
}

inline MaskSequence segment_video(SegmentationClient& client, const std::vector<Frame>& frames,
                                  const ObjectDescription& desc,
                                  std::vector<std::string>* warnings = nullptr) {
  if (frames.empty()) throw InvalidParameter("segment_video: no frames");
  MaskSequence masks = client.segment(frames, desc, warnings);
  if (masks.size() != frames.size())
    throw LengthMismatch("segment_video: client returned " + std::to_string(masks.size()) +
                         " masks for " + std::to_string(frames.size()) + " frames");
  return masks;
}

inline std::string frame_content_hash(const Frame& image) {
  ContentHash h;
  h.feed_u32(static_cast<std::uint32_t>(image.width));
  h.feed_u32(static_cast<std::uint32_t>(image.height));
  h.feed(std::string_view(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size()));
  return h.hex();
}

inline std::string video_query_hash(const std::vector<Frame>& frames, const std::string& query) {
  ContentHash h;
  h.feed_u32(static_cast<std::uint32_t>(frames.size()));
  for (const Frame& f : frames) {
    h.feed_u32(static_cast<std::uint32_t>(f.width));
    h.feed_u32(static_cast<std::uint32_t>(f.height));
    h.feed(std::string_view(reinterpret_cast<const char*>(f.rgb.data()), f.rgb.size()));
  }
  h.feed(query);
  return h.hex();
}

// Fixture tree: <root>/descriptions/<image-hash>.json holding
// {"descriptions": [...]}, and <root>/segmentations/<video+query-hash>/
// holding frame_%05d.png mask files.
class MockDescriptionClient : public DescriptionClient {
 public:
  explicit MockDescriptionClient(std::filesystem::path root) : root_(std::move(root)) {}

  std::vector<ObjectDescription> describe(const Frame& image) override {
    const std::filesystem::path path =
        root_ / "descriptions" / (frame_content_hash(image) + ".json");
    if (!std::filesystem::exists(path))
      throw NoObjectsFound("no description fixture for image hash " + frame_content_hash(image));
    const json j = load_json(path);
    if (!j.contains("descriptions") || !j.at("descriptions").is_array())
      throw ConfigError(path.string() + ": expected {\"descriptions\": [...]}");
    std::vector<ObjectDescription> out;
    std::size_t idx = 0;
    for (const auto& d : j.at("descriptions")) {
      if (!d.is_string()) throw ConfigError(path.string() + ": descriptions must be strings");
      out.push_back(ObjectDescription{d.get<std::string>(), "obj_" + std::to_string(idx++)});
    }
    return out;
  }

  static void add_fixture(const std::filesystem::path& root, const Frame& image,
                          const std::vector<std::string>& descriptions) {
    save_json(root / "descriptions" / (frame_content_hash(image) + ".json"),
              json{{"descriptions", descriptions}});
  }

 private:
  std::filesystem::path root_;
};

class MockSegmentationClient : public SegmentationClient {
 public:
  explicit MockSegmentationClient(std::filesystem::path root) : root_(std::move(root)) {}

  MaskSequence segment(const std::vector<Frame>& frames, const ObjectDescription& desc,
                       std::vector<std::string>* warnings) override {
    const std::filesystem::path dir =
        root_ / "segmentations" / video_query_hash(frames, desc.text);
    if (!std::filesystem::exists(dir))
      throw RemoteError("no segmentation fixture for query \"" + desc.text + "\"");
    MaskSequence masks;
    masks.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%05zu.png", t);
      const std::filesystem::path p = dir / name;
      if (std::filesystem::exists(p)) {
        masks.push_back(load_mask_png(p));
      } else {
        if (warnings)
          warnings->push_back("frame " + std::to_string(t) + ": fixture missing, empty mask");
        masks.push_back(Mask::zeros(frames[t].width, frames[t].height));
      }
    }
    return masks;
  }

  static void add_fixture(const std::filesystem::path& root, const std::vector<Frame>& frames,
                          const std::string& query, const MaskSequence& masks) {
    const std::filesystem::path dir = root / "segmentations" / video_query_hash(frames, query);
    std::filesystem::create_directories(dir);
    for (std::size_t t = 0; t < masks.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "frame_%05zu.png", t);
      save_mask_png(dir / name, masks[t]);
    }
  }

 private:
  std::filesystem::path root_;
};

// Blocking retries with exponential backoff; defaults per the module
// contract (3 attempts starting at 1s). Tests shrink the backoff.
struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_factor = 2.0;
};

struct HttpEndpoint {
  std::string url;
  std::string api_token;
  RetryPolicy retry;
  std::chrono::seconds timeout{30};
};

namespace detail {

struct ParsedUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // leading slash, "/" when absent
};

inline ParsedUrl parse_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint URL \"" + url + "\" must start with http:// or https://");
  const std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return ParsedUrl{url, "/"};
  return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

// POSTs `body` as JSON, retrying transport failures and 5xx/429 responses.
inline json post_json_with_retry(const HttpEndpoint& endpoint, const json& body) {
  const ParsedUrl url = parse_url(endpoint.url);
  httplib::Client client(url.base);
  client.set_connection_timeout(endpoint.timeout);
  client.set_read_timeout(endpoint.timeout);
  httplib::Headers headers;
  if (!endpoint.api_token.empty())
    headers.emplace("Authorization", "Bearer " + endpoint.api_token);
  std::string last_failure = "no attempt made";
  std::chrono::milliseconds delay = endpoint.retry.initial_backoff;
  for (int attempt = 1; attempt <= endpoint.retry.attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(delay.count() * endpoint.retry.backoff_factor));
    }
    httplib::Result res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
      last_failure = "transport error (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 200) {
      json parsed = json::parse(res->body, nullptr, false);
      if (parsed.is_discarded())
        throw RemoteError(endpoint.url + ": response is not valid JSON", attempt);
      return parsed;
    }
    last_failure = "HTTP status " + std::to_string(res->status);
    if (res->status < 500 && res->status != 429)
      throw RemoteError(endpoint.url + ": " + last_failure, attempt);
  }
  throw RemoteError(endpoint.url + ": " + last_failure + " after " +
                        std::to_string(endpoint.retry.attempts) + " attempts",
                    endpoint.retry.attempts);
}

}  // namespace detail

// Wire protocol: {"image": base64 PNG} -> {"descriptions": ["..."]}.
class HttpDescriptionClient : public DescriptionClient {
 public:
  explicit HttpDescriptionClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  std::vector<ObjectDescription> describe(const Frame& image) override {
    const json response =
        detail::post_json_with_retry(endpoint_, json{{"image", base64_encode(encode_frame_png(image))}});
    if (!response.contains("descriptions") || !response.at("descriptions").is_array())
      throw RemoteError(endpoint_.url + ": response missing \"descriptions\"");
    std::vector<ObjectDescription> out;
    std::size_t idx = 0;
    for (const auto& d : response.at("descriptions")) {
      if (!d.is_string()) throw RemoteError(endpoint_.url + ": descriptions must be strings");
      out.push_back(ObjectDescription{d.get<std::string>(), "obj_" + std::to_string(idx++)});
    }
    return out;
  }

 private:
  HttpEndpoint endpoint_;
};

// Wire protocol: {"frames": [base64 PNG...], "query": "..."} ->
// {"masks": [base64 PNG...]}.
class HttpSegmentationClient : public SegmentationClient {
 public:
  explicit HttpSegmentationClient(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  MaskSequence segment(const std::vector<Frame>& frames, const ObjectDescription& desc,
                       std::vector<std::string>* warnings) override {
    json frames_json = json::array();
    for (const Frame& f : frames) frames_json.push_back(base64_encode(encode_frame_png(f)));
    const json response = detail::post_json_with_retry(
        endpoint_, json{{"frames", frames_json}, {"query", desc.text}});
    if (!response.contains("masks") || !response.at("masks").is_array() ||
        response.at("masks").size() != frames.size())
      throw RemoteError(endpoint_.url + ": response must carry one mask per frame");
    MaskSequence masks;
    masks.reserve(frames.size());
    for (std::size_t t = 0; t < frames.size(); ++t) {
      try {
        const json& entry = response.at("masks")[t];
        if (!entry.is_string()) throw IoError("mask entry is not a string");
        masks.push_back(decode_mask_png(base64_decode(entry.get<std::string>())));
      } catch (const Error& e) {
        if (warnings)
          warnings->push_back("frame " + std::to_string(t) + ": undecodable mask (" + e.what() +
                              "), empty mask substituted");
        masks.push_back(Mask::zeros(frames[t].width, frames[t].height));
      }
    }
    return masks;
  }

 private:
  HttpEndpoint endpoint_;
};

inline std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v == nullptr ? fallback : std::string(v);
}

}  // namespace mtv
