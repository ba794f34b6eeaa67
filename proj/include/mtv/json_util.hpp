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

#include <filesystem>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "mtv/errors.hpp"
#include "mtv/util.hpp"

namespace mtv {

using json = nlohmann::json;

inline json to_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const Eigen::Matrix3d& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
  return rows;
}

inline Eigen::Vector3d vector3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(what + ": expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": element " + std::to_string(i) + " is not a number");
    v(i) = j[i].get<double>();
  }
  return v;
}

inline Eigen::Matrix3d matrix3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(what + ": expected 3 rows");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.size() != 3)
      throw ConfigError(what + ": row " + std::to_string(r) + " must hold 3 numbers");
    for (int c = 0; c < 3; ++c) {
      if (!row[c].is_number())
        throw ConfigError(what + ": entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") is not a number");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

inline double number_field(const json& j, const std::string& key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing \"" + key + "\"");
  if (!j.at(key).is_number()) throw ConfigError(what + ": \"" + key + "\" is not a number");
  return j.at(key).get<double>();
}

inline json load_json(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("invalid JSON in " + path.string());
  return j;
}

// nlohmann::json keeps object keys sorted, so dumps are deterministic.
inline void save_json(const std::filesystem::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace mtv
