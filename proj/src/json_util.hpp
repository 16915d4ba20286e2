// Copyright 2026 The Shopsense Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Internal JSON helpers shared by the report and config code.

#pragma once

#include <cmath>
#include <string>

#include "json.hpp"
#include "shopsense/error.hpp"

namespace shopsense::detail {

// Reports carry six decimals so reruns are byte-identical across platforms.
inline double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0 ? 0.0 : r;
}

// Reads `key` into `out` if present. Type mismatches become ConfigError.
template <typename T, typename Json>
void read_opt(const Json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

// Rejects keys outside `allowed`.
template <typename Json, typename Keys>
void reject_unknown(const Json& j, const Keys& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown config key " + where + "." + it.key());
  }
}

}  // namespace shopsense::detail
