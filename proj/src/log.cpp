// Copyright 2026 The kg2ft Authors
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


#include "kg2ft/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "kg2ft/error.hpp"

namespace kg2ft::log {
namespace {

std::atomic<Level> g_level{Level::kInfo};
std::mutex g_mu;

std::string_view name_of(Level l) {
  switch (l) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
    case Level::kOff: return "off";
  }
  return "info";
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

Level parse_level(std::string_view name) {
  for (Level l : {Level::kDebug, Level::kInfo, Level::kWarn, Level::kError, Level::kOff}) {
    if (name == name_of(l)) return l;
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown log level '" + std::string(name) + "'");
}

void emit(Level level, std::string_view event, const nlohmann::json& fields) {
  if (level < g_level.load()) return;
  nlohmann::json rec{{"level", name_of(level)}, {"event", event}};
  for (auto it = fields.begin(); it != fields.end(); ++it) rec[it.key()] = it.value();
  std::string line = rec.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
  std::lock_guard lock(g_mu);
  std::cerr << line << '\n';
}

}  // namespace kg2ft::log
