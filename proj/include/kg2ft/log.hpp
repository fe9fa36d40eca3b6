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


#pragma once

#include <string_view>

#include "json.hpp"

// Structured logs: one JSON object per line on standard error.
namespace kg2ft::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

void set_level(Level level);
Level level();
// Throws InvalidConfig on an unknown name.
Level parse_level(std::string_view name);

// {"level":..,"event":..,<fields>}. Thread-safe; lines never interleave.
void emit(Level level, std::string_view event, const nlohmann::json& fields = nlohmann::json::object());

inline void info(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::kInfo, event, fields);
}
inline void warn(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::kWarn, event, fields);
}
inline void debug(std::string_view event, const nlohmann::json& fields = nlohmann::json::object()) {
  emit(Level::kDebug, event, fields);
}

}  // namespace kg2ft::log
