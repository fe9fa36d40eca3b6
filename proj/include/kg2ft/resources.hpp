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

// Files under data/ compiled into the library (generated at configure time).
namespace kg2ft::resources {

std::string_view default_templates();
std::string_view rewrite_prompt();
std::string_view topic_prompt();
std::string_view paraphrase_prompt();

}  // namespace kg2ft::resources
