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

#include <string>
#include <vector>

namespace kg2ft::cli {

// Entry point behind the kg2ft binary. Returns 0 on success, 2 on usage
// errors (usage text on stderr) and 1 on runtime errors (one JSON error
// record on stderr).
int run(int argc, const char* const* argv);
// argv[0] is supplied.
int run(const std::vector<std::string>& args);

}  // namespace kg2ft::cli
