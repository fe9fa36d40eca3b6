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

#include <cstdint>
#include <string>
#include <string_view>

namespace kg2ft {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// Incremental SHA-256 for hashing large canonical byte streams.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view data);
  std::string hex_digest();

 private:
  void* ctx_;
};

// First 8 digest bytes of SHA-256(seed || 0x1f || key), big-endian.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key);

}  // namespace kg2ft
