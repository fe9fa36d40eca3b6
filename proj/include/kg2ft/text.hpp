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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by ingest, encode, qa and eval.
namespace kg2ft::text {

std::string_view trim(std::string_view s);

// Trims and collapses every run of whitespace into a single space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

std::vector<std::string> split(std::string_view s, char delimiter);

// Number of UTF-8 code points (continuation bytes are not counted).
std::size_t utf8_length(std::string_view s);

// Upper-cases the first character if it is an ASCII letter.
std::string sentence_case(std::string s);

// Appends '.' unless the text already ends in terminal punctuation.
std::string terminate_sentence(std::string s);

// "A", "A and B", "A, B and C".
std::string join_conjunction(std::span<const std::string> items);

// Substitutes `{name}` slots. Throws kg2ft::Error(kInvalidTemplate) on an
// unknown or unterminated slot.
std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& slots);

// Number of occurrences of `{name}` in tmpl.
std::size_t count_slot(std::string_view tmpl, std::string_view name);

// Lowercase, collapse whitespace, strip trailing punctuation.
std::string normalize_answer(std::string_view s);

// Normalized whitespace tokens with punctuation stripped from token edges.
std::vector<std::string> answer_tokens(std::string_view s);

bool has_control_chars(std::string_view s);

}  // namespace kg2ft::text
