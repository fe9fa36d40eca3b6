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

#include "kg2ft/text.hpp"

#include <cctype>

#include "kg2ft/error.hpp"

namespace kg2ft::text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_terminal_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
         c == '?';
}

bool is_edge_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(std::string_view s, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string sentence_case(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string terminate_sentence(std::string s) {
  if (s.empty()) return s;
  char last = s.back();
  if (last != '.' && last != '!' && last != '?') s.push_back('.');
  return s;
}

std::string join_conjunction(std::span<const std::string> items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    char c = tmpl[i];
    if (c != '{') {
      out.push_back(c);
      ++i;
      continue;
    }
    std::size_t close = tmpl.find('}', i);
    if (close == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidTemplate,
                  "unterminated slot in '" + std::string(tmpl) + "'");
    }
    std::string name(tmpl.substr(i + 1, close - i - 1));
    auto it = slots.find(name);
    if (it == slots.end()) {
      throw Error(ErrorCode::kInvalidTemplate,
                  "unknown slot {" + name + "} in '" + std::string(tmpl) + "'");
    }
    out += it->second;
    i = close + 1;
  }
  return out;
}

std::size_t count_slot(std::string_view tmpl, std::string_view name) {
  std::string needle = "{" + std::string(name) + "}";
  std::size_t n = 0;
  for (std::size_t pos = tmpl.find(needle); pos != std::string_view::npos;
       pos = tmpl.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string normalize_answer(std::string_view s) {
  std::string out = to_lower(collapse_whitespace(s));
  // One loop so "a ?" and "a? ." both reduce to "a"; keeps this idempotent.
  while (!out.empty() && (is_terminal_punct(out.back()) || is_space(out.back()))) out.pop_back();
  return out;
}

std::vector<std::string> answer_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  for (const std::string& raw : split(to_lower(collapse_whitespace(s)), ' ')) {
    std::size_t b = 0;
    std::size_t e = raw.size();
    while (b < e && is_edge_punct(raw[b])) ++b;
    while (e > b && is_edge_punct(raw[e - 1])) --e;
    if (e > b) tokens.push_back(raw.substr(b, e - b));
  }
  return tokens;
}

bool has_control_chars(std::string_view s) {
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || u == 0x7F) return true;
  }
  return false;
}

}  // namespace kg2ft::text
