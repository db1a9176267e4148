// Copyright 2026 The Fidelity Forge Authors
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

#include "fidelity_forge/config.hpp"

#include <charconv>
#include <cmath>

#include "fidelity_forge/errors.hpp"

namespace ff {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_name(std::string_view name) {
  if (name.empty() || name.front() == '.' || name.back() == '.') return false;
  char previous = 0;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!ok || (c == '.' && previous == '.')) return false;
    previous = c;
  }
  return true;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && begin != end;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected) {
  throw Error(ErrorCode::InvalidConfig, "key '" + key + "' expects " + expected + ", got '" + std::string(value) + "'");
}

std::string canonical(const std::string& key, ValueKind kind, std::string_view value) {
  switch (kind) {
    case ValueKind::Integer: {
      long long v = 0;
      if (!parse_number(value, v)) bad_value(key, value, "an integer");
      return std::to_string(v);
    }
    case ValueKind::Unsigned: {
      std::uint64_t v = 0;
      if (!parse_number(value, v)) bad_value(key, value, "a non-negative integer");
      return std::to_string(v);
    }
    case ValueKind::Real: {
      double v = 0.0;
      if (!parse_number(value, v) || !std::isfinite(v)) bad_value(key, value, "a finite number");
      return format_real(v);
    }
    case ValueKind::Boolean:
      if (value == "true" || value == "1" || value == "yes") return "true";
      if (value == "false" || value == "0" || value == "no") return "false";
      bad_value(key, value, "true or false");
    case ValueKind::Text:
      if (value.empty()) bad_value(key, value, "a nonempty value");
      return std::string(value);
  }
  return std::string(value);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::OutOfRange, "cannot format number");
  return std::string(buf, ptr);
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!name.empty() && !valid_name(name)) fail("bad section name '" + std::string(name) + "'");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!valid_name(key)) fail("bad key '" + std::string(key) + "'");
    if (value.empty()) fail("missing value for '" + std::string(key) + "'");
    out.emplace_back(section.empty() ? std::string(key) : section + "." + std::string(key), std::string(value));
  }
  return out;
}

RunConfig::RunConfig(const std::vector<ConfigKey>& schema) {
  for (const auto& key : schema) {
    if (!valid_name(key.name)) throw Error(ErrorCode::InvalidConfig, "bad schema key '" + key.name + "'");
    if (!kinds_.emplace(key.name, key.kind).second) {
      throw Error(ErrorCode::InvalidConfig, "duplicate schema key '" + key.name + "'");
    }
    values_[key.name] = canonical(key.name, key.kind, key.default_value);
  }
}

void RunConfig::set(const std::string& key, std::string_view value) {
  const auto it = kinds_.find(key);
  if (it == kinds_.end()) throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
  values_[key] = canonical(key, it->second, trim(value));
}

void RunConfig::merge(std::string_view text, const std::string& origin) {
  std::vector<std::pair<std::string, std::string>> entries;
  try {
    entries = parse_key_values(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidConfig, origin + ": " + e.what());
  }
  for (const auto& [key, value] : entries) {
    try {
      set(key, value);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidConfig, origin + ": " + e.what());
    }
  }
}

const std::string& RunConfig::raw(const std::string& key, ValueKind kind) const {
  const auto it = kinds_.find(key);
  if (it == kinds_.end()) throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
  if (it->second != kind) throw Error(ErrorCode::InvalidConfig, "key '" + key + "' read with the wrong type");
  return values_.at(key);
}

long long RunConfig::integer(const std::string& key) const { return std::stoll(raw(key, ValueKind::Integer)); }

std::uint64_t RunConfig::unsigned_integer(const std::string& key) const {
  return std::stoull(raw(key, ValueKind::Unsigned));
}

double RunConfig::real(const std::string& key) const {
  double v = 0.0;
  parse_number(std::string_view(raw(key, ValueKind::Real)), v);
  return v;
}

bool RunConfig::boolean(const std::string& key) const { return raw(key, ValueKind::Boolean) == "true"; }

const std::string& RunConfig::text(const std::string& key) const { return raw(key, ValueKind::Text); }

std::string RunConfig::echo() const {
  std::string out;
  for (const auto& [key, value] : values_) out += "# " + key + " = " + value + "\n";
  return out;
}

}  // namespace ff
