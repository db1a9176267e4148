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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ff {

enum class ValueKind { Integer, Unsigned, Real, Boolean, Text };

struct ConfigKey {
  std::string name;  // dotted path, e.g. optimize.estimator.l
  ValueKind kind = ValueKind::Text;
  std::string default_value;
};

/// Flattens a nested key/value document. "[a.b]" headers prefix the keys of
/// the lines that follow, "key = value" assigns, '#' starts a comment.
/// Throws InvalidConfig naming the offending line.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Typed key/value store over a fixed schema. Unknown keys and unparsable
/// values are rejected; stored values are kept in canonical text form so the
/// echo is identical however a value was spelled.
class RunConfig {
 public:
  explicit RunConfig(const std::vector<ConfigKey>& schema);

  void set(const std::string& key, std::string_view value);
  /// Applies every assignment of a key/value document; `origin` names the
  /// source in error messages.
  void merge(std::string_view text, const std::string& origin);
  bool has(const std::string& key) const { return kinds_.count(key) != 0; }

  long long integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;

  /// "# key = value" lines in key order.
  std::string echo() const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  const std::string& raw(const std::string& key, ValueKind kind) const;

  std::map<std::string, ValueKind> kinds_;
  std::map<std::string, std::string> values_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

}  // namespace ff
