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

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace chainauth {

// Flat key=value configuration with environment overrides. Lines are
// `key = value`; '#' starts a comment; blank lines are ignored. A key not in
// `allowed` is a ConfigError. After the file is read, environment variables
// named CHAINAUTH_<ROLE>_<KEY> (role and key uppercased, '-' and '.' mapped
// to '_') override file values.
class Config {
 public:
  static Config load(const std::string& path, const std::string& role,
                     const std::set<std::string>& allowed);

  // Environment-only configuration (no file).
  static Config from_env(const std::string& role,
                         const std::set<std::string>& allowed);

  bool has(const std::string& key) const;
  std::string require(const std::string& key) const;  // throws ConfigError
  std::string get(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;

 private:
  void apply_env(const std::string& role, const std::set<std::string>& allowed);

  std::map<std::string, std::string> values_;
};

}  // namespace chainauth
