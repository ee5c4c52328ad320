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

#include "chainauth/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "chainauth/errors.hpp"

namespace chainauth {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string env_name(const std::string& role, const std::string& key) {
  std::string out = "CHAINAUTH_";
  for (char c : role + "_" + key) {
    if (c == '-' || c == '.') c = '_';
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

Config Config::load(const std::string& path, const std::string& role,
                    const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) fail(Err::ConfigError, "cannot open config file: " + path);

  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      fail(Err::ConfigError,
           path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (!allowed.count(key))
      fail(Err::ConfigError, path + ":" + std::to_string(lineno) +
                                 ": unknown key for role " + role + ": " + key);
    cfg.values_[key] = value;
  }
  cfg.apply_env(role, allowed);
  return cfg;
}

Config Config::from_env(const std::string& role,
                        const std::set<std::string>& allowed) {
  Config cfg;
  cfg.apply_env(role, allowed);
  return cfg;
}

void Config::apply_env(const std::string& role,
                       const std::set<std::string>& allowed) {
  for (const auto& key : allowed) {
    const char* v = std::getenv(env_name(role, key).c_str());
    if (v) values_[key] = v;
  }
}

bool Config::has(const std::string& key) const { return values_.count(key); }

std::string Config::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    fail(Err::ConfigError, "missing required config key: " + key);
  return it->second;
}

std::string Config::get(const std::string& key,
                        const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::int64_t Config::get_int(const std::string& key,
                             std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size())
      fail(Err::ConfigError, "trailing characters in integer: " + key);
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Err::ConfigError, "not an integer: " + key + "=" + it->second);
  }
}

}  // namespace chainauth
