// Copyright 2026 The efpi-lab Authors
//
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
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace efpi::cli {

using Json = nlohmann::ordered_json;

/// Configuration problem attributable to one key (or to the command line as
/// a whole when `key` is empty).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ParamType { kInt, kDouble, kString };

struct ParamSpec {
  std::string key;
  ParamType type;
  Json default_value;
  std::string help;
  double min = 0.0;  // numeric bounds, inclusive unless `exclusive_min`
  double max = 0.0;
  bool exclusive_min = false;
  std::vector<std::string> choices;  // kString only
  bool power_of_two = false;         // kInt only
};

struct SubcommandSpec {
  std::string name;
  std::string help;
  std::vector<ParamSpec> params;
};

/// Every subcommand with its parameters and documented defaults.
const std::vector<SubcommandSpec>& schema();
const SubcommandSpec* find_subcommand(const std::string& name);

struct RunConfig {
  std::string subcommand;
  /// Resolved parameters in schema order.
  Json params;
  std::uint64_t seed = 0;
  std::string output_dir = "efpi-out";
  unsigned threads = 1;
};

/// Resolves defaults < config file < flags. `args` excludes the program
/// name. Throws ConfigError naming the key and its allowed range; throws
/// HelpRequested for --help.
RunConfig parse_and_validate(const std::vector<std::string>& args);

struct HelpRequested {
  std::string text;
};

/// Range- and type-checks one value against its spec; returns the canonical
/// JSON value.
Json validate_value(const ParamSpec& spec, const Json& value);

/// `config` namespace for the manifest: the resolved parameters plus seed,
/// shaped so it can be fed back through --config.
Json resolved_config(const RunConfig& cfg);

}  // namespace efpi::cli
