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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "efpi_cli/config.hpp"

namespace efpi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModuleError = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPostcondition = 3;

/// Artifact version recorded in every manifest.
std::string_view version();

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Scientific notation with 17 significant digits.
std::string format_real(double v);

struct OutputRecord {
  std::string file;  // relative to the output directory
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct Postcondition {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunManifest {
  /// Contents of manifest.json.
  Json json;
  std::vector<OutputRecord> outputs;
  std::vector<Postcondition> postconditions;
  /// kExitOk iff every postcondition held.
  int exit_code = kExitOk;
};

/// Runs the subcommand, writes its data files and manifest.json into
/// cfg.output_dir and returns the manifest. Module errors propagate as
/// efpi::Error.
RunManifest execute(const RunConfig& cfg);

/// Full command-line entry point. Writes error.json into the output directory
/// on module errors and a JSON error object to `err` on configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace efpi::cli
