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

#include <stdexcept>
#include <string>
#include <string_view>

namespace efpi {

/// Machine-readable failure categories. The CLI serializes these verbatim.
enum class ErrorCode {
  kInvalidArgument,
  kOutOfRegime,
  kNonTerminatingSeries,
  kQuadratureNonConvergence,
  kSeriesTruncation,
  kLightlikeSegment,
  kWeightUndefined,
  kFieldDomain,
  kNanDetected,
  kNoiseTooLarge,
  kTooFewExtrema,
  kNotOrthonormal,
  kPostcondition,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

/// Literal-message form; builds no string unless the check fails.
inline void require(bool ok, ErrorCode code, const char* what) {
  if (!ok) fail(code, what);
}

}  // namespace efpi
