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

#include "efpi/error.hpp"

namespace efpi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfRegime: return "out_of_regime";
    case ErrorCode::kNonTerminatingSeries: return "non_terminating_series";
    case ErrorCode::kQuadratureNonConvergence: return "quadrature_non_convergence";
    case ErrorCode::kSeriesTruncation: return "series_truncation";
    case ErrorCode::kLightlikeSegment: return "lightlike_segment";
    case ErrorCode::kWeightUndefined: return "weight_undefined";
    case ErrorCode::kFieldDomain: return "field_domain";
    case ErrorCode::kNanDetected: return "nan_detected";
    case ErrorCode::kNoiseTooLarge: return "noise_too_large";
    case ErrorCode::kTooFewExtrema: return "too_few_extrema";
    case ErrorCode::kNotOrthonormal: return "not_orthonormal";
    case ErrorCode::kPostcondition: return "postcondition_failed";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace efpi
