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

#include <functional>
#include <string_view>

#include "efpi/types.hpp"

namespace efpi::detail {

using ComplexIntegrand = std::function<Complex(double)>;

struct Integral {
  Complex value;
  double l1;  // integral of |f|, the scale the tolerance is measured against
};

/// Adaptive Gauss-Kronrod (31-point) on [a, b]. Throws
/// kQuadratureNonConvergence when the estimated error stays above
/// rel_tol * L1 after max_depth bisections.
Integral integrate_finite(const ComplexIntegrand& f, double a, double b,
                          double rel_tol, std::string_view what);

/// Integral over [0, inf) for an integrand with exponential decay, summed in
/// panels of width `panel`. Summation stops once past `min_extent` and a panel
/// contributes less than `truncation` of the accumulated L1 mass.
Integral integrate_decaying_tail(const ComplexIntegrand& f, double panel,
                                 double min_extent, double rel_tol,
                                 double truncation, std::string_view what);

}  // namespace efpi::detail
