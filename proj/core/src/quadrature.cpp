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

#include "quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <string>

namespace efpi::detail {
namespace {

constexpr unsigned kMaxDepth = 24;
constexpr int kMaxPanels = 20000;

}  // namespace

Integral integrate_finite(const ComplexIntegrand& f, double a, double b,
                          double rel_tol, std::string_view what) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  double error = 0.0;
  double l1 = 0.0;
  const Complex value = Rule::integrate(f, a, b, kMaxDepth, rel_tol, &error, &l1);
  if (!is_finite(value)) {
    fail(ErrorCode::kQuadratureNonConvergence,
         std::string(what) + ": non-finite quadrature result");
  }
  // Boost stops at max depth without signalling; check the estimate here.
  const double budget = 10.0 * rel_tol * l1 + 1e-300;
  if (error > budget) {
    fail(ErrorCode::kQuadratureNonConvergence,
         std::string(what) + ": error estimate " + std::to_string(error) +
             " exceeds budget " + std::to_string(budget));
  }
  return {value, l1};
}

Integral integrate_decaying_tail(const ComplexIntegrand& f, double panel,
                                 double min_extent, double rel_tol,
                                 double truncation, std::string_view what) {
  require(panel > 0.0 && std::isfinite(panel), ErrorCode::kInvalidArgument,
          std::string(what) + ": panel width must be positive");
  Complex sum{0.0, 0.0};
  double l1 = 0.0;
  int quiet_panels = 0;
  for (int k = 0; k < kMaxPanels; ++k) {
    const double lo = panel * k;
    const double hi = lo + panel;
    const Integral piece = integrate_finite(f, lo, hi, rel_tol, what);
    sum += piece.value;
    l1 += piece.l1;
    if (hi >= min_extent && piece.l1 <= truncation * l1) {
      // Two consecutive negligible panels guard against a zero crossing.
      if (++quiet_panels >= 2) return {sum, l1};
    } else {
      quiet_panels = 0;
    }
  }
  fail(ErrorCode::kQuadratureNonConvergence,
       std::string(what) + ": tail did not decay within the panel budget");
}

}  // namespace efpi::detail
