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

#include "efpi/types.hpp"

/// Special functions and quadrature oracles for the short-time kernel.
///
/// The central object is the dimensionless kernel moment
///
///   M_n(e) = \int_0^\infty e^{2n+1/2} (1-(1-u)^2)^n u^{-1/2} e^{-ie+iue} du,
///
/// defined along the contour 0 -> 1 -> 1 + i\infty. It has the closed form
/// i^{1/2} e^{-ie} Gamma(2n+1/2) M(-n, 1/2-2n, 2ie), with M Kummer's function.
/// Both sides are implemented independently so each certifies the other.
namespace efpi::specfun {

inline constexpr int kMaxMomentOrder = 12;
inline constexpr double kEulerGamma = std::numbers::egamma;

/// Series order and dimensionless time e = eps / tau0 of one kernel moment.
struct MomentQuery {
  int n;
  double eps0;

  /// Validating constructor: 0 <= n <= 12, eps0 > 0 and finite.
  static MomentQuery make(int n, double eps0);
};

/// Gamma(k + 1/2) for k >= 0, by the recurrence from Gamma(1/2) = sqrt(pi).
double gamma_half_integer(int k);

/// Kummer's confluent hypergeometric function M(a, b, z).
///
/// Non-positive integer `a` gives the terminating polynomial (exactly -a + 1
/// terms). Otherwise the ascending series is summed and only |z| <= 50 is
/// accepted. `b` must not be a non-positive integer unless the polynomial
/// terminates before the corresponding pole.
Complex kummer_m(double a, double b, Complex z);

struct BesselSmall {
  double j1;      // eps0/2
  double y1;      // -2/(pi eps0) + eps0 (-1 + 2 gamma_E - 2 ln 2 + 2 ln eps0)/(2 pi)
  double j1_ref;  // ascending series summed to convergence
  double y1_ref;
};

/// Truncated small-argument J1/Y1 expansions with reference values.
/// Requires 0 < eps0 < 0.5.
BesselSmall bessel_j1_y1_small(double eps0);

/// Closed-form kernel moment i^{1/2} e^{-i e} Gamma(2n+1/2) M(-n, 1/2-2n, 2ie).
Complex kernel_moment_closed(MomentQuery q);

/// Kernel moment by quadrature: the real leg u = s^2 on [0, 1] plus the
/// rotated leg u = 1 + iw, w >= 0, where the integrand decays as e^{-w e}.
/// Throws kQuadratureNonConvergence if the refinement budget is exhausted.
Complex kernel_moment_contour(MomentQuery q);

}  // namespace efpi::specfun
