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

#include "efpi/specfun.hpp"

#include <cmath>
#include <string>

#include "quadrature.hpp"

namespace efpi::specfun {
namespace {

constexpr double kSeriesGuard = 50.0;
constexpr int kMaxSeriesTerms = 4000;
constexpr double kQuadTol = 1e-13;

bool is_non_positive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

}  // namespace

MomentQuery MomentQuery::make(int n, double eps0) {
  require(n >= 0 && n <= kMaxMomentOrder, ErrorCode::kInvalidArgument,
          "MomentQuery: n must lie in [0, 12], got " + std::to_string(n));
  require(std::isfinite(eps0) && eps0 > 0.0, ErrorCode::kInvalidArgument,
          "MomentQuery: eps0 must be positive, got " + std::to_string(eps0));
  return MomentQuery{n, eps0};
}

double gamma_half_integer(int k) {
  require(k >= 0, ErrorCode::kInvalidArgument,
          "gamma_half_integer: k must be non-negative");
  double g = std::sqrt(kPi);
  for (int j = 1; j <= k; ++j) g *= (j - 0.5);
  return g;
}

Complex kummer_m(double a, double b, Complex z) {
  require(std::isfinite(a) && std::isfinite(b) && is_finite(z),
          ErrorCode::kInvalidArgument, "kummer_m: non-finite argument");

  if (is_non_positive_integer(a)) {
    const int n = static_cast<int>(-a);
    for (int j = 0; j < n; ++j) {
      require(b + j != 0.0, ErrorCode::kInvalidArgument,
              "kummer_m: b hits a pole before the polynomial terminates");
    }
    Complex term{1.0, 0.0};
    Complex sum = term;
    for (int k = 0; k < n; ++k) {
      term *= (a + k) / (b + k) / (k + 1.0) * z;
      sum += term;
    }
    return sum;
  }

  require(!is_non_positive_integer(b), ErrorCode::kInvalidArgument,
          "kummer_m: b is a non-positive integer and the series does not terminate");
  require(std::abs(z) <= kSeriesGuard, ErrorCode::kNonTerminatingSeries,
          "kummer_m: |z| exceeds the convergence guard 50 for a non-terminating series");
  Complex term{1.0, 0.0};
  Complex sum = term;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    term *= (a + k) / (b + k) / (k + 1.0) * z;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > std::abs(z)) return sum;
  }
  fail(ErrorCode::kNonTerminatingSeries, "kummer_m: series did not converge");
}

BesselSmall bessel_j1_y1_small(double eps0) {
  require(std::isfinite(eps0) && eps0 > 0.0 && eps0 < 0.5, ErrorCode::kOutOfRegime,
          "bessel_j1_y1_small: eps0 must lie in (0, 0.5), got " + std::to_string(eps0));
  BesselSmall out{};
  out.j1 = eps0 / 2.0;
  out.y1 = -2.0 / (kPi * eps0) +
           eps0 * (-1.0 + 2.0 * kEulerGamma - 2.0 * std::log(2.0) + 2.0 * std::log(eps0)) /
               (2.0 * kPi);

  // A&S 9.1.10 / 9.1.11 with n = 1; psi(k+1) = -gamma_E + H_k.
  const double half = eps0 / 2.0;
  double term = half;  // (x/2)^{2k+1} / (k! (k+1)!)
  double harmonic = 0.0;
  double j1 = 0.0;
  double digamma_sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double psi_k1 = -kEulerGamma + harmonic;
    const double psi_k2 = psi_k1 + 1.0 / (k + 1.0);
    j1 += sign * term;
    digamma_sum += sign * (psi_k1 + psi_k2) * term;
    harmonic += 1.0 / (k + 1.0);
    term *= half * half / ((k + 1.0) * (k + 2.0));
    if (term < 1e-19 * std::abs(j1)) break;
  }
  out.j1_ref = j1;
  out.y1_ref = (2.0 / kPi) * std::log(half) * j1 - 2.0 / (kPi * eps0) - digamma_sum / kPi;
  return out;
}

Complex kernel_moment_closed(MomentQuery q) {
  q = MomentQuery::make(q.n, q.eps0);
  return kSqrtI * std::polar(1.0, -q.eps0) * gamma_half_integer(2 * q.n) *
         kummer_m(-q.n, 0.5 - 2.0 * q.n, Complex{0.0, 2.0 * q.eps0});
}

Complex kernel_moment_contour(MomentQuery q) {
  q = MomentQuery::make(q.n, q.eps0);
  const int n = q.n;
  const double e = q.eps0;

  // u = s^2 on the real leg removes the u^{-1/2} endpoint singularity.
  const auto real_leg = [n, e](double s) -> Complex {
    const double s2 = s * s;
    return 2.0 * std::pow(s2 * (2.0 - s2), n) * std::polar(1.0, -e * (1.0 - s2));
  };
  // u = 1 + iw: u(2-u) = 1 + w^2 and e^{-ie+iue} = e^{-we}.
  const auto rotated_leg = [n, e](double w) -> Complex {
    return kI * std::pow(1.0 + w * w, n) / std::sqrt(Complex{1.0, w}) * std::exp(-w * e);
  };

  const auto on_axis =
      detail::integrate_finite(real_leg, 0.0, 1.0, kQuadTol, "kernel_moment_contour(real leg)");
  const auto tail = detail::integrate_decaying_tail(
      rotated_leg, 2.0 / e, (2.0 * n + 2.0) / e, kQuadTol, 1e-16,
      "kernel_moment_contour(rotated leg)");
  return std::pow(e, 2.0 * n + 0.5) * (on_axis.value + tail.value);
}

}  // namespace efpi::specfun
