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

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "efpi/error.hpp"

// Natural units throughout: hbar = c = 1, charge e = 1. Energies and momenta
// are measured in the same unit as the mass; times and lengths in its inverse.

namespace efpi {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Principal square root of i, e^{i pi/4}.
inline const Complex kSqrtI = std::polar(1.0, kPi / 4.0);

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Particle mass together with its Compton time and length (both 1/mass).
class PhysicalScale {
 public:
  explicit PhysicalScale(double mass) : mass_(mass) {
    require(std::isfinite(mass) && mass > 0.0, ErrorCode::kInvalidArgument,
            "PhysicalScale: mass must be positive and finite, got " +
                std::to_string(mass));
  }

  double mass() const noexcept { return mass_; }
  double tau0() const noexcept { return 1.0 / mass_; }
  double compton_length() const noexcept { return 1.0 / mass_; }

 private:
  double mass_;
};

}  // namespace efpi
