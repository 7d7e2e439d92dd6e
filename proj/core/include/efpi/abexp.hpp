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
#include <vector>

#include "efpi/collapse.hpp"
#include "efpi/types.hpp"

/// Two-path Aharonov-Bohm setup under an alternating fluctuating field.
///
/// Each path is one level of a two-state collapse system: the left arm sees
/// kinetic momentum p + a0, the right arm p - a0, and the field B1 kicks the
/// two arms with opposite sign. Unresolved electrons reach the screen as a
/// two-slit superposition; collapsed ones as the single-slit envelope of the
/// surviving arm.
namespace efpi::abexp {

struct ABConfig {
  double flux = 0.0;      // enclosed flux, e = hbar = 1
  double b1_amp = 0.0;    // amplitude of the alternating field, as seen by the collapse engine
  double delta = 1.0;     // segment duration, units of tau0
  double tau_flight = 2000.0;
  double momentum = 1.093;  // canonical momentum p, units of mc
  double a0 = 0.343;        // vector potential on the arms
  double wavelength = 2.0 * kPi / 1.093;
  double d_slit = 20.0 * (2.0 * kPi / 1.093);
  double screen_distance = 1000.0 * (2.0 * kPi / 1.093);
  double slit_width = 2.0 * (2.0 * kPi / 1.093);
  int screen_points = 801;
  std::uint64_t n_electrons = 1000;
  std::uint64_t seed = 0;
  double threshold = 0.999;

  /// Checks ranges and tau_flight = 2 k delta for an integer k >= 1.
  void validate() const;
  /// Number of noise segments in one flight.
  std::uint64_t segments() const;
  /// lambda L / d
  double fringe_period() const;
};

/// Delta phi = -flux.
double ab_phase(double flux);

/// (-1)^n b1_amp with n = floor(t / delta), for 0 <= t < tau_flight.
double alternating_field(const ABConfig& cfg, double t);

/// Integral of alternating_field over [0, t] summed segment by segment.
double alternating_field_integral(const ABConfig& cfg, double t);

/// Left arm as level 0 (energy sqrt(1 + (p + a0)^2), coupling +1), right
/// arm as level 1 (energy sqrt(1 + (p - a0)^2), coupling -1).
collapse::TwoStateSystem make_ab_system(const ABConfig& cfg);

struct ScreenPattern {
  std::vector<double> positions;
  std::vector<double> intensity;
  double visibility = 0.0;
  /// True when the central window had fewer than 3 extrema and visibility
  /// was set to 0 by convention.
  bool envelope_only = false;
  double fringe_period = 0.0;
  double collapsed_fraction = 0.0;
  std::uint64_t left_count = 0;
  std::uint64_t right_count = 0;
  std::uint64_t unresolved_count = 0;
};

enum class ScreenSource { kBothPaths, kLeftOnly, kRightOnly };

/// Small-angle screen intensity for one source at screen position x.
double screen_intensity(const ABConfig& cfg, ScreenSource source, double x);

/// (I_max - I_min) / (I_max + I_min) over |x| <= 2 fringe_period. Throws
/// kTooFewExtrema when the window holds fewer than 3 local extrema.
double fringe_visibility(const ScreenPattern& p);

/// Runs one collapse trajectory per electron over tau_flight / delta
/// alternating segments from (1/sqrt 2, 1/sqrt 2); the sign of the first
/// segment is drawn from the electron's seed. Results do not depend on
/// `threads`.
ScreenPattern simulate_ab(const ABConfig& cfg, const collapse::TwoStateSystem& sys,
                          unsigned threads = 1);
ScreenPattern simulate_ab(const ABConfig& cfg, unsigned threads = 1);

}  // namespace efpi::abexp
