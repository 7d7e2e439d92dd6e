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

#include "efpi/abexp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "efpi/rng.hpp"

namespace efpi::abexp {
namespace {

double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

}  // namespace

void ABConfig::validate() const {
  const auto positive = [](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, ErrorCode::kInvalidArgument,
            std::string("ABConfig: ") + name + " must be > 0");
  };
  require(std::isfinite(flux), ErrorCode::kInvalidArgument, "ABConfig: flux must be finite");
  require(std::isfinite(b1_amp) && b1_amp >= 0.0, ErrorCode::kInvalidArgument,
          "ABConfig: b1_amp must be >= 0");
  positive(delta, "delta");
  positive(tau_flight, "tau_flight");
  positive(wavelength, "wavelength");
  positive(d_slit, "d_slit");
  positive(screen_distance, "screen_distance");
  positive(slit_width, "slit_width");
  require(std::isfinite(momentum) && std::isfinite(a0), ErrorCode::kInvalidArgument,
          "ABConfig: momentum and a0 must be finite");
  require(screen_points >= 64, ErrorCode::kInvalidArgument,
          "ABConfig: screen_points must be >= 64");
  require(n_electrons >= 1, ErrorCode::kInvalidArgument, "ABConfig: n_electrons must be >= 1");
  require(threshold > 0.5 && threshold < 1.0, ErrorCode::kInvalidArgument,
          "ABConfig: threshold must lie in (0.5, 1)");
  const double half_periods = tau_flight / (2.0 * delta);
  const double k = std::round(half_periods);
  require(k >= 1.0 && std::abs(half_periods - k) <= 1e-9 * k, ErrorCode::kInvalidArgument,
          "ABConfig: tau_flight must equal 2 k delta for an integer k >= 1");
}

std::uint64_t ABConfig::segments() const {
  return 2 * static_cast<std::uint64_t>(std::llround(tau_flight / (2.0 * delta)));
}

double ABConfig::fringe_period() const { return wavelength * screen_distance / d_slit; }

double ab_phase(double flux) { return -flux; }

double alternating_field(const ABConfig& cfg, double t) {
  require(t >= 0.0 && t < cfg.tau_flight, ErrorCode::kInvalidArgument,
          "alternating_field: t must lie in [0, tau_flight)");
  const auto n = static_cast<std::uint64_t>(std::floor(t / cfg.delta));
  return n % 2 == 0 ? cfg.b1_amp : -cfg.b1_amp;
}

double alternating_field_integral(const ABConfig& cfg, double t) {
  require(t >= 0.0 && t <= cfg.tau_flight, ErrorCode::kInvalidArgument,
          "alternating_field_integral: t must lie in [0, tau_flight]");
  const auto full = static_cast<std::uint64_t>(std::floor(t / cfg.delta));
  double acc = 0.0;
  for (std::uint64_t n = 0; n < full; ++n) {
    acc += (n % 2 == 0 ? cfg.b1_amp : -cfg.b1_amp) * cfg.delta;
  }
  const double rest = t - static_cast<double>(full) * cfg.delta;
  if (rest > 0.0) acc += (full % 2 == 0 ? cfg.b1_amp : -cfg.b1_amp) * rest;
  return acc;
}

collapse::TwoStateSystem make_ab_system(const ABConfig& cfg) {
  const double e_left = std::hypot(1.0, cfg.momentum + cfg.a0);
  const double e_right = std::hypot(1.0, cfg.momentum - cfg.a0);
  return collapse::TwoStateSystem::make(e_left, e_right, 1, -1);
}

double screen_intensity(const ABConfig& cfg, ScreenSource source, double x) {
  const double ll = cfg.wavelength * cfg.screen_distance;
  const double half_d = 0.5 * cfg.d_slit;
  const double env_l = sinc(kPi * cfg.slit_width * (x + half_d) / ll);
  const double env_r = sinc(kPi * cfg.slit_width * (x - half_d) / ll);
  switch (source) {
    case ScreenSource::kLeftOnly:
      return env_l * env_l;
    case ScreenSource::kRightOnly:
      return env_r * env_r;
    case ScreenSource::kBothPaths:
      break;
  }
  const double phase = kPi * cfg.d_slit * x / ll;
  const Complex left = env_l * std::polar(1.0, phase + ab_phase(cfg.flux));
  const Complex right = env_r * std::polar(1.0, -phase);
  return 0.5 * std::norm(left + right);
}

double fringe_visibility(const ScreenPattern& p) {
  require(p.positions.size() == p.intensity.size() && p.positions.size() >= 3,
          ErrorCode::kInvalidArgument, "fringe_visibility: malformed pattern");
  require(p.fringe_period > 0.0, ErrorCode::kInvalidArgument,
          "fringe_visibility: fringe_period must be > 0");
  const double half_window = 2.0 * p.fringe_period;
  std::vector<double> window;
  for (std::size_t j = 0; j < p.positions.size(); ++j) {
    if (std::abs(p.positions[j]) <= half_window) window.push_back(p.intensity[j]);
  }
  std::size_t extrema = 0;
  for (std::size_t j = 1; j + 1 < window.size(); ++j) {
    const double l = window[j - 1], c = window[j], r = window[j + 1];
    if ((c > l && c >= r) || (c < l && c <= r)) ++extrema;
  }
  require(extrema >= 3, ErrorCode::kTooFewExtrema,
          "fringe_visibility: " + std::to_string(extrema) +
              " extrema in the central window, pattern is envelope-only");
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  return (*hi - *lo) / (*hi + *lo);
}

ScreenPattern simulate_ab(const ABConfig& cfg, const collapse::TwoStateSystem& sys,
                          unsigned threads) {
  cfg.validate();
  const std::uint64_t steps = cfg.segments();
  const auto init = collapse::TwoStateAmplitudes::make(std::sqrt(0.5), std::sqrt(0.5));
  collapse::TrajectoryOptions opts;
  opts.max_steps = steps;
  opts.threshold = cfg.threshold;

  std::vector<int> outcome(cfg.n_electrons, -1);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::uint64_t k = next++; k < cfg.n_electrons; k = next++) {
      try {
        collapse::NoiseProcess np;
        np.delta = cfg.delta;
        np.sigma = cfg.b1_amp;
        np.mode = collapse::NoiseMode::kAlternating;
        np.seed = cfg.seed + k;
        np.parity = static_cast<int>(CounterRng(np.seed).split(1).next_u64() >> 63);
        const auto t = collapse::run_trajectory(init, sys, np, opts);
        if (t.outcome) outcome[k] = *t.outcome;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = cfg.n_electrons;
      }
    }
  };
  {
    const unsigned n_threads = std::max(
        1u, std::min<unsigned>(threads, static_cast<unsigned>(
                                            std::min<std::uint64_t>(cfg.n_electrons, 1024))));
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  ScreenPattern pat;
  pat.fringe_period = cfg.fringe_period();
  for (int o : outcome) {
    if (o == 0) ++pat.left_count;
    else if (o == 1) ++pat.right_count;
    else ++pat.unresolved_count;
  }
  const double n = static_cast<double>(cfg.n_electrons);
  pat.collapsed_fraction = static_cast<double>(pat.left_count + pat.right_count) / n;

  const double w_both = static_cast<double>(pat.unresolved_count) / n;
  const double w_left = static_cast<double>(pat.left_count) / n;
  const double w_right = static_cast<double>(pat.right_count) / n;
  const double half_span = 4.0 * pat.fringe_period;
  const int np = cfg.screen_points;
  pat.positions.resize(np);
  pat.intensity.resize(np);
  for (int j = 0; j < np; ++j) {
    const double x = -half_span + 2.0 * half_span * j / (np - 1);
    pat.positions[j] = x;
    pat.intensity[j] = w_both * screen_intensity(cfg, ScreenSource::kBothPaths, x) +
                       w_left * screen_intensity(cfg, ScreenSource::kLeftOnly, x) +
                       w_right * screen_intensity(cfg, ScreenSource::kRightOnly, x);
  }
  try {
    pat.visibility = fringe_visibility(pat);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTooFewExtrema) throw;
    pat.visibility = 0.0;
    pat.envelope_only = true;
  }
  return pat;
}

ScreenPattern simulate_ab(const ABConfig& cfg, unsigned threads) {
  return simulate_ab(cfg, make_ab_system(cfg), threads);
}

}  // namespace efpi::abexp
