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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efpi/evolution.hpp"
#include "efpi/rng.hpp"
#include "efpi/types.hpp"

/// Two-level stochastic collapse driven by piecewise-constant potential noise.
///
/// Energies are in units of mc^2 and momenta in units of mc. One engine step
/// is: kick each level by its own N_m, mix with the lambda matrix built from
/// the pre-kick amplitudes, renormalize.
namespace efpi::collapse {

/// Amplitudes below this are treated as zero; the state is then definite.
inline constexpr double kAmplitudeFloor = 1e-9;

class TwoStateSystem {
 public:
  /// e0, e1 >= 1. The coupling signs multiply the noise seen by each level
  /// (+1 for both in the plain two-state model, opposite signs for the
  /// two-path setting).
  static TwoStateSystem make(double e0, double e1, int coupling0 = 1, int coupling1 = 1);

  double energy(int level) const noexcept { return e_[level]; }
  /// p_n = sqrt(e_n^2 - 1)
  double momentum(int level) const noexcept { return p_[level]; }
  int coupling(int level) const noexcept { return coupling_[level]; }
  /// R1/R0 = (e1/e0) sqrt((1 + e0)/(1 + e1))
  double r_ratio() const noexcept { return r_ratio_; }
  /// p_n (2 + e_n) / (2 e_n^2 (1 + e_n)), the kick per unit noise amplitude.
  double kick_gain(int level) const noexcept;

 private:
  TwoStateSystem() = default;

  std::array<double, 2> e_{};
  std::array<double, 2> p_{};
  std::array<int, 2> coupling_{};
  double r_ratio_ = 1.0;
};

class TwoStateAmplitudes {
 public:
  /// Requires a0, a1 in [0, 1] with a0^2 + a1^2 = 1 within 1e-12.
  static TwoStateAmplitudes make(double a0, double a1);
  /// (sqrt(p0), sqrt(1 - p0)) for a probability p0 in [0, 1].
  static TwoStateAmplitudes from_probability(double p0);

  double a0() const noexcept { return a_[0]; }
  double a1() const noexcept { return a_[1]; }
  double operator[](int level) const noexcept { return a_[level]; }
  double probability(int level) const noexcept { return a_[level] * a_[level]; }
  /// Index of the larger probability (0 on ties).
  int dominant() const noexcept { return a_[1] > a_[0] ? 1 : 0; }

 private:
  friend TwoStateAmplitudes normalized(double b0, double b1);
  TwoStateAmplitudes(double a0, double a1) : a_{a0, a1} {}

  std::array<double, 2> a_;
};

enum class NoiseMode { kUniform, kAlternating };

struct NoiseProcess {
  double delta = 1.0;  // segment duration in units of tau0
  double sigma = 0.0;  // amplitude scale of f_n
  std::uint64_t seed = 0;
  NoiseMode mode = NoiseMode::kUniform;
  /// Alternating mode only: f_n = (-1)^{n + parity} sigma.
  int parity = 0;

  void validate() const;
};

/// Sequential source of segment amplitudes f_0, f_1, ...
class NoiseStream {
 public:
  explicit NoiseStream(const NoiseProcess& np);
  double next();

 private:
  NoiseProcess np_;
  CounterRng rng_;
  std::uint64_t index_ = 0;
};

/// Uniform mode: i.i.d. uniform on [-sigma, sigma). Alternating: (-1)^n sigma.
std::vector<double> generate_noise(const NoiseProcess& np, std::size_t n_steps);

/// a (1 - N) with N = coupling * f * kick_gain(level). Throws kNoiseTooLarge
/// when |N| >= 1.
double noise_kick(const TwoStateSystem& sys, double a, int level, double f);

struct LambdaDiagonal {
  double l00;
  double l11;
};

/// Linear model: l00 = a0^2 + a1^2 R1/R0, l11 = a1^2 + a0^2 R0/R1.
LambdaDiagonal lambda_two_state(const TwoStateAmplitudes& a, const TwoStateSystem& sys);

struct StepResult {
  TwoStateAmplitudes amplitudes;
  /// a0^2 + a1^2 of the raw recursion before renormalization.
  double raw_norm2;
};

StepResult collapse_step_detailed(const TwoStateAmplitudes& prev, const TwoStateSystem& sys,
                                  double f);

inline TwoStateAmplitudes collapse_step(const TwoStateAmplitudes& prev,
                                        const TwoStateSystem& sys, double f) {
  return collapse_step_detailed(prev, sys, f).amplitudes;
}

struct HistoryEntry {
  std::uint64_t step;
  double a0sq;
  double a1sq;
  double f;  // noise amplitude applied to reach this step (0 at step 0)
  double raw_norm2;
};

struct CollapseTrajectory {
  std::vector<HistoryEntry> history;
  std::optional<int> outcome;
  std::optional<std::uint64_t> steps_to_collapse;
  TwoStateAmplitudes final_state;
};

struct TrajectoryOptions {
  std::uint64_t max_steps = 100000;
  double threshold = 0.999;
  /// Record every `history_stride`-th step plus the last; 0 disables history.
  std::uint64_t history_stride = 0;
};

/// Iterates collapse_step until max(a0^2, a1^2) >= threshold or max_steps.
CollapseTrajectory run_trajectory(const TwoStateAmplitudes& init, const TwoStateSystem& sys,
                                  const NoiseProcess& np, const TrajectoryOptions& opts);

struct WilsonInterval {
  double lo;
  double hi;
};

/// Wilson score interval at z = 1.959964 (95%).
WilsonInterval wilson_ci95(std::uint64_t successes, std::uint64_t trials);

struct EnsembleReport {
  std::uint64_t n_runs = 0;
  std::array<std::uint64_t, 2> counts{};
  std::array<double, 2> freq{};
  std::array<WilsonInterval, 2> wilson_ci95{};
  std::uint64_t unresolved = 0;
  /// Over resolved runs; nullopt when none resolved.
  std::optional<double> median_steps;
  std::uint64_t max_steps_observed = 0;
};

/// Trajectory k uses seed np_base.seed + k. Results do not depend on
/// `threads`.
EnsembleReport run_ensemble(const TwoStateAmplitudes& init, const TwoStateSystem& sys,
                            const NoiseProcess& np_base, std::uint64_t n_runs,
                            const TrajectoryOptions& opts, unsigned threads = 1);

struct LambdaMatrix {
  std::size_t dim = 0;
  std::vector<Complex> values;  // row-major
  double excluded_mass = 0.0;
  std::optional<std::string> warning;

  Complex operator()(std::size_t n, std::size_t m) const { return values[n * dim + m]; }
};

/// lambda_nm = <phi_n| Re(x) R^{-1} |phi_m> with Re = psi / (R^{-1} psi)
/// evaluated pointwise. Requires an orthonormal basis (Gram within 1e-10 of
/// the identity), uniform fields (V = 0) and modes that are eigenmodes of the
/// square-root Hamiltonian with the given energies. Grid points where
/// |R^{-1} psi| falls below 1e-12 of its maximum are left out.
LambdaMatrix lambda_general(const evolution::WaveFunction& psi,
                            const std::vector<evolution::WaveFunction>& basis,
                            const std::vector<double>& energies,
                            const evolution::FieldConfig& f);

}  // namespace efpi::collapse
