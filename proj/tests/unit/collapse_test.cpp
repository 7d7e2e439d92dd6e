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

#include "efpi/collapse.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace efpi::collapse {
namespace {

const TwoStateSystem kFig1 = TwoStateSystem::make(1.25, 1.75);

TwoStateAmplitudes fig1_init() { return TwoStateAmplitudes::make(0.5, std::sqrt(0.75)); }

NoiseProcess uniform_noise(double sigma, std::uint64_t seed) {
  NoiseProcess np;
  np.sigma = sigma;
  np.seed = seed;
  return np;
}

TEST(TwoStateSystem, DerivedQuantities) {
  EXPECT_DOUBLE_EQ(kFig1.momentum(0), 0.75);
  EXPECT_NEAR(kFig1.momentum(1), std::sqrt(1.75 * 1.75 - 1.0), 1e-15);
  const double r = (1.75 / 1.25) * std::sqrt(2.25 / 2.75);
  EXPECT_NEAR(kFig1.r_ratio(), r, 1e-15);
  // Against the R-eigenvalue magnitudes directly.
  const auto mag = [](double e) { return e / std::sqrt(1.0 + e); };
  EXPECT_NEAR(kFig1.r_ratio(), mag(1.75) / mag(1.25), 1e-15);
  EXPECT_EQ(TwoStateSystem::make(1.4, 1.4).r_ratio(), 1.0);
  EXPECT_THROW(TwoStateSystem::make(0.9, 1.2), Error);
  EXPECT_THROW(TwoStateSystem::make(1.1, 1.2, 0, 1), Error);
}

TEST(TwoStateAmplitudes, Validation) {
  EXPECT_THROW(TwoStateAmplitudes::make(0.5, 0.5), Error);
  EXPECT_THROW(TwoStateAmplitudes::make(-0.1, std::sqrt(0.99)), Error);
  const auto a = TwoStateAmplitudes::from_probability(0.3);
  EXPECT_NEAR(a.probability(0), 0.3, 1e-15);
  EXPECT_EQ(a.dominant(), 1);
}

TEST(Noise, ZeroAlternatingAndMean) {
  for (double f : generate_noise(uniform_noise(0.0, 3), 100)) EXPECT_EQ(f, 0.0);
  NoiseProcess alt;
  alt.sigma = 1.0;
  alt.mode = NoiseMode::kAlternating;
  EXPECT_EQ(generate_noise(alt, 4), (std::vector<double>{1.0, -1.0, 1.0, -1.0}));
  alt.parity = 1;
  EXPECT_EQ(generate_noise(alt, 2), (std::vector<double>{-1.0, 1.0}));
  const auto alt_long = generate_noise(alt, 1000);
  EXPECT_EQ(std::accumulate(alt_long.begin(), alt_long.end(), 0.0), 0.0);

  const double sigma = 0.7;
  const std::size_t n = 100000;
  const auto u = generate_noise(uniform_noise(sigma, 99), n);
  for (double f : u) EXPECT_TRUE(f >= -sigma && f < sigma);
  const double mean = std::accumulate(u.begin(), u.end(), 0.0) / n;
  EXPECT_LT(std::abs(mean), 3.0 * sigma / std::sqrt(3.0 * n));
  EXPECT_EQ(u, generate_noise(uniform_noise(sigma, 99), n));
  EXPECT_NE(u, generate_noise(uniform_noise(sigma, 100), n));
}

TEST(NoiseKick, Examples) {
  EXPECT_EQ(noise_kick(kFig1, 0.6, 0, 0.0), 0.6);
  const double n = 0.01 * 0.75 * 3.25 / (2.0 * 1.5625 * 2.25);
  EXPECT_NEAR(n, 3.4667e-3, 1e-7);
  EXPECT_NEAR(noise_kick(kFig1, 1.0, 0, 0.01), 1.0 - n, 1e-16);
  const auto rest = TwoStateSystem::make(1.0, 2.0);
  EXPECT_EQ(noise_kick(rest, 0.8, 0, 0.9), 0.8);
  const auto signed_sys = TwoStateSystem::make(1.25, 1.25, 1, -1);
  EXPECT_NEAR(noise_kick(signed_sys, 1.0, 1, 0.01), 1.0 + n, 1e-16);
  try {
    noise_kick(kFig1, 1.0, 0, 3.0);
    FAIL() << "expected noise-too-large";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoiseTooLarge);
  }
  EXPECT_THROW(noise_kick(kFig1, 1.0, 2, 0.1), Error);
}

TEST(LambdaTwoState, Examples) {
  const auto definite = lambda_two_state(TwoStateAmplitudes::make(1.0, 0.0), kFig1);
  EXPECT_EQ(definite.l00, 1.0);
  const auto other = lambda_two_state(TwoStateAmplitudes::make(0.0, 1.0), kFig1);
  EXPECT_DOUBLE_EQ(other.l00, kFig1.r_ratio());
  const auto degenerate = TwoStateSystem::make(1.25, 1.25);
  for (double p : {0.0, 0.2, 0.5, 0.9}) {
    const auto l = lambda_two_state(TwoStateAmplitudes::from_probability(p), degenerate);
    EXPECT_NEAR(l.l00, 1.0, 1e-15);
    EXPECT_NEAR(l.l11, 1.0, 1e-15);
  }
}

TEST(CollapseStep, FixedPoints) {
  const auto definite = TwoStateAmplitudes::make(1.0, 0.0);
  const auto out = collapse_step(definite, kFig1, 0.3);
  EXPECT_EQ(out.a0(), 1.0);
  EXPECT_EQ(out.a1(), 0.0);
  const auto s = fig1_init();
  const auto same = collapse_step(s, kFig1, 0.0);
  EXPECT_EQ(same.a0(), s.a0());
  EXPECT_EQ(same.a1(), s.a1());
}

TEST(CollapseStep, NormalizationAndDegeneracyFreeze) {
  const auto degenerate = TwoStateSystem::make(1.25, 1.25);
  CounterRng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = TwoStateAmplitudes::from_probability(rng.next_unit());
    const double f = rng.next_uniform(-1.0, 1.0);
    const auto b = collapse_step(a, kFig1, f);
    EXPECT_NEAR(b.probability(0) + b.probability(1), 1.0, 1e-12);
    const auto d = collapse_step(a, degenerate, f);
    EXPECT_NEAR(d.probability(0), a.probability(0), 1e-12);
    EXPECT_NEAR(d.probability(1), a.probability(1), 1e-12);
  }
}

TEST(CollapseStep, RawNormIsRecorded) {
  const auto r = collapse_step_detailed(fig1_init(), kFig1, 0.2);
  EXPECT_GT(std::abs(r.raw_norm2 - 1.0), 0.0);
  EXPECT_NEAR(r.amplitudes.probability(0) + r.amplitudes.probability(1), 1.0, 1e-15);
}

TEST(CollapseStep, HandComputedUpdate) {
  const auto a = fig1_init();
  const double f = 0.05;
  const double k0 = a.a0() * (1.0 - f * 0.75 * 3.25 / (2.0 * 1.5625 * 2.25));
  const double e1 = 1.75, p1 = std::sqrt(e1 * e1 - 1.0);
  const double k1 = a.a1() * (1.0 - f * p1 * (2.0 + e1) / (2.0 * e1 * e1 * (1.0 + e1)));
  const double r = kFig1.r_ratio();
  const double l00 = 0.25 + 0.75 * r, l11 = 0.75 + 0.25 / r;
  const double b0 = l00 * k0 + (a.a0() / a.a1()) * (1.0 - l00) * k1;
  const double b1 = (a.a1() / a.a0()) * (1.0 - l11) * k0 + l11 * k1;
  const double nrm = std::hypot(b0, b1);
  const auto out = collapse_step(a, kFig1, f);
  EXPECT_NEAR(out.a0(), b0 / nrm, 1e-15);
  EXPECT_NEAR(out.a1(), b1 / nrm, 1e-15);
}

TEST(Trajectory, TrivialOutcomes) {
  TrajectoryOptions opts;
  opts.max_steps = 1000;
  const auto t0 = run_trajectory(TwoStateAmplitudes::make(1.0, 0.0), kFig1,
                                 uniform_noise(0.25, 1), opts);
  EXPECT_EQ(t0.outcome, 0);
  EXPECT_EQ(t0.steps_to_collapse, 0u);

  opts.history_stride = 100;
  const auto frozen = run_trajectory(fig1_init(), kFig1, uniform_noise(0.0, 1), opts);
  EXPECT_FALSE(frozen.outcome.has_value());
  EXPECT_FALSE(frozen.steps_to_collapse.has_value());
  EXPECT_EQ(frozen.final_state.a0(), 0.5);
  ASSERT_EQ(frozen.history.size(), 11u);
  for (const auto& h : frozen.history) EXPECT_EQ(h.a0sq, 0.25);

  opts.threshold = 1.0;
  EXPECT_THROW(run_trajectory(fig1_init(), kFig1, uniform_noise(0.1, 1), opts), Error);
}

TEST(Trajectory, TerminatesAndHistoryIsConsistent) {
  TrajectoryOptions opts;
  opts.max_steps = 1000000;
  opts.history_stride = 50;
  const auto t = run_trajectory(fig1_init(), kFig1, uniform_noise(0.25, 42), opts);
  ASSERT_TRUE(t.outcome.has_value());
  EXPECT_EQ(t.history.back().step, *t.steps_to_collapse);
  for (const auto& h : t.history) {
    EXPECT_GE(h.a0sq, 0.0);
    EXPECT_LE(h.a1sq, 1.0);
    EXPECT_NEAR(h.a0sq + h.a1sq, 1.0, 1e-9);
  }
  EXPECT_GE(std::max(t.final_state.probability(0), t.final_state.probability(1)), 0.999);
  const auto again = run_trajectory(fig1_init(), kFig1, uniform_noise(0.25, 42), opts);
  EXPECT_EQ(again.steps_to_collapse, t.steps_to_collapse);
  EXPECT_EQ(again.final_state.a0(), t.final_state.a0());
}

TEST(Trajectory, DefiniteStatesAreAbsorbing) {
  TrajectoryOptions opts;
  opts.max_steps = 200000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = run_trajectory(fig1_init(), kFig1, uniform_noise(0.5, seed), opts);
    ASSERT_TRUE(t.outcome.has_value());
    NoiseStream more(uniform_noise(0.5, seed + 1000));
    auto a = t.final_state;
    for (int s = 0; s < 1000; ++s) {
      a = collapse_step(a, kFig1, more.next());
      EXPECT_EQ(a.dominant(), *t.outcome);
      EXPECT_NEAR(a.probability(0) + a.probability(1), 1.0, 1e-12);
    }
  }
}

TEST(Wilson, KnownValues) {
  const auto ci = wilson_ci95(50, 100);
  EXPECT_NEAR(ci.lo, 0.403831, 1e-5);
  EXPECT_NEAR(ci.hi, 0.596169, 1e-5);
  const auto all = wilson_ci95(100, 100);
  EXPECT_EQ(all.hi, 1.0);
  EXPECT_NEAR(all.lo, 0.963006, 1e-5);
}

TEST(Ensemble, DefiniteAndDegenerate) {
  TrajectoryOptions opts;
  opts.max_steps = 2000;
  const auto definite =
      run_ensemble(TwoStateAmplitudes::make(1.0, 0.0), kFig1, uniform_noise(0.25, 0), 50, opts);
  EXPECT_EQ(definite.freq[0], 1.0);
  EXPECT_EQ(definite.counts[0], 50u);

  const auto degenerate = TwoStateSystem::make(1.25, 1.25);
  const auto sym = TwoStateAmplitudes::make(std::sqrt(0.5), std::sqrt(0.5));
  const auto rep = run_ensemble(sym, degenerate, uniform_noise(0.25, 0), 40, opts, 4);
  EXPECT_EQ(rep.unresolved, 40u);
  EXPECT_FALSE(rep.median_steps.has_value());
}

TEST(Ensemble, IndependentOfThreadCount) {
  TrajectoryOptions opts;
  opts.max_steps = 100000;
  const auto one = run_ensemble(fig1_init(), kFig1, uniform_noise(1.0, 77), 200, opts, 1);
  const auto many = run_ensemble(fig1_init(), kFig1, uniform_noise(1.0, 77), 200, opts, 7);
  EXPECT_EQ(one.counts, many.counts);
  EXPECT_EQ(one.unresolved, many.unresolved);
  EXPECT_EQ(one.median_steps, many.median_steps);
  EXPECT_EQ(one.counts[0] + one.counts[1] + one.unresolved, one.n_runs);
}

TEST(Ensemble, PropagatesNoiseTooLarge) {
  TrajectoryOptions opts;
  EXPECT_THROW(run_ensemble(fig1_init(), kFig1, uniform_noise(10.0, 0), 10, opts, 3), Error);
}

TEST(LambdaGeneral, EigenstatesAndDegenerateMixtures) {
  using namespace evolution;
  const auto g = SpatialGrid::make(64, 2.0 * kPi * 10.0);
  const auto f = FieldConfig::free(1.0);
  const auto phi0 = WaveFunction::plane_wave(g, 3);
  const auto phi1 = WaveFunction::plane_wave(g, 7);
  const double e0 = dispersion(g.mode_momentum(3), f);
  const double e1 = dispersion(g.mode_momentum(7), f);

  const auto single = lambda_general(phi0, {phi0}, {e0}, f);
  EXPECT_LT(std::abs(single(0, 0) - 1.0), 1e-12);
  EXPECT_FALSE(single.warning.has_value());

  const auto pair = lambda_general(phi0, {phi0, phi1}, {e0, e1}, f);
  EXPECT_LT(std::abs(pair(0, 0) - 1.0), 1e-12);
  EXPECT_LT(std::abs(pair(0, 1)), 1e-12);
  EXPECT_LT(std::abs(pair(1, 0)), 1e-12);

  // +-p share an energy: any mixture is a degenerate superposition.
  const auto minus = WaveFunction::plane_wave(g, -3);
  std::vector<Complex> mix(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) mix[j] = 0.6 * phi0[j] + Complex(0.0, 0.8) * minus[j];
  const auto lam = lambda_general(WaveFunction::make(g, mix), {phi0, minus}, {e0, e0}, f);
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t m = 0; m < 2; ++m) {
      EXPECT_LT(std::abs(lam(n, m) - (n == m ? 1.0 : 0.0)), 1e-12);
    }
  }
}

TEST(LambdaGeneral, ValidatesLinearModelWithinBand) {
  using namespace evolution;
  const auto g = SpatialGrid::make(256, 2.0 * kPi * 20.0);
  const auto f = FieldConfig::free(1.0);
  const long m0 = 15, m1 = 29;  // p = 0.75, 1.45
  const auto phi0 = WaveFunction::plane_wave(g, m0);
  const auto phi1 = WaveFunction::plane_wave(g, m1);
  const double e0 = dispersion(g.mode_momentum(m0), f);
  const double e1 = dispersion(g.mode_momentum(m1), f);
  std::vector<Complex> mix(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) mix[j] = (phi0[j] + phi1[j]) / std::sqrt(2.0);
  const auto lam = lambda_general(WaveFunction::make(g, mix), {phi0, phi1}, {e0, e1}, f);
  EXPECT_GT(std::abs(lam(1, 0)), 1e-3);

  const auto sys = TwoStateSystem::make(e0, e1);
  const auto model = lambda_two_state(TwoStateAmplitudes::from_probability(0.5), sys);
  const double band = std::abs(sys.r_ratio() - 1.0);
  EXPECT_LE(std::abs(lam(0, 0) - model.l00), band);
  EXPECT_LE(std::abs(lam(1, 1) - model.l11), band);
  // Columns of lambda preserve the amplitude vector in both descriptions.
  const Complex a0 = lam(0, 0) + lam(0, 1), a1 = lam(1, 0) + lam(1, 1);
  EXPECT_LT(std::abs(a0 - 1.0), 1e-10);
  EXPECT_LT(std::abs(a1 - 1.0), 1e-10);
}

TEST(LambdaGeneral, RejectsBadBasis) {
  using namespace evolution;
  const auto g = SpatialGrid::make(64, 40.0);
  const auto f = FieldConfig::free(1.0);
  const auto phi = WaveFunction::plane_wave(g, 2);
  const double e = dispersion(g.mode_momentum(2), f);
  try {
    lambda_general(phi, {phi, phi}, {e, e}, f);
    FAIL() << "expected orthonormality error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kNotOrthonormal);
  }
  EXPECT_THROW(lambda_general(phi, {phi}, {e + 0.1}, f), Error);
  EXPECT_THROW(lambda_general(phi, {phi}, {e, e}, f), Error);
}

}  // namespace
}  // namespace efpi::collapse
