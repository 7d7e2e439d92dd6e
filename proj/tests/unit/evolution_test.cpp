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

#include "efpi/evolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "efpi/rng.hpp"

namespace efpi::evolution {
namespace {

std::vector<double> cosine_potential(const SpatialGrid& g, double amp, int waves) {
  std::vector<double> v(g.n());
  for (std::size_t j = 0; j < g.n(); ++j) {
    v[j] = amp * std::cos(2.0 * kPi * waves * (g.x(j) - g.x_min()) / g.length());
  }
  return v;
}

double max_abs_diff(const WaveFunction& a, const WaveFunction& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.grid().n(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

TEST(SpatialGrid, PowerOfTwoAndMomentumLayout) {
  EXPECT_THROW(SpatialGrid::make(1000, 10.0), Error);
  EXPECT_THROW(SpatialGrid::make(8, 10.0), Error);
  EXPECT_THROW(SpatialGrid::make(64, 0.0), Error);
  const auto g = SpatialGrid::make(16, 8.0);
  EXPECT_EQ(g.dx(), 0.5);
  EXPECT_EQ(g.x(0), -4.0);
  const auto p = g.momenta();
  const double dp = 2.0 * kPi / 8.0;
  EXPECT_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[8], 8 * dp);   // Nyquist point kept positive
  EXPECT_DOUBLE_EQ(p[9], -7 * dp);
  EXPECT_DOUBLE_EQ(p[15], -dp);
  for (std::size_t k = 1; k < 8; ++k) EXPECT_DOUBLE_EQ(p[k], -p[16 - k]);
}

TEST(WaveFunction, Validation) {
  const auto g = SpatialGrid::make(16, 8.0);
  EXPECT_THROW(WaveFunction::make(g, std::vector<Complex>(15, 1.0)), Error);
  EXPECT_THROW(WaveFunction::make(g, std::vector<Complex>(16, 0.0)), Error);
  std::vector<Complex> bad(16, 1.0);
  bad[3] = Complex(std::nan(""), 0.0);
  EXPECT_THROW(WaveFunction::make(g, bad), Error);
  EXPECT_NEAR(WaveFunction::gaussian(g, 0.0, 1.0, 0.3).norm(), 1.0, 1e-14);
  EXPECT_NEAR(WaveFunction::plane_wave(g, 3).norm(), 1.0, 1e-14);
}

TEST(Dispersion, Examples) {
  EXPECT_EQ(dispersion(0.0, FieldConfig::free(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(dispersion(0.75, FieldConfig::free(1.0)), 1.25);
  EXPECT_EQ(dispersion(0.4, FieldConfig::free(2.0, 0.4)), 2.0);
}

TEST(Evolve, PlaneWaveIsEigenstate) {
  const auto g = SpatialGrid::make(64, 20.0);
  const auto f = FieldConfig::free(1.0, 0.2);
  for (long mode : {0L, 3L, -7L, 32L}) {
    const auto psi = WaveFunction::plane_wave(g, mode);
    const auto out = evolve(psi, f, 0.1, 10);
    const Complex phase = std::polar(1.0, -dispersion(g.mode_momentum(mode), f) * 1.0);
    for (std::size_t j = 0; j < g.n(); ++j) {
      EXPECT_LT(std::abs(out[j] - phase * psi[j]), 1e-13) << "mode " << mode;
    }
  }
}

TEST(Evolve, RejectsBadArguments) {
  const auto g = SpatialGrid::make(32, 10.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.0);
  EXPECT_THROW(evolve(psi, FieldConfig::free(1.0), 0.0, 1), Error);
  EXPECT_THROW(evolve(psi, FieldConfig::free(1.0), 0.1, 0), Error);
  EXPECT_THROW(evolve(psi, FieldConfig::free(-1.0), 0.1, 1), Error);
  FieldConfig f = FieldConfig::free(1.0);
  f.v_samples.assign(31, 0.0);
  EXPECT_THROW(evolve(psi, f, 0.1, 1), Error);
}

TEST(Evolve, NanDetected) {
  const auto g = SpatialGrid::make(32, 10.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 1.0, 0.0);
  FieldConfig f = FieldConfig::free(1.0);
  f.v_samples.assign(32, 0.0);
  f.v_samples[5] = 1e308;
  // -V dt / 2 overflows to -inf, so the phase factor is NaN.
  try {
    evolve(psi, f, 10.0, 2);
    FAIL() << "expected NaN detection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNanDetected);
  }
}

TEST(Evolve, UnitarityWithPotential) {
  const auto g = SpatialGrid::make(1024, 100.0);
  FieldConfig f = FieldConfig::free(1.0, 0.1);
  f.v_samples = cosine_potential(g, 0.3, 4);
  const auto psi = WaveFunction::gaussian(g, -10.0, 3.0, 0.7);
  const auto out = evolve(psi, f, 0.01, 1000);
  EXPECT_LT(std::abs(out.norm() - psi.norm()) / psi.norm(), 1e-12);
}

TEST(Evolve, FreeSemigroup) {
  const auto g = SpatialGrid::make(256, 60.0);
  const auto f = FieldConfig::free(1.0, -0.3);
  CounterRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const double dt = rng.next_uniform(0.01, 2.0);
    const auto psi = WaveFunction::gaussian(g, rng.next_uniform(-10, 10),
                                            rng.next_uniform(1.0, 4.0), rng.next_uniform(-2, 2));
    EXPECT_LT(l2_distance(evolve(psi, f, dt, 2), evolve(psi, f, 2.0 * dt, 1)), 1e-10);
    EXPECT_LT(l2_distance(propagate_free(propagate_free(psi, f, dt), f, -dt), psi), 1e-12);
  }
}

TEST(Evolve, StrangSplittingIsSecondOrder) {
  const auto g = SpatialGrid::make(1024, 80.0);
  FieldConfig f = FieldConfig::free(1.0);
  f.v_samples = cosine_potential(g, 0.5, 3);
  const auto psi = WaveFunction::gaussian(g, 0.0, 2.0, 0.5);
  const double t = 2.0;
  const auto a = evolve(psi, f, t / 20, 20);
  const auto b = evolve(psi, f, t / 40, 40);
  const auto c = evolve(psi, f, t / 80, 80);
  const double ratio = l2_distance(a, b) / l2_distance(b, c);
  EXPECT_NEAR(ratio, 4.0, 0.3);
}

TEST(Evolve, RelativisticGroupVelocity) {
  const auto g = SpatialGrid::make(1024, 200.0);
  const auto f = FieldConfig::free(1.0);
  const double p0 = 0.5;
  const auto psi = WaveFunction::gaussian(g, -40.0, 10.0, p0);
  const auto out = evolve(psi, f, 0.5, 40);
  const double speed = (out.centroid() - psi.centroid()) / 20.0;
  const double expected = p0 / dispersion(p0, f);
  EXPECT_NEAR(expected, 0.4472135955, 1e-9);
  EXPECT_LT(std::abs(speed - expected) / expected, 0.01);
  EXPECT_GT(std::abs(speed - p0), 0.04);  // clearly not the nonrelativistic p0/m
}

TEST(ApplyR, InverseAndDiagonalAction) {
  const auto g = SpatialGrid::make(128, 30.0);
  const auto f = FieldConfig::free(1.0, 0.25);
  const auto psi = WaveFunction::gaussian(g, 2.0, 1.5, -0.4);
  const auto back = apply_R(apply_R(psi, f, false), f, true);
  EXPECT_LT(l2_distance(back, psi) / psi.norm(), 1e-13);

  const auto pw = WaveFunction::plane_wave(g, 6);
  const Complex r = r_eigenvalue(g.mode_momentum(6), f);
  const auto out = apply_R(pw, f, false);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_LT(std::abs(out[j] - r * pw[j]), 1e-14);

  const double r0 = std::abs(r_eigenvalue(0.0, FieldConfig::free(1.0)));
  EXPECT_NEAR(r0, 1.0 / std::sqrt(2.0 * kPi) / std::sqrt(2.0), 1e-15);
}

TEST(ApplyR, CommutesWithUniformFieldEvolution) {
  const auto g = SpatialGrid::make(256, 40.0);
  const auto f = FieldConfig::free(1.3, 0.4);
  const auto psi = WaveFunction::gaussian(g, -3.0, 2.0, 0.9);
  const auto ab = apply_R(evolve(psi, f, 0.2, 7), f, false);
  const auto ba = evolve(apply_R(psi, f, false), f, 0.2, 7);
  EXPECT_LT(max_abs_diff(ab, ba), 1e-12);
}

TEST(PlaneWaveIdentity, HoldsAcrossMomenta) {
  EXPECT_LT(plane_wave_identity_check(0.0, 1.0), 1e-14);
  EXPECT_LT(plane_wave_identity_check(0.75, 1.0), 1e-12);
  EXPECT_LT(plane_wave_identity_check(10.0, 1.0), 1e-12);
  for (int i = 0; i < 100; ++i) {
    const double p = 10.0 * i / 99.0;
    EXPECT_LT(plane_wave_identity_check(p, 1.0), 1e-12) << "p = " << p;
    EXPECT_LT(plane_wave_identity_check(-p * 2.0, 2.0), 1e-12);
  }
}

TEST(SchrodingerOverlap, LowAndHighMomentumRegimes) {
  const auto g = SpatialGrid::make(1024, 2000.0);
  const auto f = FieldConfig::free(1.0);
  const auto narrow = WaveFunction::gaussian(g, 0.0, 125.0, 0.0);  // sigma_p = 0.004
  EXPECT_NEAR(schrodinger_overlap(narrow, f, 0.0), 1.0, 1e-14);
  EXPECT_GT(schrodinger_overlap(narrow, f, 10.0), 0.9999);

  const auto g2 = SpatialGrid::make(1024, 200.0);
  const auto fast = WaveFunction::gaussian(g2, 0.0, 5.0, 1.0);  // sigma_p = 0.1 around p = m
  EXPECT_LT(schrodinger_overlap(fast, f, 10.0), 0.99);
  EXPECT_THROW(
      [&] {
        FieldConfig fv = f;
        fv.v_samples.assign(1024, 0.1);
        schrodinger_overlap(narrow, fv, 1.0);
      }(),
      Error);
}

TEST(KleinGordon, PlaneWaveResidualVanishes) {
  for (double p : {0.0, 0.75, 3.0}) {
    for (double v : {0.0, 0.2}) {
      for (int sign : {1, -1}) {
        FieldConfig f = FieldConfig::free(1.0, 0.1);
        if (v != 0.0) f.v_samples.assign(32, v);
        EXPECT_LT(klein_gordon_residual(p, sign, f), 1e-10) << p << " " << v << " " << sign;
      }
    }
  }
  EXPECT_THROW(klein_gordon_residual(0.5, 0, FieldConfig::free(1.0)), Error);
  FieldConfig ramp = FieldConfig::free(1.0);
  ramp.v_samples = {0.0, 0.1};
  EXPECT_THROW(klein_gordon_residual(0.5, 1, ramp), Error);
}

TEST(FluxCoefficients, BinomialAndB) {
  EXPECT_EQ(half_binomial(0), 1.0);
  EXPECT_EQ(half_binomial(1), 0.5);
  EXPECT_EQ(half_binomial(2), -0.125);
  EXPECT_EQ(half_binomial(3), 0.0625);
  for (int n = 0; n <= 8; ++n) {
    const double via_gamma = std::tgamma(1.5) / (std::tgamma(n + 1.0) * std::tgamma(1.5 - n));
    EXPECT_NEAR(half_binomial(n), via_gamma, 1e-15 * std::max(1.0, std::abs(via_gamma)));
  }
  // B_1 = -(-i) (1/2) / m = i / (2m)
  const Complex b1 = flux_coefficient(1, 2.0);
  EXPECT_NEAR(b1.real(), 0.0, 1e-16);
  EXPECT_NEAR(b1.imag(), 0.25, 1e-16);
  // B_2 = -(-i)^3 2 (-1/8) / m^3 = -(i)(-1/4)/m^3 = i / (4 m^3)
  const Complex b2 = flux_coefficient(2, 1.0);
  EXPECT_NEAR(b2.imag(), 0.25, 1e-16);
}

TEST(DensityFlux, PlaneWaveResidualVanishes) {
  const auto g = SpatialGrid::make(64, 256.0);  // p_max = pi / dx < m
  const auto psi = WaveFunction::plane_wave(g, 5);
  for (auto series : {FluxSeries::kExpansion, FluxSeries::kLiteral}) {
    const auto rep = density_flux_report(psi, FieldConfig::free(1.0), 0.5, 5, series);
    EXPECT_LT(rep.residual_l2, 1e-12);
    EXPECT_EQ(rep.term_magnitudes.size(), 5u);
  }
}

TEST(DensityFlux, RealGaussianHasNoCurrent) {
  const auto g = SpatialGrid::make(256, 1024.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 50.0, 0.0);
  const auto rep = density_flux_report(psi, FieldConfig::free(1.0), 1.0, 4);
  for (double t : rep.term_magnitudes) EXPECT_EQ(t, 0.0);
  EXPECT_DOUBLE_EQ(rep.residual_l2, rep.drho_dt_l2);
}

TEST(DensityFlux, ExpansionResidualDecreases) {
  const auto g = SpatialGrid::make(256, 1024.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 50.0, 0.05);  // sigma_p = 0.01
  double previous = INFINITY;
  for (int n = 1; n <= 4; ++n) {
    const auto rep = density_flux_report(psi, FieldConfig::free(1.0), 1.0, n);
    EXPECT_LT(rep.residual_l2, previous) << "n_trunc = " << n;
    previous = rep.residual_l2;
  }
}

TEST(DensityFlux, LiteralSeriesDoesNotConverge) {
  const auto g = SpatialGrid::make(256, 1024.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 50.0, 0.05);
  const auto f = FieldConfig::free(1.0);
  const double r1 = density_flux_report(psi, f, 1.0, 1, FluxSeries::kLiteral).residual_l2;
  const double r2 = density_flux_report(psi, f, 1.0, 2, FluxSeries::kLiteral).residual_l2;
  EXPECT_GT(r2, r1);
}

TEST(DensityFlux, Preconditions) {
  const auto g = SpatialGrid::make(64, 50.0);
  const auto psi = WaveFunction::gaussian(g, 0.0, 3.0, 0.1);
  EXPECT_THROW(density_flux_report(psi, FieldConfig::free(1.0), 0.1, 0), Error);
  EXPECT_THROW(density_flux_report(psi, FieldConfig::free(1.0), 0.1, 9), Error);
  EXPECT_THROW(density_flux_report(psi, FieldConfig::free(1.0, 0.2), 0.1, 2), Error);
  FieldConfig fv = FieldConfig::free(1.0);
  fv.v_samples.assign(64, 0.3);
  EXPECT_THROW(density_flux_report(psi, fv, 0.1, 2), Error);
}

}  // namespace
}  // namespace efpi::evolution
