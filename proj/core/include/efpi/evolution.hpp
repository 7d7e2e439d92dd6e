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

#include <cstddef>
#include <span>
#include <vector>

#include "efpi/types.hpp"

/// Spectral propagation under H = sqrt(m^2 + (p - a0)^2) + V(x) on a periodic
/// one-dimensional grid, plus the R operator and density-flux diagnostics.
namespace efpi::evolution {

/// Uniform periodic grid; x_j = x_min + j dx, p_k = 2 pi k / length with k
/// wrapped to (-n/2, n/2].
class SpatialGrid {
 public:
  /// n must be a power of two >= 16. x_min defaults to -length/2.
  static SpatialGrid make(std::size_t n, double length);
  static SpatialGrid make(std::size_t n, double length, double x_min);

  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_); }
  double x_min() const noexcept { return x_min_; }
  double x(std::size_t j) const noexcept { return x_min_ + dx() * static_cast<double>(j); }
  /// Momentum of FFT bin k (0 <= k < n).
  double momentum(std::size_t k) const noexcept;
  std::vector<double> momenta() const;
  /// Momentum of the integer mode number (may be negative).
  double mode_momentum(long mode) const noexcept;

  bool operator==(const SpatialGrid&) const = default;

 private:
  SpatialGrid(std::size_t n, double length, double x_min)
      : n_(n), length_(length), x_min_(x_min) {}

  std::size_t n_;
  double length_;
  double x_min_;
};

/// Complex samples on a grid. Immutable; every operation returns a new value.
class WaveFunction {
 public:
  /// Validates length, finiteness and a positive norm.
  static WaveFunction make(const SpatialGrid& grid, std::vector<Complex> values);
  /// Unit-norm Gaussian packet exp(-(x-x0)^2/(4 sigma_x^2) + i p0 x).
  static WaveFunction gaussian(const SpatialGrid& grid, double x0, double sigma_x, double p0);
  /// Unit-norm plane wave of integer mode number `mode`.
  static WaveFunction plane_wave(const SpatialGrid& grid, long mode);

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  const Complex& operator[](std::size_t j) const noexcept { return values_[j]; }

  /// sum |psi_j|^2 dx
  double norm2() const;
  double norm() const;
  /// <x> weighted by |psi|^2 (not wrapped; keep packets away from the seam).
  double centroid() const;

 private:
  WaveFunction(SpatialGrid grid, std::vector<Complex> values)
      : grid_(grid), values_(std::move(values)) {}

  SpatialGrid grid_;
  std::vector<Complex> values_;
};

/// <a|b> = sum conj(a_j) b_j dx.
Complex inner_product(const WaveFunction& a, const WaveFunction& b);
/// sqrt(sum |a_j - b_j|^2 dx).
double l2_distance(const WaveFunction& a, const WaveFunction& b);

/// Uniform vector potential, scalar potential samples and mass.
struct FieldConfig {
  double a0 = 0.0;
  std::vector<double> v_samples;  // empty means V = 0
  double mass = 1.0;

  static FieldConfig free(double mass, double a0 = 0.0);

  bool has_potential() const noexcept;
  /// Throws unless mass > 0, a0 finite and v_samples empty or grid-sized and finite.
  void validate(const SpatialGrid& grid) const;
};

/// E(p) = sqrt(m^2 + (p - a0)^2).
double dispersion(double p, const FieldConfig& f);

/// Strang-split steps: half V, exact sqrt-kinetic phase e^{-i E(p) dt} in
/// momentum space, half V. With V = 0 each step is exact. Throws
/// kNanDetected if the state stops being finite.
WaveFunction evolve(const WaveFunction& psi, const FieldConfig& f, double dt, int steps);

/// Exact free propagation e^{-i E(p) t} for either sign of t. Requires V = 0.
WaveFunction propagate_free(const WaveFunction& psi, const FieldConfig& f, double t);

/// Eigenvalue of R on momentum p: (2 i pi)^{-1/2} E / sqrt(m + E).
Complex r_eigenvalue(double p, const FieldConfig& f);

/// Multiplies each momentum component by r(p), or by 1/r(p) when `inverse`.
WaveFunction apply_R(const WaveFunction& psi, const FieldConfig& f, bool inverse);

/// |r(E_p) (i pi tau0)^{1/2} [(1 - i tau0 p)^{-1/2} + (1 + i tau0 p)^{-1/2}] - 1|,
/// identically zero.
double plane_wave_identity_check(double p, double mass);

/// |<psi_rel|psi_nonrel>| / (|psi_rel| |psi_nonrel|) after time t under the
/// square-root and the Schrodinger dispersion (rest energy kept in both).
/// Requires V = 0.
double schrodinger_overlap(const WaveFunction& psi0, const FieldConfig& f, double t);

/// Builds the positive/negative-energy plane waves Phi_{+-} with frequencies
/// +-E(p) + V, forms psi = (Phi_+ + sign Phi_-)/sqrt 2 and returns
/// max |(i d_t - V)^2 psi - (m^2 + (p - a0)^2) psi| over a space-time sample
/// lattice. Requires a constant V (v_samples empty or all equal).
double klein_gordon_residual(double p, int sign, const FieldConfig& f);

/// Which higher-order correction terms enter the density-flux balance.
enum class FluxSeries {
  /// term_n = -(B_n / n) Q_{2n}, the exact order-by-order expansion of
  /// -i [psi* H psi - psi H psi*] for the free square-root Hamiltonian.
  kExpansion,
  /// term_n = B_n d^n Q_n. Not an identity: its residual grows past n = 1.
  kLiteral,
};

struct FluxReport {
  int n_trunc = 0;
  double residual_l2 = 0.0;
  double drho_dt_l2 = 0.0;
  /// Norm of each term: n = 1 is d j / dx, n >= 2 the correction terms.
  std::vector<double> term_magnitudes;
};

/// B_n = -(-i)^{2n-1} n C(1/2, n) / m^{2n-1}.
Complex flux_coefficient(int n, double mass);
/// Generalized binomial C(1/2, n) = Gamma(3/2) / (Gamma(n+1) Gamma(3/2-n)).
double half_binomial(int n);

/// L2 residual of d rho/dt + d j/dx + sum_{n=2}^{n_trunc} term_n with
/// rho = |psi|^2, j = Q_1/(2 i m), Q_n = psi* d^n psi - psi d^n psi* and
/// d rho/dt from a fourth-order centered difference with step dt. Requires
/// V = 0, a0 = 0 and 1 <= n_trunc <= 8. Derivatives of order 2 n_trunc
/// amplify round-off by (pi/dx)^{2 n_trunc}; keep pi/dx at or below m.
FluxReport density_flux_report(const WaveFunction& psi, const FieldConfig& f, double dt,
                               int n_trunc, FluxSeries series = FluxSeries::kExpansion);

}  // namespace efpi::evolution
