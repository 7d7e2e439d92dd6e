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

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "spectral.hpp"

namespace efpi::evolution {
namespace {

using detail::Fft;

double sum_abs2(std::span<const Complex> v) {
  return std::accumulate(v.begin(), v.end(), 0.0,
                         [](double acc, Complex z) { return acc + std::norm(z); });
}

void require_finite(std::span<const Complex> v, const std::string& what) {
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!is_finite(v[j])) {
      fail(ErrorCode::kNanDetected,
           what + ": non-finite amplitude at grid index " + std::to_string(j));
    }
  }
}

void require_same_grid(const WaveFunction& a, const WaveFunction& b, const char* what) {
  require(a.grid() == b.grid(), ErrorCode::kInvalidArgument,
          std::string(what) + ": wave functions live on different grids");
}

void require_free(const FieldConfig& f, const char* what) {
  require(!f.has_potential(), ErrorCode::kInvalidArgument,
          std::string(what) + ": requires V = 0");
}

// Multiplies the momentum components by phase(p) and returns to position space.
template <typename Multiplier>
std::vector<Complex> apply_diagonal(const WaveFunction& psi, Multiplier&& mult) {
  const auto& grid = psi.grid();
  std::vector<Complex> data(psi.values().begin(), psi.values().end());
  Fft fft(grid.n());
  fft.forward(data);
  for (std::size_t k = 0; k < data.size(); ++k) data[k] *= mult(grid.momentum(k));
  fft.backward(data);
  return data;
}

}  // namespace

SpatialGrid SpatialGrid::make(std::size_t n, double length) {
  return make(n, length, -0.5 * length);
}

SpatialGrid SpatialGrid::make(std::size_t n, double length, double x_min) {
  require(n >= 16 && std::has_single_bit(n), ErrorCode::kInvalidArgument,
          "SpatialGrid: n must be a power of two >= 16, got " + std::to_string(n));
  require(std::isfinite(length) && length > 0.0, ErrorCode::kInvalidArgument,
          "SpatialGrid: length must be positive and finite");
  require(std::isfinite(x_min), ErrorCode::kInvalidArgument, "SpatialGrid: x_min must be finite");
  return SpatialGrid(n, length, x_min);
}

double SpatialGrid::momentum(std::size_t k) const noexcept {
  const long half = static_cast<long>(n_ / 2);
  const long idx = static_cast<long>(k);
  return mode_momentum(idx <= half ? idx : idx - static_cast<long>(n_));
}

std::vector<double> SpatialGrid::momenta() const {
  std::vector<double> p(n_);
  for (std::size_t k = 0; k < n_; ++k) p[k] = momentum(k);
  return p;
}

double SpatialGrid::mode_momentum(long mode) const noexcept {
  return 2.0 * kPi * static_cast<double>(mode) / length_;
}

WaveFunction WaveFunction::make(const SpatialGrid& grid, std::vector<Complex> values) {
  require(values.size() == grid.n(), ErrorCode::kInvalidArgument,
          "WaveFunction: expected " + std::to_string(grid.n()) + " samples, got " +
              std::to_string(values.size()));
  for (const Complex& z : values) {
    require(is_finite(z), ErrorCode::kInvalidArgument, "WaveFunction: non-finite sample");
  }
  const double n2 = sum_abs2(values) * grid.dx();
  require(n2 > 0.0 && std::isfinite(n2), ErrorCode::kInvalidArgument,
          "WaveFunction: norm must be positive and finite");
  return WaveFunction(grid, std::move(values));
}

WaveFunction WaveFunction::gaussian(const SpatialGrid& grid, double x0, double sigma_x,
                                    double p0) {
  require(sigma_x > 0.0 && std::isfinite(sigma_x), ErrorCode::kInvalidArgument,
          "WaveFunction::gaussian: sigma_x must be positive");
  std::vector<Complex> v(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double d = grid.x(j) - x0;
    v[j] = std::exp(-d * d / (4.0 * sigma_x * sigma_x)) * std::polar(1.0, p0 * grid.x(j));
  }
  const double scale = 1.0 / std::sqrt(sum_abs2(v) * grid.dx());
  for (auto& z : v) z *= scale;
  return make(grid, std::move(v));
}

WaveFunction WaveFunction::plane_wave(const SpatialGrid& grid, long mode) {
  const double p = grid.mode_momentum(mode);
  const double amp = 1.0 / std::sqrt(grid.length());
  std::vector<Complex> v(grid.n());
  for (std::size_t j = 0; j < grid.n(); ++j) v[j] = std::polar(amp, p * grid.x(j));
  return make(grid, std::move(v));
}

double WaveFunction::norm2() const { return sum_abs2(values_) * grid_.dx(); }

double WaveFunction::norm() const { return std::sqrt(norm2()); }

double WaveFunction::centroid() const {
  double num = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) num += grid_.x(j) * std::norm(values_[j]);
  return num / sum_abs2(values_);
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b, "inner_product");
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < a.grid().n(); ++j) acc += std::conj(a[j]) * b[j];
  return acc * a.grid().dx();
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b, "l2_distance");
  double acc = 0.0;
  for (std::size_t j = 0; j < a.grid().n(); ++j) acc += std::norm(a[j] - b[j]);
  return std::sqrt(acc * a.grid().dx());
}

FieldConfig FieldConfig::free(double mass, double a0) {
  FieldConfig f;
  f.mass = mass;
  f.a0 = a0;
  return f;
}

bool FieldConfig::has_potential() const noexcept {
  return std::any_of(v_samples.begin(), v_samples.end(), [](double v) { return v != 0.0; });
}

void FieldConfig::validate(const SpatialGrid& grid) const {
  require(std::isfinite(mass) && mass > 0.0, ErrorCode::kInvalidArgument,
          "FieldConfig: mass must be positive and finite");
  require(std::isfinite(a0), ErrorCode::kInvalidArgument, "FieldConfig: a0 must be finite");
  require(v_samples.empty() || v_samples.size() == grid.n(), ErrorCode::kInvalidArgument,
          "FieldConfig: v_samples must be empty or have one value per grid point");
  require(std::all_of(v_samples.begin(), v_samples.end(), [](double v) { return std::isfinite(v); }),
          ErrorCode::kInvalidArgument, "FieldConfig: non-finite potential sample");
}

double dispersion(double p, const FieldConfig& f) { return std::hypot(f.mass, p - f.a0); }

WaveFunction evolve(const WaveFunction& psi, const FieldConfig& f, double dt, int steps) {
  const auto& grid = psi.grid();
  f.validate(grid);
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::kInvalidArgument, "evolve: dt must be > 0");
  require(steps >= 1, ErrorCode::kInvalidArgument, "evolve: steps must be >= 1");

  const std::size_t n = grid.n();
  std::vector<Complex> kinetic(n);
  for (std::size_t k = 0; k < n; ++k) {
    kinetic[k] = std::polar(1.0, -dispersion(grid.momentum(k), f) * dt);
  }
  const bool with_v = f.has_potential();
  std::vector<Complex> half_v;
  if (with_v) {
    half_v.resize(n);
    for (std::size_t j = 0; j < n; ++j) half_v[j] = std::polar(1.0, -0.5 * f.v_samples[j] * dt);
  }

  std::vector<Complex> data(psi.values().begin(), psi.values().end());
  Fft fft(n);
  for (int s = 0; s < steps; ++s) {
    if (with_v) {
      for (std::size_t j = 0; j < n; ++j) data[j] *= half_v[j];
    }
    fft.forward(data);
    for (std::size_t k = 0; k < n; ++k) data[k] *= kinetic[k];
    fft.backward(data);
    if (with_v) {
      for (std::size_t j = 0; j < n; ++j) data[j] *= half_v[j];
    }
    require_finite(data, "evolve step " + std::to_string(s));
  }
  return WaveFunction::make(grid, std::move(data));
}

WaveFunction propagate_free(const WaveFunction& psi, const FieldConfig& f, double t) {
  f.validate(psi.grid());
  require_free(f, "propagate_free");
  require(std::isfinite(t), ErrorCode::kInvalidArgument, "propagate_free: t must be finite");
  auto data = apply_diagonal(psi, [&](double p) { return std::polar(1.0, -dispersion(p, f) * t); });
  return WaveFunction::make(psi.grid(), std::move(data));
}

Complex r_eigenvalue(double p, const FieldConfig& f) {
  const double e = dispersion(p, f);
  return e / std::sqrt(f.mass + e) / std::sqrt(2.0 * kI * kPi);
}

WaveFunction apply_R(const WaveFunction& psi, const FieldConfig& f, bool inverse) {
  f.validate(psi.grid());
  auto data = apply_diagonal(psi, [&](double p) {
    const Complex r = r_eigenvalue(p, f);
    return inverse ? 1.0 / r : r;
  });
  return WaveFunction::make(psi.grid(), std::move(data));
}

double plane_wave_identity_check(double p, double mass) {
  const PhysicalScale scale(mass);
  const double q = scale.tau0() * p;
  const Complex bracket = 1.0 / std::sqrt(Complex{1.0, -q}) + 1.0 / std::sqrt(Complex{1.0, q});
  const Complex amplitude = std::sqrt(kI * kPi * scale.tau0()) * bracket;
  return std::abs(r_eigenvalue(p, FieldConfig::free(mass)) * amplitude - 1.0);
}

double schrodinger_overlap(const WaveFunction& psi0, const FieldConfig& f, double t) {
  f.validate(psi0.grid());
  require_free(f, "schrodinger_overlap");
  const WaveFunction rel = propagate_free(psi0, f, t);
  auto data = apply_diagonal(psi0, [&](double p) {
    const double q = p - f.a0;
    return std::polar(1.0, -(f.mass + q * q / (2.0 * f.mass)) * t);
  });
  const WaveFunction nonrel = WaveFunction::make(psi0.grid(), std::move(data));
  return std::min(1.0, std::abs(inner_product(rel, nonrel)) / (rel.norm() * nonrel.norm()));
}

double klein_gordon_residual(double p, int sign, const FieldConfig& f) {
  require(sign == 1 || sign == -1, ErrorCode::kInvalidArgument,
          "klein_gordon_residual: sign must be +1 or -1");
  require(std::isfinite(p), ErrorCode::kInvalidArgument, "klein_gordon_residual: p must be finite");
  const double v = f.v_samples.empty() ? 0.0 : f.v_samples.front();
  require(std::all_of(f.v_samples.begin(), f.v_samples.end(), [v](double s) { return s == v; }),
          ErrorCode::kInvalidArgument, "klein_gordon_residual: requires a constant V");

  const double e = dispersion(p, f);
  const double target = f.mass * f.mass + (p - f.a0) * (p - f.a0);
  const double omega[2] = {e + v, -e + v};
  const double weight[2] = {1.0 / std::sqrt(2.0), sign / std::sqrt(2.0)};

  // (i d_t - V) acting on e^{i(px - omega t)} multiplies it by omega - V.
  double worst = 0.0;
  constexpr int kSamples = 16;
  for (int ix = 0; ix < kSamples; ++ix) {
    for (int it = 0; it < kSamples; ++it) {
      const double x = 0.37 * ix;
      const double t = 0.29 * it;
      Complex lhs{0.0, 0.0};
      Complex psi{0.0, 0.0};
      for (int b = 0; b < 2; ++b) {
        const Complex phi = weight[b] * std::polar(1.0, p * x - omega[b] * t);
        const double shifted = omega[b] - v;
        lhs += shifted * shifted * phi;
        psi += phi;
      }
      worst = std::max(worst, std::abs(lhs - target * psi));
    }
  }
  return worst;
}

double half_binomial(int n) {
  require(n >= 0, ErrorCode::kInvalidArgument, "half_binomial: n must be >= 0");
  double c = 1.0;
  for (int k = 1; k <= n; ++k) c *= (0.5 - (k - 1)) / k;
  return c;
}

Complex flux_coefficient(int n, double mass) {
  require(n >= 1, ErrorCode::kInvalidArgument, "flux_coefficient: n must be >= 1");
  // (-i)^{2n-1} = i (-1)^n
  const Complex minus_i_pow = (n % 2 == 0 ? 1.0 : -1.0) * kI;
  return -minus_i_pow * static_cast<double>(n) * half_binomial(n) /
         std::pow(mass, 2 * n - 1);
}

FluxReport density_flux_report(const WaveFunction& psi, const FieldConfig& f, double dt,
                               int n_trunc, FluxSeries series) {
  const auto& grid = psi.grid();
  f.validate(grid);
  require_free(f, "density_flux_report");
  require(f.a0 == 0.0, ErrorCode::kInvalidArgument, "density_flux_report: requires a0 = 0");
  require(n_trunc >= 1 && n_trunc <= 8, ErrorCode::kInvalidArgument,
          "density_flux_report: n_trunc must lie in [1, 8], got " + std::to_string(n_trunc));
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::kInvalidArgument,
          "density_flux_report: dt must be > 0");

  const std::size_t n = grid.n();
  const double m = f.mass;
  const auto k = grid.momenta();
  Fft fft(n);

  const auto psi_c = psi.values();
  std::vector<Complex> conj_psi(n);
  std::transform(psi_c.begin(), psi_c.end(), conj_psi.begin(), [](Complex z) { return std::conj(z); });

  // Q_order = psi* d^order psi - psi d^order psi*
  const auto q_of = [&](int order) {
    const auto d_psi = detail::spectral_derivative(fft, psi_c, k, order);
    const auto d_conj = detail::spectral_derivative(fft, conj_psi, k, order);
    std::vector<Complex> q(n);
    for (std::size_t j = 0; j < n; ++j) q[j] = conj_psi[j] * d_psi[j] - psi_c[j] * d_conj[j];
    return q;
  };
  const auto l2 = [&](std::span<const Complex> v) { return std::sqrt(sum_abs2(v) * grid.dx()); };

  // Fourth-order centered difference of rho over +-dt, +-2dt.
  std::vector<double> rho_offsets[4];
  const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int s = 0; s < 4; ++s) {
    const WaveFunction moved = propagate_free(psi, f, offsets[s] * dt);
    rho_offsets[s].resize(n);
    for (std::size_t j = 0; j < n; ++j) rho_offsets[s][j] = std::norm(moved[j]);
  }
  std::vector<Complex> residual(n);
  for (std::size_t j = 0; j < n; ++j) {
    residual[j] = (rho_offsets[0][j] - 8.0 * rho_offsets[1][j] + 8.0 * rho_offsets[2][j] -
                   rho_offsets[3][j]) /
                  (12.0 * dt);
  }

  FluxReport report;
  report.n_trunc = n_trunc;
  report.drho_dt_l2 = l2(residual);

  // d j / dx = d Q_1 / dx / (2 i m) = Q_2 / (2 i m)
  {
    const auto q2 = q_of(2);
    std::vector<Complex> term(n);
    for (std::size_t j = 0; j < n; ++j) term[j] = q2[j] / (2.0 * kI * m);
    report.term_magnitudes.push_back(l2(term));
    for (std::size_t j = 0; j < n; ++j) residual[j] += term[j];
  }
  for (int order = 2; order <= n_trunc; ++order) {
    const Complex b = flux_coefficient(order, m);
    std::vector<Complex> term;
    if (series == FluxSeries::kExpansion) {
      term = q_of(2 * order);
      for (auto& z : term) z *= -b / static_cast<double>(order);
    } else {
      term = detail::spectral_derivative(fft, q_of(order), k, order);
      for (auto& z : term) z *= b;
    }
    report.term_magnitudes.push_back(l2(term));
    for (std::size_t j = 0; j < n; ++j) residual[j] += term[j];
  }
  report.residual_l2 = l2(residual);
  require(std::isfinite(report.residual_l2), ErrorCode::kNanDetected,
          "density_flux_report: non-finite residual");
  return report;
}

}  // namespace efpi::evolution
