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

#include "efpi/pathweight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "efpi/specfun.hpp"
#include "quadrature.hpp"

namespace efpi::pathweight {
namespace {

constexpr double kStepTolerance = 1e-12;
constexpr double kQuadTol = 1e-13;

}  // namespace

Path Path::make(std::vector<double> times, std::vector<double> positions) {
  require(times.size() >= 2, ErrorCode::kInvalidArgument, "Path: need at least 2 samples");
  require(times.size() == positions.size(), ErrorCode::kInvalidArgument,
          "Path: times and positions differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && std::isfinite(positions[i]),
            ErrorCode::kInvalidArgument, "Path: non-finite sample");
  }
  const double step = times[1] - times[0];
  require(step > 0.0, ErrorCode::kInvalidArgument, "Path: times must increase");
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double h = times[i + 1] - times[i];
    require(h > 0.0, ErrorCode::kInvalidArgument, "Path: times must increase");
    require(std::abs(h - step) <= kStepTolerance * step, ErrorCode::kInvalidArgument,
            "Path: time step is not uniform at segment " + std::to_string(i));
  }
  return Path(std::move(times), std::move(positions));
}

Path Path::straight(double x0, double velocity, double duration, int segments, double t0) {
  require(segments >= 1, ErrorCode::kInvalidArgument, "Path::straight: segments must be >= 1");
  require(duration > 0.0, ErrorCode::kInvalidArgument, "Path::straight: duration must be > 0");
  std::vector<double> t(segments + 1), x(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double elapsed = duration * i / segments;
    t[i] = t0 + elapsed;
    x[i] = x0 + velocity * elapsed;
  }
  return make(std::move(t), std::move(x));
}

Path Path::reversed() const {
  std::vector<double> x(positions_.rbegin(), positions_.rend());
  return Path(times_, std::move(x));
}

Path Path::concatenate(const Path& tail) const {
  require(tail.times_.front() == times_.back() && tail.positions_.front() == positions_.back(),
          ErrorCode::kInvalidArgument, "Path::concatenate: tail must start at this path's end");
  std::vector<double> t = times_, x = positions_;
  t.insert(t.end(), tail.times_.begin() + 1, tail.times_.end());
  x.insert(x.end(), tail.positions_.begin() + 1, tail.positions_.end());
  return make(std::move(t), std::move(x));
}

Complex proper_time_rate(double velocity) {
  const double speed = std::abs(velocity);
  require(std::abs(speed - 1.0) > 4.0 * std::numeric_limits<double>::epsilon(),
          ErrorCode::kLightlikeSegment,
          "lightlike segment (|v| = 1): the momentum functional diverges");
  if (speed < 1.0) return {std::sqrt((1.0 - speed) * (1.0 + speed)), 0.0};
  return {0.0, -std::sqrt((speed - 1.0) * (speed + 1.0))};
}

PathFunctionals path_functionals(const Path& path, const PhysicalScale& scale) {
  const double m = scale.mass();
  const double dt = path.step();
  PathFunctionals pf{};
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double v = path.velocity(i);
    const Complex rate = proper_time_rate(v);
    // 1/rate - 1 written as v^2 / (rate (1 + rate)) to survive |v| -> 0.
    const Complex gamma_minus_one = v * v / (rate * (1.0 + rate));
    pf.pbb += m * std::abs(v) / rate * dt;
    pf.pcal += std::sqrt(2.0 * m * m * gamma_minus_one) * dt;
    pf.dtau += rate * dt;
  }
  return pf;
}

Complex path_weight(const PathFunctionals& pf) {
  require(std::abs(pf.pcal) > 0.0, ErrorCode::kWeightUndefined,
          "path_weight: kinetic functional vanishes (rest path), weight is 0/0");
  return pf.pbb / pf.pcal / std::sqrt(pf.dtau / 2.0);
}

SampledField SampledField::make(double x0, double dx, std::size_t nx, double t0, double dt,
                                std::size_t nt, std::vector<double> values) {
  require(nx >= 2 && nt >= 1, ErrorCode::kInvalidArgument,
          "SampledField: need nx >= 2 and nt >= 1");
  require(dx > 0.0 && (nt == 1 || dt > 0.0), ErrorCode::kInvalidArgument,
          "SampledField: lattice steps must be positive");
  require(values.size() == nx * nt, ErrorCode::kInvalidArgument,
          "SampledField: values.size() must equal nx * nt");
  require(std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }),
          ErrorCode::kInvalidArgument, "SampledField: non-finite sample");
  SampledField f;
  f.x0_ = x0;
  f.dx_ = dx;
  f.nx_ = nx;
  f.t0_ = t0;
  f.dt_ = nt == 1 ? 1.0 : dt;
  f.nt_ = nt;
  f.values_ = std::move(values);
  return f;
}

SampledField SampledField::constant(double value) {
  require(std::isfinite(value), ErrorCode::kInvalidArgument, "SampledField: non-finite value");
  SampledField f;
  f.unbounded_ = true;
  f.values_ = {value};
  return f;
}

bool SampledField::contains(double x, double t) const noexcept {
  if (unbounded_) return true;
  const double x_hi = x0_ + dx_ * static_cast<double>(nx_ - 1);
  const bool in_x = x >= x0_ && x <= x_hi;
  if (nt_ == 1) return in_x;
  const double t_hi = t0_ + dt_ * static_cast<double>(nt_ - 1);
  return in_x && t >= t0_ && t <= t_hi;
}

double SampledField::at(double x, double t) const {
  if (unbounded_) return values_.front();
  if (!contains(x, t)) {
    fail(ErrorCode::kFieldDomain, "SampledField: point (" + std::to_string(x) + ", " +
                                      std::to_string(t) + ") lies outside the sampled domain");
  }
  const auto locate = [](double u, double origin, double h, std::size_t n) {
    const double s = (u - origin) / h;
    const auto i = std::min(static_cast<std::size_t>(std::max(s, 0.0)), n - 2);
    return std::pair{i, s - static_cast<double>(i)};
  };
  const auto [ix, fx] = locate(x, x0_, dx_, nx_);
  const auto row = [&](std::size_t it) {
    const double* r = values_.data() + it * nx_;
    return r[ix] * (1.0 - fx) + r[ix + 1] * fx;
  };
  if (nt_ == 1) return row(0);
  const auto [it, ft] = locate(t, t0_, dt_, nt_);
  return row(it) * (1.0 - ft) + row(it + 1) * ft;
}

Complex path_action(const Path& path, const PhysicalScale& scale, const SampledField& a_field,
                    const SampledField& v_field) {
  const double m = scale.mass();
  const double dt = path.step();
  const auto t = path.times();
  const auto x = path.positions();
  Complex action{0.0, 0.0};
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const double v = path.velocity(i);
    const double xm = 0.5 * (x[i] + x[i + 1]);
    const double tm = 0.5 * (t[i] + t[i + 1]);
    action += (-m * proper_time_rate(v) + a_field.at(xm, tm) * v - v_field.at(xm, tm)) * dt;
  }
  return action;
}

Complex short_time_plane_wave(double momentum, double eps0, const PhysicalScale& scale) {
  require(std::isfinite(momentum), ErrorCode::kInvalidArgument,
          "short_time_plane_wave: momentum must be finite");
  require(std::isfinite(eps0) && eps0 > 0.0, ErrorCode::kInvalidArgument,
          "short_time_plane_wave: eps0 must be positive");
  const double tau0 = scale.tau0();
  // Displacement per unit velocity, in units of 1/p: p * eps.
  const double phase_rate = momentum * tau0 * eps0;

  // Subluminal velocities, v = s sqrt(2 - s^2), both signs folded into the cosine.
  const auto subluminal = [eps0, phase_rate](double s) -> Complex {
    const double s2 = s * s;
    const double v = s * std::sqrt(2.0 - s2);
    return 4.0 * std::cos(phase_rate * v) * std::polar(1.0, -eps0 * (1.0 - s2));
  };
  // Superluminal velocities, v = sqrt(1 + w^2), damped as e^{-eps0 w}.
  const auto superluminal = [eps0, phase_rate](double w) -> Complex {
    const double v = std::sqrt(1.0 + w * w);
    return 2.0 * kI * std::cos(phase_rate * v) / std::sqrt(Complex{1.0, w}) *
           std::exp(-eps0 * w);
  };

  const auto i1 = detail::integrate_finite(subluminal, 0.0, 1.0, kQuadTol,
                                           "short_time_plane_wave(I1)");
  double panel = 2.0 / eps0;
  if (phase_rate != 0.0) panel = std::min(panel, kPi / std::abs(phase_rate));
  const auto i2 = detail::integrate_decaying_tail(superluminal, panel, 4.0 / eps0, kQuadTol,
                                                  1e-16, "short_time_plane_wave(I2)");
  return std::sqrt(tau0 * eps0) * (i1.value + i2.value);
}

Complex short_time_plane_wave_closed(double momentum, double eps0, const PhysicalScale& scale) {
  const double tau0 = scale.tau0();
  const double q = tau0 * momentum;
  const double energy = std::hypot(scale.mass(), momentum);
  return std::sqrt(kI * tau0 * kPi) *
         (1.0 / std::sqrt(Complex{1.0, -q}) + 1.0 / std::sqrt(Complex{1.0, q})) *
         std::polar(1.0, -energy * eps0 * tau0);
}

Complex short_time_plane_wave_series(double momentum, double eps0, const PhysicalScale& scale) {
  const double tau0 = scale.tau0();
  const double q2 = (momentum * tau0) * (momentum * tau0);
  Complex sum{0.0, 0.0};
  Complex last{0.0, 0.0};
  double coeff = 1.0;  // (-1)^n q^{2n} / (2n)!
  for (int n = 0; n <= specfun::kMaxMomentOrder; ++n) {
    last = coeff * specfun::kernel_moment_closed(specfun::MomentQuery::make(n, eps0));
    sum += last;
    coeff *= -q2 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
  }
  require(std::abs(last) <= 1e-10 * std::abs(sum), ErrorCode::kSeriesTruncation,
          "short_time_plane_wave_series: the n = 12 term still contributes " +
              std::to_string(std::abs(last) / std::abs(sum)) + " relatively");
  return 2.0 * std::sqrt(tau0) * sum;
}

Complex equal_time_kernel_profile(double eta, double a_line_integral, const PhysicalScale& scale) {
  require(std::isfinite(eta) && eta != 0.0, ErrorCode::kInvalidArgument,
          "equal_time_kernel_profile: eta = 0 is a distributional point");
  const double dist = std::abs(eta);
  return 1.0 / std::sqrt(kI * dist) *
         std::exp(Complex{-scale.mass() * dist, -a_line_integral});
}

}  // namespace efpi::pathweight
