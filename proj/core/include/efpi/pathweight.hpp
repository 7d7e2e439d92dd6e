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

#include <span>
#include <vector>

#include "efpi/types.hpp"

/// Path functionals, the path weight and the short-time kernel.
///
/// Segment velocities may exceed c = 1. Wherever sqrt(1 - v^2) appears it is
/// replaced by -i sqrt(v^2 - 1) for |v| > 1; every other fractional power uses
/// the principal branch.
namespace efpi::pathweight {

/// Time-ordered broken-line trajectory with a uniform time step.
class Path {
 public:
  /// Validates: >= 2 samples, equal lengths, strictly increasing times,
  /// uniform step within 1e-12 relative, finite values.
  static Path make(std::vector<double> times, std::vector<double> positions);

  /// Constant-velocity path from (t0, x0) with `segments` equal steps.
  static Path straight(double x0, double velocity, double duration, int segments,
                       double t0 = 0.0);

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> positions() const noexcept { return positions_; }
  std::size_t segments() const noexcept { return times_.size() - 1; }
  double step() const noexcept { return times_[1] - times_[0]; }
  double duration() const noexcept { return times_.back() - times_.front(); }
  double velocity(std::size_t segment) const noexcept {
    return (positions_[segment + 1] - positions_[segment]) / step();
  }

  /// Same times, positions traversed in reverse order.
  Path reversed() const;
  /// Appends `tail`, which must start where this path ends with the same step.
  Path concatenate(const Path& tail) const;

 private:
  Path(std::vector<double> t, std::vector<double> x)
      : times_(std::move(t)), positions_(std::move(x)) {}

  std::vector<double> times_;
  std::vector<double> positions_;
};

/// Momentum functional P, kinetic functional 𝒫 and proper time Δτ. All three
/// are real for subluminal paths and pick up imaginary parts from
/// superluminal segments.
struct PathFunctionals {
  Complex pbb;
  Complex pcal;
  Complex dtau;
};

/// sqrt(1 - v^2) with the superluminal rule. Throws kLightlikeSegment at |v| = 1.
Complex proper_time_rate(double velocity);

PathFunctionals path_functionals(const Path& path, const PhysicalScale& scale);

/// W = (P / 𝒫) (Δτ / 2)^{-1/2}. Throws kWeightUndefined when 𝒫 = 0.
Complex path_weight(const PathFunctionals& pf);

/// Scalar field sampled on a uniform (x, t) lattice, bilinearly interpolated.
class SampledField {
 public:
  /// values[it * nx + ix]; nt == 1 gives a static field.
  static SampledField make(double x0, double dx, std::size_t nx, double t0, double dt,
                           std::size_t nt, std::vector<double> values);
  /// Unbounded uniform field.
  static SampledField constant(double value);

  bool contains(double x, double t) const noexcept;
  /// Throws kFieldDomain outside the lattice.
  double at(double x, double t) const;

 private:
  SampledField() = default;

  double x0_ = 0.0, dx_ = 1.0, t0_ = 0.0, dt_ = 1.0;
  std::size_t nx_ = 1, nt_ = 1;
  bool unbounded_ = false;
  std::vector<double> values_;
};

/// S = sum_i [-m sqrt(1 - v_i^2) + A v_i - V] dt with fields evaluated at the
/// segment midpoints.
Complex path_action(const Path& path, const PhysicalScale& scale, const SampledField& a_field,
                    const SampledField& v_field);

/// Amplitude multiplying e^{ipx} after one short step eps = eps0 * tau0 applied
/// to a plane wave, with the whole-weight factor R set to 1. Integrates the
/// subluminal velocities (I1) and the superluminal ones (I2, on the rotated
/// contour u = 1 + iw) directly; valid for every momentum.
Complex short_time_plane_wave(double momentum, double eps0, const PhysicalScale& scale);

/// Closed form (i tau0 pi)^{1/2} [(1 - i tau0 p)^{-1/2} + (1 + i tau0 p)^{-1/2}]
/// e^{-i E_p eps}.
Complex short_time_plane_wave_closed(double momentum, double eps0, const PhysicalScale& scale);

/// The same amplitude by summing the Taylor series of e^{ipx} against the
/// kernel moments, 2 sqrt(tau0) sum_n (-1)^n (p tau0)^{2n} M_n / (2n)!, for
/// n <= 12. Converges only for |p tau0| < 1; throws kSeriesTruncation when the
/// n = 12 term still contributes more than 1e-10 relatively.
Complex short_time_plane_wave_series(double momentum, double eps0, const PhysicalScale& scale);

/// sqrt(1/(i|eta|)) exp(-(m|eta| + i a_line_integral)); the equal-time kernel
/// profile without the R operator. Throws kInvalidArgument for eta = 0.
Complex equal_time_kernel_profile(double eta, double a_line_integral,
                                  const PhysicalScale& scale);

}  // namespace efpi::pathweight
