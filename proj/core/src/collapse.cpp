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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "spectral.hpp"

namespace efpi::collapse {
namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kWilsonZ = 1.959963984540054;
constexpr double kGramTolerance = 1e-10;
constexpr double kEigenTolerance = 1e-8;
constexpr double kDenominatorFloor = 1e-12;
constexpr double kExcludedMassWarning = 1e-6;

void require_level(int level) {
  if (level != 0 && level != 1) {
    fail(ErrorCode::kInvalidArgument, "collapse: level must be 0 or 1, got " + std::to_string(level));
  }
}

}  // namespace

TwoStateAmplitudes normalized(double b0, double b1) {
  b0 = std::max(b0, 0.0);
  b1 = std::max(b1, 0.0);
  const double norm = std::hypot(b0, b1);
  require(norm > 0.0 && std::isfinite(norm), ErrorCode::kNanDetected,
          "collapse: amplitudes vanished or became non-finite");
  return TwoStateAmplitudes(b0 / norm, b1 / norm);
}

TwoStateSystem TwoStateSystem::make(double e0, double e1, int coupling0, int coupling1) {
  for (double e : {e0, e1}) {
    require(std::isfinite(e) && e >= 1.0, ErrorCode::kInvalidArgument,
            "TwoStateSystem: energies must be >= 1 (units of mc^2), got " + std::to_string(e));
  }
  for (int c : {coupling0, coupling1}) {
    require(c == 1 || c == -1, ErrorCode::kInvalidArgument,
            "TwoStateSystem: coupling signs must be +1 or -1");
  }
  TwoStateSystem sys;
  sys.e_ = {e0, e1};
  sys.p_ = {std::sqrt((e0 - 1.0) * (e0 + 1.0)), std::sqrt((e1 - 1.0) * (e1 + 1.0))};
  sys.coupling_ = {coupling0, coupling1};
  sys.r_ratio_ = e0 == e1 ? 1.0 : (e1 / e0) * std::sqrt((1.0 + e0) / (1.0 + e1));
  return sys;
}

double TwoStateSystem::kick_gain(int level) const noexcept {
  const double e = e_[level];
  return p_[level] * (2.0 + e) / (2.0 * e * e * (1.0 + e));
}

TwoStateAmplitudes TwoStateAmplitudes::make(double a0, double a1) {
  require(a0 >= 0.0 && a0 <= 1.0 && a1 >= 0.0 && a1 <= 1.0, ErrorCode::kInvalidArgument,
          "TwoStateAmplitudes: amplitudes must lie in [0, 1]");
  require(std::abs(a0 * a0 + a1 * a1 - 1.0) <= kNormTolerance, ErrorCode::kInvalidArgument,
          "TwoStateAmplitudes: a0^2 + a1^2 must equal 1 within 1e-12");
  return {a0, a1};
}

TwoStateAmplitudes TwoStateAmplitudes::from_probability(double p0) {
  require(p0 >= 0.0 && p0 <= 1.0, ErrorCode::kInvalidArgument,
          "TwoStateAmplitudes: probability must lie in [0, 1]");
  return {std::sqrt(p0), std::sqrt(1.0 - p0)};
}

void NoiseProcess::validate() const {
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::kInvalidArgument,
          "NoiseProcess: delta must be > 0");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorCode::kInvalidArgument,
          "NoiseProcess: sigma must be >= 0");
  require(parity == 0 || parity == 1, ErrorCode::kInvalidArgument,
          "NoiseProcess: parity must be 0 or 1");
}

NoiseStream::NoiseStream(const NoiseProcess& np) : np_(np), rng_(np.seed) { np_.validate(); }

double NoiseStream::next() {
  const std::uint64_t n = index_++;
  if (np_.mode == NoiseMode::kAlternating) {
    return ((n + static_cast<std::uint64_t>(np_.parity)) % 2 == 0) ? np_.sigma : -np_.sigma;
  }
  if (np_.sigma == 0.0) return 0.0;
  return rng_.next_uniform(-np_.sigma, np_.sigma);
}

std::vector<double> generate_noise(const NoiseProcess& np, std::size_t n_steps) {
  require(n_steps >= 1, ErrorCode::kInvalidArgument, "generate_noise: n_steps must be >= 1");
  NoiseStream stream(np);
  std::vector<double> f(n_steps);
  for (auto& v : f) v = stream.next();
  return f;
}

double noise_kick(const TwoStateSystem& sys, double a, int level, double f) {
  require_level(level);
  const double n = sys.coupling(level) * f * sys.kick_gain(level);
  if (!(std::abs(n) < 1.0)) {
    fail(ErrorCode::kNoiseTooLarge, "noise_kick: |N| = " + std::to_string(std::abs(n)) +
                                        " >= 1 leaves the perturbative regime");
  }
  return a * (1.0 - n);
}

LambdaDiagonal lambda_two_state(const TwoStateAmplitudes& a, const TwoStateSystem& sys) {
  const double r = sys.r_ratio();
  return {a.probability(0) + a.probability(1) * r, a.probability(1) + a.probability(0) / r};
}

StepResult collapse_step_detailed(const TwoStateAmplitudes& prev, const TwoStateSystem& sys,
                                  double f) {
  require(std::isfinite(f), ErrorCode::kInvalidArgument, "collapse_step: noise must be finite");
  // Definite state: nothing to mix, and the off-diagonal ratios would divide
  // by a vanishing amplitude.
  if (std::min(prev.a0(), prev.a1()) < kAmplitudeFloor) {
    const int d = prev.dominant();
    return {normalized(d == 0 ? 1.0 : 0.0, d == 1 ? 1.0 : 0.0), 1.0};
  }
  if (f == 0.0) return {prev, 1.0};

  const double k0 = noise_kick(sys, prev.a0(), 0, f);
  const double k1 = noise_kick(sys, prev.a1(), 1, f);
  const auto [l00, l11] = lambda_two_state(prev, sys);
  const double b0 = l00 * k0 + (prev.a0() / prev.a1()) * (1.0 - l00) * k1;
  const double b1 = (prev.a1() / prev.a0()) * (1.0 - l11) * k0 + l11 * k1;
  return {normalized(b0, b1), b0 * b0 + b1 * b1};
}

CollapseTrajectory run_trajectory(const TwoStateAmplitudes& init, const TwoStateSystem& sys,
                                  const NoiseProcess& np, const TrajectoryOptions& opts) {
  require(opts.threshold > 0.5 && opts.threshold < 1.0, ErrorCode::kInvalidArgument,
          "run_trajectory: threshold must lie in (0.5, 1)");
  require(opts.max_steps >= 1, ErrorCode::kInvalidArgument,
          "run_trajectory: max_steps must be >= 1");
  NoiseStream noise(np);

  CollapseTrajectory traj{{}, std::nullopt, std::nullopt, init};
  const auto record = [&](std::uint64_t step, const TwoStateAmplitudes& a, double f, double raw) {
    traj.history.push_back({step, a.probability(0), a.probability(1), f, raw});
  };
  const auto reached = [&](const TwoStateAmplitudes& a) {
    return std::max(a.probability(0), a.probability(1)) >= opts.threshold;
  };

  TwoStateAmplitudes a = init;
  if (opts.history_stride > 0) record(0, a, 0.0, 1.0);
  if (reached(a)) {
    traj.outcome = a.dominant();
    traj.steps_to_collapse = 0;
    return traj;
  }
  for (std::uint64_t step = 1; step <= opts.max_steps; ++step) {
    const double f = noise.next();
    const StepResult r = collapse_step_detailed(a, sys, f);
    a = r.amplitudes;
    const bool done = reached(a);
    if (opts.history_stride > 0 &&
        (step % opts.history_stride == 0 || done || step == opts.max_steps)) {
      record(step, a, f, r.raw_norm2);
    }
    if (done) {
      traj.outcome = a.dominant();
      traj.steps_to_collapse = step;
      break;
    }
  }
  traj.final_state = a;
  return traj;
}

WilsonInterval wilson_ci95(std::uint64_t successes, std::uint64_t trials) {
  require(trials >= 1 && successes <= trials, ErrorCode::kInvalidArgument,
          "wilson_ci95: need 0 <= successes <= trials, trials >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

EnsembleReport run_ensemble(const TwoStateAmplitudes& init, const TwoStateSystem& sys,
                            const NoiseProcess& np_base, std::uint64_t n_runs,
                            const TrajectoryOptions& opts, unsigned threads) {
  require(n_runs >= 1, ErrorCode::kInvalidArgument, "run_ensemble: n_runs must be >= 1");
  np_base.validate();
  TrajectoryOptions summary_opts = opts;
  summary_opts.history_stride = 0;

  // Per-run slots keep the aggregate independent of scheduling.
  std::vector<int> outcome(n_runs, -1);
  std::vector<std::uint64_t> steps(n_runs, 0);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto worker = [&] {
    for (std::uint64_t k = next++; k < n_runs; k = next++) {
      try {
        NoiseProcess np = np_base;
        np.seed = np_base.seed + k;
        const auto t = run_trajectory(init, sys, np, summary_opts);
        if (t.outcome) {
          outcome[k] = *t.outcome;
          steps[k] = *t.steps_to_collapse;
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_runs;
      }
    }
  };
  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(
                                                   n_runs, 1024))));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  EnsembleReport rep;
  rep.n_runs = n_runs;
  std::vector<std::uint64_t> resolved_steps;
  for (std::uint64_t k = 0; k < n_runs; ++k) {
    if (outcome[k] < 0) {
      ++rep.unresolved;
      continue;
    }
    ++rep.counts[outcome[k]];
    resolved_steps.push_back(steps[k]);
    rep.max_steps_observed = std::max(rep.max_steps_observed, steps[k]);
  }
  for (int i = 0; i < 2; ++i) {
    rep.freq[i] = static_cast<double>(rep.counts[i]) / static_cast<double>(n_runs);
    rep.wilson_ci95[i] = wilson_ci95(rep.counts[i], n_runs);
  }
  if (!resolved_steps.empty()) {
    std::sort(resolved_steps.begin(), resolved_steps.end());
    const std::size_t h = resolved_steps.size() / 2;
    rep.median_steps = resolved_steps.size() % 2 == 1
                           ? static_cast<double>(resolved_steps[h])
                           : 0.5 * static_cast<double>(resolved_steps[h - 1] + resolved_steps[h]);
  }
  return rep;
}

LambdaMatrix lambda_general(const evolution::WaveFunction& psi,
                            const std::vector<evolution::WaveFunction>& basis,
                            const std::vector<double>& energies,
                            const evolution::FieldConfig& f) {
  using evolution::inner_product;
  const auto& grid = psi.grid();
  f.validate(grid);
  require(!f.has_potential(), ErrorCode::kInvalidArgument,
          "lambda_general: requires uniform fields (V = 0)");
  require(!basis.empty() && basis.size() == energies.size(), ErrorCode::kInvalidArgument,
          "lambda_general: need one energy per basis mode");
  const std::size_t dim = basis.size();

  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t m = 0; m < dim; ++m) {
      const Complex g = inner_product(basis[n], basis[m]);
      require(std::abs(g - (n == m ? 1.0 : 0.0)) <= kGramTolerance, ErrorCode::kNotOrthonormal,
              "lambda_general: basis Gram matrix deviates from identity at (" +
                  std::to_string(n) + ", " + std::to_string(m) + ")");
    }
  }

  // Eigenmode check: |H phi - E phi| / |phi| with H applied spectrally.
  const auto k = grid.momenta();
  detail::Fft fft(grid.n());
  for (std::size_t n = 0; n < dim; ++n) {
    std::vector<Complex> hphi(basis[n].values().begin(), basis[n].values().end());
    fft.forward(hphi);
    for (std::size_t j = 0; j < hphi.size(); ++j) hphi[j] *= evolution::dispersion(k[j], f);
    fft.backward(hphi);
    double err = 0.0;
    for (std::size_t j = 0; j < hphi.size(); ++j) {
      err += std::norm(hphi[j] - energies[n] * basis[n][j]);
    }
    err = std::sqrt(err * grid.dx());
    require(err <= kEigenTolerance * std::max(1.0, std::abs(energies[n])),
            ErrorCode::kInvalidArgument,
            "lambda_general: basis mode " + std::to_string(n) +
                " is not an eigenmode with the stated energy");
  }

  const auto r_inv_psi = evolution::apply_R(psi, f, true);
  double max_den = 0.0;
  for (std::size_t j = 0; j < grid.n(); ++j) max_den = std::max(max_den, std::abs(r_inv_psi[j]));

  LambdaMatrix out;
  out.dim = dim;
  std::vector<Complex> re(grid.n(), 0.0);
  std::vector<bool> keep(grid.n(), true);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    if (std::abs(r_inv_psi[j]) <= kDenominatorFloor * max_den) {
      keep[j] = false;
      out.excluded_mass += std::norm(psi[j]) * grid.dx();
    } else {
      re[j] = psi[j] / r_inv_psi[j];
    }
  }
  if (out.excluded_mass > kExcludedMassWarning) {
    out.warning = "lambda_general: excluded grid points carry mass " +
                  std::to_string(out.excluded_mass);
  }

  std::vector<evolution::WaveFunction> r_inv_basis;
  r_inv_basis.reserve(dim);
  for (const auto& phi : basis) r_inv_basis.push_back(evolution::apply_R(phi, f, true));

  out.values.assign(dim * dim, 0.0);
  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t m = 0; m < dim; ++m) {
      Complex acc{0.0, 0.0};
      for (std::size_t j = 0; j < grid.n(); ++j) {
        if (keep[j]) acc += std::conj(basis[n][j]) * re[j] * r_inv_basis[m][j];
      }
      out.values[n * dim + m] = acc * grid.dx();
    }
  }
  return out;
}

}  // namespace efpi::collapse
