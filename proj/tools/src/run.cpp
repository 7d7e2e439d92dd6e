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

#include "efpi_cli/run.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "efpi/abexp.hpp"
#include "efpi/collapse.hpp"
#include "efpi/evolution.hpp"
#include "efpi/pathweight.hpp"
#include "efpi/specfun.hpp"

#ifndef EFPI_VERSION
#define EFPI_VERSION "0.0.0"
#endif

namespace efpi::cli {
namespace fs = std::filesystem;

namespace {

// Noise amplitude calibrated so median collapse of the two-level system with
// E0/E1 = 1.25/1.75 lands inside 10^3..10^5 segments.
constexpr double kCalibratedSigma = 0.25;

struct Payload {
  std::string name;
  std::string contents;
};

struct Outcome {
  std::vector<Payload> files;
  std::vector<Postcondition> checks;
  Json summary = Json::object();
};

class Csv {
 public:
  explicit Csv(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }
  Csv& real(double v) { return cell(format_real(v)); }
  Csv& integer(long long v) { return cell(std::to_string(v)); }
  void end_row() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) os_ << ',';
    os_ << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool fresh_ = true;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// JSON has no inf or nan.
Json jreal(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double p_double(const RunConfig& c, const char* key) { return c.params.at(key).get<double>(); }
std::int64_t p_int(const RunConfig& c, const char* key) {
  return c.params.at(key).get<std::int64_t>();
}
std::string p_str(const RunConfig& c, const char* key) {
  return c.params.at(key).get<std::string>();
}

Postcondition check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::strtod(item.c_str(), nullptr));
  return out;
}

Outcome run_oracle(const RunConfig& c) {
  Outcome o;
  Csv csv({"n", "eps0", "closed_re", "closed_im", "contour_re", "contour_im", "rel_err"});
  double worst = 0.0;
  for (auto n = p_int(c, "n-min"); n <= p_int(c, "n-max"); ++n) {
    for (double eps0 : parse_list(p_str(c, "eps0-set"))) {
      const auto q = specfun::MomentQuery::make(static_cast<int>(n), eps0);
      const Complex closed = specfun::kernel_moment_closed(q);
      const Complex contour = specfun::kernel_moment_contour(q);
      const double rel = std::abs(closed - contour) / std::abs(closed);
      worst = std::max(worst, rel);
      csv.integer(n).real(eps0).real(closed.real()).real(closed.imag()).real(contour.real())
          .real(contour.imag()).real(rel);
      csv.end_row();
    }
  }
  o.files.push_back({"oracle.csv", csv.str()});
  const double tol = p_double(c, "tolerance");
  o.checks.push_back(check("max_rel_err_below_tolerance", worst < tol,
                           "max rel err " + format_real(worst) + " vs " + format_real(tol)));
  o.summary["max_rel_err"] = jreal(worst);
  return o;
}

Outcome run_kernel(const RunConfig& c) {
  Outcome o;
  const PhysicalScale scale(p_double(c, "mass"));
  const double lo = p_double(c, "eta-min"), hi = p_double(c, "eta-max");
  const auto points = p_int(c, "points");
  Csv csv({"eta", "re", "im", "abs"});
  // Least-squares slope of log(|F| sqrt(eta)) against eta: the Compton decay rate.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool finite = true;
  for (std::int64_t j = 0; j < points; ++j) {
    const double eta = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
    const Complex f = pathweight::equal_time_kernel_profile(eta, p_double(c, "a-line"), scale);
    finite = finite && is_finite(f);
    csv.real(eta).real(f.real()).real(f.imag()).real(std::abs(f));
    csv.end_row();
    const double y = std::log(std::abs(f) * std::sqrt(eta));
    sx += eta;
    sy += y;
    sxx += eta * eta;
    sxy += eta * y;
  }
  const double np = static_cast<double>(points);
  const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  o.files.push_back({"kernel.csv", csv.str()});
  Json s;
  s["decay_slope"] = jreal(slope);
  s["expected_slope"] = jreal(-scale.mass());
  s["params"] = c.params;
  o.files.push_back({"kernel.json", dump(s)});
  o.checks.push_back(check("profile_finite", finite, "all samples finite"));
  o.summary["decay_slope"] = jreal(slope);
  return o;
}

Outcome run_evolve(const RunConfig& c) {
  using namespace evolution;
  Outcome o;
  const auto grid = SpatialGrid::make(static_cast<std::size_t>(p_int(c, "grid-n")),
                                      p_double(c, "length"));
  FieldConfig field = FieldConfig::free(p_double(c, "mass"), p_double(c, "a0"));
  if (p_double(c, "v-amp") != 0.0) {
    const double k = 2.0 * kPi * static_cast<double>(p_int(c, "v-waves")) / grid.length();
    field.v_samples.resize(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) {
      field.v_samples[j] = p_double(c, "v-amp") * std::cos(k * (grid.x(j) - grid.x_min()));
    }
  }
  field.validate(grid);
  auto psi = WaveFunction::gaussian(grid, p_double(c, "x0"), p_double(c, "sigma-x"),
                                    p_double(c, "p0"));
  const double dt = p_double(c, "dt");
  const auto steps = p_int(c, "steps"), stride = p_int(c, "stride");
  const double norm0 = psi.norm2();

  Csv csv({"step", "t", "x", "re", "im", "abs2"});
  Json centroids = Json::array();
  double drift = 0.0;
  auto snapshot = [&](std::int64_t step) {
    const double t = dt * static_cast<double>(step);
    for (std::size_t j = 0; j < grid.n(); ++j) {
      csv.integer(step).real(t).real(grid.x(j)).real(psi[j].real()).real(psi[j].imag())
          .real(std::norm(psi[j]));
      csv.end_row();
    }
    centroids.push_back({{"step", step}, {"t", jreal(t)}, {"centroid", jreal(psi.centroid())}});
  };
  snapshot(0);
  for (std::int64_t done = 0; done < steps;) {
    const auto chunk = std::min<std::int64_t>(stride, steps - done);
    psi = evolve(psi, field, dt, static_cast<int>(chunk));
    done += chunk;
    drift = std::max(drift, std::abs(psi.norm2() - norm0));
    snapshot(done);
  }
  o.files.push_back({"snapshots.csv", csv.str()});
  Json s;
  s["norm_initial"] = jreal(norm0);
  s["norm_final"] = jreal(psi.norm2());
  s["max_norm_drift"] = jreal(drift);
  s["centroids"] = centroids;
  s["params"] = c.params;
  o.files.push_back({"evolve.json", dump(s)});
  const double bound = 1e-12 * std::ceil(static_cast<double>(steps) / 1000.0);
  o.checks.push_back(check("norm_drift", drift < bound,
                           "max drift " + format_real(drift) + " vs " + format_real(bound)));
  o.summary["max_norm_drift"] = jreal(drift);
  return o;
}

collapse::NoiseProcess noise_from(const RunConfig& c, std::uint64_t seed) {
  collapse::NoiseProcess np;
  np.delta = p_double(c, "delta");
  np.sigma = p_double(c, "sigma");
  np.seed = seed;
  np.mode = p_str(c, "mode") == "alternating" ? collapse::NoiseMode::kAlternating
                                                : collapse::NoiseMode::kUniform;
  if (c.params.contains("parity")) np.parity = static_cast<int>(p_int(c, "parity"));
  np.validate();
  return np;
}

Json calibration(const RunConfig& c) {
  Json j;
  j["sigma_star"] = jreal(kCalibratedSigma);
  j["sigma_over_sigma_star"] = jreal(p_double(c, "sigma") / kCalibratedSigma);
  j["segment_duration_tau0"] = jreal(p_double(c, "delta"));
  j["target_median_steps"] = {1000, 100000};
  return j;
}

Outcome run_collapse(const RunConfig& c) {
  using namespace collapse;
  Outcome o;
  const auto sys = TwoStateSystem::make(p_double(c, "e0"), p_double(c, "e1"));
  const auto init = TwoStateAmplitudes::from_probability(p_double(c, "a0sq"));
  TrajectoryOptions opts;
  opts.max_steps = static_cast<std::uint64_t>(p_int(c, "max-steps"));
  opts.threshold = p_double(c, "threshold");
  opts.history_stride = static_cast<std::uint64_t>(p_int(c, "stride"));
  const auto traj = run_trajectory(init, sys, noise_from(c, c.seed), opts);

  Csv csv({"step", "a0sq", "a1sq", "f"});
  double worst = 0.0;
  for (const auto& h : traj.history) {
    csv.integer(static_cast<long long>(h.step)).real(h.a0sq).real(h.a1sq).real(h.f);
    csv.end_row();
    worst = std::max(worst, std::abs(h.a0sq + h.a1sq - 1.0));
  }
  o.files.push_back({"history.csv", csv.str()});
  Json s;
  s["outcome"] = traj.outcome ? Json(*traj.outcome) : Json(nullptr);
  s["steps_to_collapse"] =
      traj.steps_to_collapse ? Json(*traj.steps_to_collapse) : Json(nullptr);
  s["final_a0sq"] = jreal(traj.final_state.probability(0));
  s["final_a1sq"] = jreal(traj.final_state.probability(1));
  s["max_normalization_error"] = jreal(worst);
  s["params"] = c.params;
  s["seed"] = c.seed;
  o.files.push_back({"collapse.json", dump(s)});
  o.checks.push_back(check("per_step_normalization", worst <= 1e-12,
                           "max |a0^2 + a1^2 - 1| = " + format_real(worst)));
  o.summary["calibration"] = calibration(c);
  return o;
}

Json ci_json(const collapse::WilsonInterval& w) { return Json::array({jreal(w.lo), jreal(w.hi)}); }

Outcome run_ensemble_cmd(const RunConfig& c) {
  using namespace collapse;
  Outcome o;
  const auto sys = TwoStateSystem::make(p_double(c, "e0"), p_double(c, "e1"));
  const auto init = TwoStateAmplitudes::from_probability(p_double(c, "a0sq"));
  TrajectoryOptions opts;
  opts.max_steps = static_cast<std::uint64_t>(p_int(c, "max-steps"));
  opts.threshold = p_double(c, "threshold");
  const auto n_runs = static_cast<std::uint64_t>(p_int(c, "n-runs"));
  const auto rep = run_ensemble(init, sys, noise_from(c, c.seed), n_runs, opts, c.threads);

  Json s;
  s["n_runs"] = rep.n_runs;
  s["counts"] = {rep.counts[0], rep.counts[1]};
  s["freq"] = {jreal(rep.freq[0]), jreal(rep.freq[1])};
  s["wilson_ci95"] = {ci_json(rep.wilson_ci95[0]), ci_json(rep.wilson_ci95[1])};
  s["unresolved"] = rep.unresolved;
  s["median_steps"] = rep.median_steps ? jreal(*rep.median_steps) : Json(nullptr);
  s["max_steps_observed"] = rep.max_steps_observed;
  s["born_prediction"] = {jreal(init.probability(0)), jreal(init.probability(1))};
  s["params"] = c.params;
  s["seed"] = c.seed;
  o.files.push_back({"ensemble.json", dump(s)});
  o.checks.push_back(check("counts_consistent",
                           rep.counts[0] + rep.counts[1] + rep.unresolved == n_runs,
                           "resolved plus unresolved equals n-runs"));
  o.summary["calibration"] = calibration(c);
  return o;
}

Outcome run_ab(const RunConfig& c) {
  using namespace abexp;
  Outcome o;
  ABConfig cfg;
  const double wl = 2.0 * kPi / p_double(c, "momentum");
  cfg.flux = p_double(c, "flux");
  cfg.b1_amp = p_double(c, "b1");
  cfg.delta = p_double(c, "delta");
  cfg.tau_flight = p_double(c, "tau-flight");
  cfg.momentum = p_double(c, "momentum");
  cfg.a0 = p_double(c, "a0");
  cfg.wavelength = wl;
  cfg.d_slit = p_double(c, "d-slit") * wl;
  cfg.screen_distance = p_double(c, "screen-distance") * wl;
  cfg.slit_width = p_double(c, "slit-width") * wl;
  cfg.screen_points = static_cast<int>(p_int(c, "screen-points"));
  cfg.n_electrons = static_cast<std::uint64_t>(p_int(c, "n-electrons"));
  cfg.seed = c.seed;
  cfg.threshold = p_double(c, "threshold");
  cfg.validate();
  const auto pat = simulate_ab(cfg, c.threads);

  Csv csv({"x", "intensity"});
  bool sane = true;
  for (std::size_t j = 0; j < pat.positions.size(); ++j) {
    csv.real(pat.positions[j]).real(pat.intensity[j]);
    csv.end_row();
    sane = sane && std::isfinite(pat.intensity[j]) && pat.intensity[j] >= 0.0;
  }
  o.files.push_back({"pattern.csv", csv.str()});
  Json s;
  s["visibility"] = jreal(pat.visibility);
  s["envelope_only"] = pat.envelope_only;
  s["collapsed_fraction"] = jreal(pat.collapsed_fraction);
  s["fringe_period"] = jreal(pat.fringe_period);
  s["left_count"] = pat.left_count;
  s["right_count"] = pat.right_count;
  s["unresolved_count"] = pat.unresolved_count;
  s["params"] = c.params;
  s["seed"] = c.seed;
  o.files.push_back({"ab.json", dump(s)});
  o.checks.push_back(check("intensity_nonnegative", sane, "finite and >= 0 everywhere"));
  o.summary["visibility"] = jreal(pat.visibility);
  return o;
}

Outcome run_flux(const RunConfig& c) {
  using namespace evolution;
  Outcome o;
  const auto grid = SpatialGrid::make(static_cast<std::size_t>(p_int(c, "grid-n")),
                                      p_double(c, "length"));
  const auto field = FieldConfig::free(p_double(c, "mass"));
  const bool plane = p_str(c, "packet") == "plane";
  const auto psi = plane ? WaveFunction::plane_wave(grid, static_cast<long>(p_int(c, "mode")))
                         : WaveFunction::gaussian(grid, 0.0, p_double(c, "sigma-x"),
                                                  p_double(c, "p0"));
  const auto series =
      p_str(c, "series") == "literal" ? FluxSeries::kLiteral : FluxSeries::kExpansion;
  Csv csv({"n_trunc", "residual", "drho_dt", "term_magnitude"});
  double worst = 0.0;
  for (int n = 1; n <= p_int(c, "n-max"); ++n) {
    const auto rep = density_flux_report(psi, field, p_double(c, "dt"), n, series);
    csv.integer(n).real(rep.residual_l2).real(rep.drho_dt_l2).real(rep.term_magnitudes.back());
    csv.end_row();
    worst = std::max(worst, rep.residual_l2);
  }
  o.files.push_back({"flux.csv", csv.str()});
  if (plane) {
    o.checks.push_back(check("plane_wave_residual", worst < 1e-12,
                             "max residual " + format_real(worst) + " vs 1e-12"));
  } else {
    o.checks.push_back(check("residual_finite", std::isfinite(worst), "all residuals finite"));
  }
  o.summary["max_residual"] = jreal(worst);
  return o;
}

Outcome dispatch(const RunConfig& c) {
  if (c.subcommand == "oracle") return run_oracle(c);
  if (c.subcommand == "kernel") return run_kernel(c);
  if (c.subcommand == "evolve") return run_evolve(c);
  if (c.subcommand == "collapse") return run_collapse(c);
  if (c.subcommand == "ensemble") return run_ensemble_cmd(c);
  if (c.subcommand == "ab") return run_ab(c);
  if (c.subcommand == "flux") return run_flux(c);
  throw ConfigError("", "unknown subcommand '" + c.subcommand + "'");
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03lldZ", buf, static_cast<long long>(ms));
  return out;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << contents;
  f.close();
  require(static_cast<bool>(f), ErrorCode::kInvalidArgument,
          "cannot write output file '" + path.string() + "'");
}

Json manifest_base(const RunConfig& cfg, const std::string& started) {
  Json m;
  m["artifact"] = "efpi";
  m["version"] = std::string(version());
  m["subcommand"] = cfg.subcommand;
  m["config"] = resolved_config(cfg);
  m["seed"] = cfg.seed;
  m["threads"] = cfg.threads;
  m["started_at"] = started;
  return m;
}

}  // namespace

std::string_view version() { return EFPI_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kInvalidArgument, "sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

RunManifest execute(const RunConfig& cfg) {
  const std::string started = utc_now();
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  fs::remove(dir / "error.json");

  Outcome outcome = dispatch(cfg);

  RunManifest result;
  result.postconditions = outcome.checks;
  for (const auto& p : outcome.files) {
    write_file(dir / p.name, p.contents);
    result.outputs.push_back({p.name, sha256_hex(p.contents), p.contents.size()});
  }
  bool all_ok = true;
  Json checks = Json::array();
  for (const auto& pc : outcome.checks) {
    all_ok = all_ok && pc.passed;
    checks.push_back({{"name", pc.name}, {"passed", pc.passed}, {"detail", pc.detail}});
  }
  result.exit_code = all_ok ? kExitOk : kExitPostcondition;

  Json m = manifest_base(cfg, started);
  m["finished_at"] = utc_now();
  Json outs = Json::array();
  for (const auto& r : result.outputs) {
    outs.push_back({{"file", r.file}, {"sha256", r.sha256}, {"bytes", r.bytes}});
  }
  m["outputs"] = outs;
  m["postconditions"] = checks;
  m["summary"] = outcome.summary;
  m["status"] = all_ok ? "ok" : "postcondition_failed";
  write_file(dir / "manifest.json", dump(m));
  result.json = std::move(m);
  return result;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_and_validate(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return kExitOk;
  } catch (const ConfigError& e) {
    Json j{{"status", "config_error"}, {"key", e.key()}, {"message", e.what()}};
    err << j.dump() << "\n";
    return kExitConfigError;
  }

  const std::string started = utc_now();
  try {
    const RunManifest m = execute(cfg);
    for (const auto& pc : m.postconditions) {
      if (!pc.passed) err << "postcondition failed: " << pc.name << ": " << pc.detail << "\n";
    }
    out << (fs::path(cfg.output_dir) / "manifest.json").string() << "\n";
    return m.exit_code;
  } catch (const std::exception& e) {
    Json j = manifest_base(cfg, started);
    j["finished_at"] = utc_now();
    j["status"] = "error";
    const auto* mod = dynamic_cast<const Error*>(&e);
    j["error"] = {{"code", mod ? std::string(to_string(mod->code())) : std::string("internal")},
                  {"message", e.what()}};
    try {
      fs::create_directories(cfg.output_dir);
      write_file(fs::path(cfg.output_dir) / "error.json", dump(j));
    } catch (const std::exception&) {
      // Reported on stderr below.
    }
    err << j["error"].dump() << "\n";
    return kExitModuleError;
  }
}

}  // namespace efpi::cli
