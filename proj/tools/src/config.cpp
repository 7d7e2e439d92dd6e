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

#include "efpi_cli/config.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace efpi::cli {
namespace {

constexpr double kBig = 1e300;

ParamSpec integer(std::string key, std::int64_t def, std::int64_t lo, std::int64_t hi,
                  std::string help, bool pow2 = false) {
  ParamSpec p{std::move(key), ParamType::kInt, def, std::move(help)};
  p.min = static_cast<double>(lo);
  p.max = static_cast<double>(hi);
  p.power_of_two = pow2;
  return p;
}

ParamSpec real(std::string key, double def, double lo, double hi, std::string help,
               bool exclusive_min = false) {
  ParamSpec p{std::move(key), ParamType::kDouble, def, std::move(help)};
  p.min = lo;
  p.max = hi;
  p.exclusive_min = exclusive_min;
  return p;
}

ParamSpec choice(std::string key, std::string def, std::vector<std::string> choices,
                 std::string help) {
  ParamSpec p{std::move(key), ParamType::kString, def, std::move(help)};
  p.choices = std::move(choices);
  return p;
}

std::vector<SubcommandSpec> build_schema() {
  return {
      {"oracle",
       "Kernel moments: closed form against contour quadrature",
       {
           integer("n-min", 0, 0, 12, "lowest moment order"),
           integer("n-max", 5, 0, 12, "highest moment order"),
           choice("eps0-set", "0.1,0.5,1,5", {}, "comma-separated eps0 values (> 0)"),
           real("tolerance", 1e-8, 0.0, 1.0, "relative-error postcondition", true),
       }},
      {"kernel",
       "Equal-time kernel profile |F(eta)|",
       {
           real("mass", 1.0, 0.0, kBig, "particle mass", true),
           real("a-line", 0.0, -kBig, kBig, "line integral of A between the points"),
           real("eta-min", 0.1, 0.0, kBig, "smallest |eta| (units of 1/m)", true),
           real("eta-max", 5.0, 0.0, kBig, "largest |eta| (units of 1/m)", true),
           integer("points", 50, 2, 1000000, "number of samples"),
       }},
      {"evolve",
       "Spectral evolution of a Gaussian packet",
       {
           integer("grid-n", 1024, 16, 1 << 24, "grid points (power of two)", true),
           real("length", 200.0, 0.0, kBig, "periodic box length", true),
           real("mass", 1.0, 0.0, kBig, "particle mass", true),
           real("a0", 0.0, -kBig, kBig, "uniform vector potential"),
           real("x0", -40.0, -kBig, kBig, "initial packet centre"),
           real("sigma-x", 10.0, 0.0, kBig, "packet width", true),
           real("p0", 0.5, -kBig, kBig, "mean momentum"),
           real("dt", 0.5, 0.0, kBig, "time step", true),
           integer("steps", 40, 1, 100000000, "number of steps"),
           integer("stride", 10, 1, 100000000, "snapshot stride in steps"),
           real("v-amp", 0.0, -kBig, kBig, "amplitude of a cosine potential"),
           integer("v-waves", 1, 1, 1 << 20, "periods of the cosine potential in the box"),
       }},
      {"collapse",
       "Single two-state collapse trajectory",
       {
           real("e0", 1.25, 1.0, kBig, "level-0 energy (units of mc^2)"),
           real("e1", 1.75, 1.0, kBig, "level-1 energy (units of mc^2)"),
           real("a0sq", 0.25, 0.0, 1.0, "initial |a0|^2"),
           real("sigma", 0.25, 0.0, kBig, "noise amplitude"),
           real("delta", 1.0, 0.0, kBig, "noise segment duration (units of tau0)", true),
           choice("mode", "uniform", {"uniform", "alternating"}, "noise mode"),
           integer("parity", 0, 0, 1, "alternating mode: sign of the first segment"),
           integer("max-steps", 100000, 1, 1000000000, "step budget"),
           real("threshold", 0.999, 0.5, 0.999999999, "collapse threshold on max(a^2)", true),
           integer("stride", 1, 1, 1000000000, "history stride"),
       }},
      {"ensemble",
       "Outcome statistics over many trajectories",
       {
           real("e0", 1.25, 1.0, kBig, "level-0 energy (units of mc^2)"),
           real("e1", 1.75, 1.0, kBig, "level-1 energy (units of mc^2)"),
           real("a0sq", 0.25, 0.0, 1.0, "initial |a0|^2"),
           real("sigma", 0.25, 0.0, kBig, "noise amplitude"),
           real("delta", 1.0, 0.0, kBig, "noise segment duration (units of tau0)", true),
           choice("mode", "uniform", {"uniform", "alternating"}, "noise mode"),
           integer("n-runs", 1000, 1, 100000000, "number of trajectories"),
           integer("max-steps", 100000, 1, 1000000000, "step budget per trajectory"),
           real("threshold", 0.999, 0.5, 0.999999999, "collapse threshold on max(a^2)", true),
       }},
      {"ab",
       "Two-path Aharonov-Bohm screen pattern",
       {
           real("flux", 0.0, -kBig, kBig, "enclosed flux"),
           real("b1", 0.5, 0.0, kBig, "alternating field amplitude"),
           real("delta", 1.0, 0.0, kBig, "field segment duration (units of tau0)", true),
           real("tau-flight", 2000.0, 0.0, kBig, "flight time, an even multiple of delta", true),
           real("momentum", 1.093, 0.0, kBig, "canonical momentum (units of mc)"),
           real("a0", 0.343, -kBig, kBig, "vector potential on the arms"),
           real("d-slit", 20.0, 0.0, kBig, "slit separation (wavelengths)", true),
           real("screen-distance", 1000.0, 0.0, kBig, "screen distance (wavelengths)", true),
           real("slit-width", 2.0, 0.0, kBig, "slit width (wavelengths)", true),
           integer("screen-points", 801, 64, 10000000, "screen samples"),
           integer("n-electrons", 1000, 1, 100000000, "electrons"),
           real("threshold", 0.999, 0.5, 0.999999999, "collapse threshold on max(a^2)", true),
       }},
      {"flux",
       "Density-flux residual against the series truncation",
       {
           integer("grid-n", 256, 16, 1 << 24, "grid points (power of two)", true),
           real("length", 1024.0, 0.0, kBig, "periodic box length", true),
           real("mass", 1.0, 0.0, kBig, "particle mass", true),
           choice("packet", "gaussian", {"gaussian", "plane"}, "initial state"),
           real("p0", 0.05, -kBig, kBig, "gaussian: mean momentum"),
           real("sigma-x", 50.0, 0.0, kBig, "gaussian: width", true),
           integer("mode", 5, -(1 << 24), 1 << 24, "plane: mode number"),
           real("dt", 1.0, 0.0, kBig, "finite-difference step", true),
           integer("n-max", 5, 1, 8, "largest truncation order"),
           choice("series", "expansion", {"expansion", "literal"}, "correction-term form"),
       }},
  };
}

std::string range_text(const ParamSpec& s) {
  std::ostringstream os;
  os.precision(12);
  switch (s.type) {
    case ParamType::kString:
      if (s.choices.empty()) return "a string";
      os << "one of {";
      for (std::size_t i = 0; i < s.choices.size(); ++i) os << (i ? ", " : "") << s.choices[i];
      os << "}";
      return os.str();
    case ParamType::kInt:
      os << "an integer in [" << static_cast<std::int64_t>(s.min) << ", "
         << static_cast<std::int64_t>(s.max) << "]";
      if (s.power_of_two) os << " that is a power of two";
      return os.str();
    case ParamType::kDouble:
      os << "a real number in " << (s.exclusive_min ? "(" : "[");
      if (s.min <= -kBig) os << "-inf"; else os << s.min;
      os << ", ";
      if (s.max >= kBig) os << "inf)"; else os << s.max << "]";
      return os.str();
  }
  return {};
}

[[noreturn]] void bad(const ParamSpec& s, const std::string& got) {
  throw ConfigError(s.key, "invalid value for '" + s.key + "': got " + got + ", expected " +
                               range_text(s));
}

Json parse_flag(const ParamSpec& s, const std::string& text) {
  switch (s.type) {
    case ParamType::kString:
      return validate_value(s, text);
    case ParamType::kInt: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size()) bad(s, "'" + text + "'");
      return validate_value(s, v);
    }
    case ParamType::kDouble: {
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) bad(s, "'" + text + "'");
      return validate_value(s, v);
    }
  }
  return {};
}

std::uint64_t parse_seed(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return out;
  }
  throw ConfigError("seed", "invalid value for 'seed' in " + where +
                                ": expected an integer in [0, 2^64 - 1]");
}

unsigned parse_threads(const Json& v, const std::string& where) {
  std::int64_t t = -1;
  if (v.is_number_integer()) t = v.get<std::int64_t>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
    if (ec != std::errc{} || ptr != s.data() + s.size()) t = -1;
  }
  if (t < 1 || t > 256) {
    throw ConfigError("threads", "invalid value for 'threads' in " + where +
                                     ": expected an integer in [1, 256]");
  }
  return static_cast<unsigned>(t);
}

Json load_config_namespace(const std::string& path, const std::string& subcommand) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("config", "config file '" + path + "' is not valid JSON: " + e.what());
  }
  // A run manifest carries its resolved configuration under "config".
  if (doc.is_object() && doc.contains("config")) doc = doc["config"];
  if (!doc.is_object()) throw ConfigError("config", "config file must hold a JSON object");
  for (const auto& [ns, body] : doc.items()) {
    if (!find_subcommand(ns)) {
      throw ConfigError(ns, "unknown namespace '" + ns + "' in config file (expected a subcommand name)");
    }
    if (!body.is_object()) {
      throw ConfigError(ns, "namespace '" + ns + "' in config file must be an object");
    }
  }
  return doc.contains(subcommand) ? doc[subcommand] : Json::object();
}

}  // namespace

const std::vector<SubcommandSpec>& schema() {
  static const std::vector<SubcommandSpec> s = build_schema();
  return s;
}

const SubcommandSpec* find_subcommand(const std::string& name) {
  for (const auto& s : schema()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Json validate_value(const ParamSpec& s, const Json& value) {
  switch (s.type) {
    case ParamType::kString: {
      if (!value.is_string()) bad(s, value.dump());
      const auto v = value.get<std::string>();
      if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
        bad(s, "'" + v + "'");
      }
      return v;
    }
    case ParamType::kInt: {
      if (!value.is_number_integer()) bad(s, value.dump());
      const auto v = value.get<std::int64_t>();
      if (static_cast<double>(v) < s.min || static_cast<double>(v) > s.max) bad(s, value.dump());
      if (s.power_of_two && !(v > 0 && std::has_single_bit(static_cast<std::uint64_t>(v)))) {
        throw ConfigError(s.key, s.key + " must be a power of two, got " + std::to_string(v) +
                                     " (allowed: " + range_text(s) + ")");
      }
      return v;
    }
    case ParamType::kDouble: {
      if (!value.is_number()) bad(s, value.dump());
      const double v = value.get<double>();
      const bool lo_ok = s.exclusive_min ? v > s.min : v >= s.min;
      if (!std::isfinite(v) || !lo_ok || v > s.max) bad(s, value.dump());
      return v;
    }
  }
  return {};
}

RunConfig parse_and_validate(const std::vector<std::string>& args) {
  CLI::App app{"efpi: extended path-integral laboratory", "efpi"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  struct Common {
    std::optional<std::string> seed, out, config, threads;
  };
  std::map<std::string, Common> common;
  std::map<std::string, std::map<std::string, std::string>> flag_values;

  for (const auto& sub : schema()) {
    CLI::App* sc = app.add_subcommand(sub.name, sub.help);
    auto& c = common[sub.name];
    sc->add_option("--seed", c.seed, "base seed (default 0)")->type_name("UINT");
    sc->add_option("--out", c.out, "output directory (default efpi-out)")->type_name("DIR");
    sc->add_option("--config", c.config, "JSON config file or run manifest")->type_name("FILE");
    sc->add_option("--threads", c.threads, "worker threads (default 1)")->type_name("INT");
    auto& values = flag_values[sub.name];
    for (const auto& p : sub.params) {
      const char* type = p.type == ParamType::kInt      ? "INT"
                         : p.type == ParamType::kDouble ? "REAL"
                                                        : "STRING";
      sc->add_option("--" + p.key, values[p.key],
                     p.help + " (default " + p.default_value.dump() + "; " + range_text(p) + ")")
          ->type_name(type);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw ConfigError("", e.what());
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const SubcommandSpec& spec = *find_subcommand(chosen->get_name());
  const Common& c = common[spec.name];

  RunConfig cfg;
  cfg.subcommand = spec.name;
  Json file_ns = Json::object();
  if (c.config) {
    file_ns = load_config_namespace(*c.config, spec.name);
    for (const auto& [key, value] : file_ns.items()) {
      if (key == "seed" || key == "threads") continue;
      const bool known = std::any_of(spec.params.begin(), spec.params.end(),
                                     [&](const ParamSpec& p) { return p.key == key; });
      if (!known) {
        throw ConfigError(key, "unknown key '" + key + "' for subcommand '" + spec.name + "'");
      }
    }
  }

  cfg.params = Json::object();
  for (const auto& p : spec.params) {
    Json v = p.default_value;
    if (file_ns.contains(p.key)) v = validate_value(p, file_ns[p.key]);
    if (chosen->count("--" + p.key) > 0) v = parse_flag(p, flag_values[spec.name][p.key]);
    cfg.params[p.key] = validate_value(p, v);
  }
  if (file_ns.contains("seed")) cfg.seed = parse_seed(file_ns["seed"], "config file");
  if (c.seed) cfg.seed = parse_seed(Json(*c.seed), "--seed");
  if (file_ns.contains("threads")) cfg.threads = parse_threads(file_ns["threads"], "config file");
  if (c.threads) cfg.threads = parse_threads(Json(*c.threads), "--threads");
  if (c.out) cfg.output_dir = *c.out;
  if (cfg.output_dir.empty()) throw ConfigError("out", "--out must not be empty");

  // Cross-parameter rules.
  const auto& prm = cfg.params;
  if (spec.name == "oracle" && prm["n-min"].get<int>() > prm["n-max"].get<int>()) {
    throw ConfigError("n-min", "n-min must not exceed n-max");
  }
  if (spec.name == "kernel" && prm["eta-min"].get<double>() >= prm["eta-max"].get<double>()) {
    throw ConfigError("eta-min", "eta-min must be smaller than eta-max");
  }
  if (spec.name == "oracle") {
    std::stringstream ss(prm["eps0-set"].get<std::string>());
    std::string item;
    int count = 0;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size() || !(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("eps0-set", "eps0-set entries must be positive reals, got '" + item + "'");
      }
      ++count;
    }
    if (count == 0) throw ConfigError("eps0-set", "eps0-set must list at least one value");
  }
  if (spec.name == "ab") {
    const double half = prm["tau-flight"].get<double>() / (2.0 * prm["delta"].get<double>());
    if (std::round(half) < 1.0 || std::abs(half - std::round(half)) > 1e-9 * std::round(half)) {
      throw ConfigError("tau-flight", "tau-flight must equal 2 k delta for an integer k >= 1");
    }
  }
  return cfg;
}

Json resolved_config(const RunConfig& cfg) {
  Json ns = cfg.params;
  ns["seed"] = cfg.seed;
  Json out = Json::object();
  out[cfg.subcommand] = ns;
  return out;
}

}  // namespace efpi::cli
