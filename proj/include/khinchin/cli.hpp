#pragma once

// Command-line driver: parse a RunConfig from flags and/or a key=value
// config file, dispatch to the evaluators and checkers, and emit a
// deterministic JSON report plus CSV scan tables.
//
// Exit codes:
//   0  every requested verdict passed (or a pure evaluation succeeded)
//   1  a verdict failed
//   2  invalid configuration; the message names the offending field
//   3  numerical rejection; the message names the violated precondition
//
// Reports are byte-identical across runs for an identical configuration
// (including seeds) except for the "timestamp" and "wall_ms" lines.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "khinchin/dist.hpp"
#include "khinchin/parallel.hpp"
#include "khinchin/perturbed.hpp"
#include "khinchin/report.hpp"
#include "khinchin/specialfn.hpp"
#include "khinchin/verify.hpp"

namespace khinchin::cli {

using dist::Distribution1D;
using dist::RadialDist3D;
using dist::UnitVector;
using report::JsonWriter;
using report::LemmaReport;
using report::Verdict;

inline constexpr const char* kSchema = "khinchin-lab/1";
inline constexpr const char* kVersion = "1.0.0";

// Invalid configuration; carries the offending field name for exit code 2.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& msg)
      : std::runtime_error("field '" + f + "': " + msg),
        field(std::move(f)) {}
};

struct SGrid {
  double lo = 0.0, hi = 0.0;
  int points = 0;
  bool log_spacing = true;
};

struct RunConfig {
  std::string command;
  std::string dist;  // empty: per-command default (rademacher / sphere)
  double param = 0.0;
  std::string vector_text;  // explicit coordinate list, parsed lazily
  bool random_vec = false;
  std::size_t rand_n = 0;
  std::uint64_t rand_seed = 0;
  bool rand_small = true;
  std::optional<double> s;
  std::optional<SGrid> grid;
  double tol = 1e-8;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  std::optional<double> a_param;  // np-analysis
  std::optional<double> s0;       // np-analysis majorization mode
  std::string target;             // sweep: psi0 | phi0 | psi | phi
  std::string families = "default";  // certify-lemmas: default | none
  std::string output_path;  // JSON report copy
  std::string csv_path;     // scan table
};

// ---------------------------------------------------------------------------
// Field parsing.

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(field, "'" + text + "' is not a number");
  return v;
}

inline std::uint64_t parse_u64(const std::string& field,
                               const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw ConfigError(field, "'" + text + "' is not a non-negative integer");
  return v;
}

// One vector coordinate: plain decimal or the exact literals "1/√k" and
// "1/sqrt(k)" (optional sign, optional parentheses), which avoid decimal
// drift on the benchmark vectors.
inline double parse_coordinate(const std::string& field,
                               const std::string& token) {
  std::string t = trim(token);
  if (t.empty()) throw ConfigError(field, "empty coordinate");
  double sign = 1.0;
  if (t[0] == '+' || t[0] == '-') {
    if (t[0] == '-') sign = -1.0;
    t = t.substr(1);
  }
  std::string tail;
  if (t.rfind("1/\xE2\x88\x9A", 0) == 0)
    tail = t.substr(std::strlen("1/\xE2\x88\x9A"));
  else if (t.rfind("1/sqrt", 0) == 0)
    tail = t.substr(std::strlen("1/sqrt"));
  if (!tail.empty() || t.rfind("1/\xE2\x88\x9A", 0) == 0) {
    std::string digits = tail;
    if (!digits.empty() && digits.front() == '(') {
      if (digits.back() != ')')
        throw ConfigError(field, "'" + token + "': unbalanced parenthesis");
      digits = digits.substr(1, digits.size() - 2);
    }
    if (digits.empty())
      throw ConfigError(field, "'" + token + "': missing integer under the root");
    for (char c : digits)
      if (c < '0' || c > '9')
        throw ConfigError(field,
                          "'" + token + "': the root literal takes an integer");
    const double k = std::strtod(digits.c_str(), nullptr);
    if (!(k >= 1.0))
      throw ConfigError(field, "'" + token + "': need k >= 1 under the root");
    return sign / std::sqrt(k);
  }
  return sign * parse_double(field, t);
}

inline std::vector<double> parse_vector(const std::string& field,
                                        const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) out.push_back(parse_coordinate(field, token));
  if (out.size() < 2)
    throw ConfigError(field, "need at least 2 comma-separated coordinates");
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string token;
  while (std::getline(ss, token, sep)) out.push_back(token);
  return out;
}

inline SGrid parse_sgrid(const std::string& field, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4)
    throw ConfigError(field, "expected min:max:points:lin|log, got '" + text +
                                 "'");
  SGrid g;
  g.lo = parse_double(field, parts[0]);
  g.hi = parse_double(field, parts[1]);
  g.points = static_cast<int>(parse_u64(field, parts[2]));
  if (parts[3] == "lin")
    g.log_spacing = false;
  else if (parts[3] == "log")
    g.log_spacing = true;
  else
    throw ConfigError(field, "spacing must be 'lin' or 'log', got '" +
                                 parts[3] + "'");
  if (!(g.lo > 0.0) || !(g.hi >= g.lo))
    throw ConfigError(field, "need 0 < min <= max");
  if (g.points < 1) throw ConfigError(field, "need at least 1 grid point");
  return g;
}

inline std::vector<double> grid_values(const SGrid& g) {
  std::vector<double> s(static_cast<std::size_t>(g.points));
  if (g.points == 1) {
    s[0] = g.lo;
    return s;
  }
  if (g.log_spacing) {
    const double ratio = std::log(g.hi / g.lo) / (g.points - 1);
    for (int i = 0; i < g.points; ++i)
      s[static_cast<std::size_t>(i)] = g.lo * std::exp(ratio * i);
  } else {
    const double step = (g.hi - g.lo) / (g.points - 1);
    for (int i = 0; i < g.points; ++i)
      s[static_cast<std::size_t>(i)] = g.lo + step * i;
  }
  s.back() = g.hi;
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Configuration assembly: config file first, then flags override.

inline void apply_setting(RunConfig& cfg, const std::string& key,
                          const std::string& value) {
  if (key == "command") {
    cfg.command = detail::trim(value);
  } else if (key == "dist") {
    cfg.dist = detail::trim(value);
  } else if (key == "param") {
    cfg.param = detail::parse_double(key, value);
  } else if (key == "vector") {
    cfg.vector_text = detail::trim(value);
    cfg.random_vec = false;
  } else if (key == "random-vector") {
    const auto parts = detail::split(detail::trim(value), ':');
    if (parts.size() < 2 || parts.size() > 3)
      throw ConfigError(key, "expected n:seed[:small|any], got '" + value + "'");
    cfg.rand_n = static_cast<std::size_t>(detail::parse_u64(key, parts[0]));
    cfg.rand_seed = detail::parse_u64(key, parts[1]);
    cfg.rand_small = true;
    if (parts.size() == 3) {
      if (parts[2] == "small")
        cfg.rand_small = true;
      else if (parts[2] == "any")
        cfg.rand_small = false;
      else
        throw ConfigError(key, "third part must be 'small' or 'any'");
    }
    if (cfg.rand_n < 2) throw ConfigError(key, "need n >= 2 coordinates");
    cfg.random_vec = true;
    cfg.vector_text.clear();
  } else if (key == "s") {
    cfg.s = detail::parse_double(key, value);
  } else if (key == "s-grid") {
    cfg.grid = detail::parse_sgrid(key, value);
  } else if (key == "tol") {
    cfg.tol = detail::parse_double(key, value);
    if (!(cfg.tol > 0.0)) throw ConfigError(key, "tolerance must be positive");
  } else if (key == "mc-samples") {
    cfg.mc_samples = static_cast<std::size_t>(detail::parse_u64(key, value));
    if (cfg.mc_samples < 1000)
      throw ConfigError(key, "need at least 1000 samples");
  } else if (key == "seed") {
    cfg.seed = detail::parse_u64(key, value);
  } else if (key == "a-param") {
    cfg.a_param = detail::parse_double(key, value);
  } else if (key == "s0") {
    cfg.s0 = detail::parse_double(key, value);
  } else if (key == "target") {
    cfg.target = detail::trim(value);
  } else if (key == "families") {
    const std::string f = detail::trim(value);
    if (f != "default" && f != "none")
      throw ConfigError(key, "must be 'default' or 'none', got '" + f + "'");
    cfg.families = f;
  } else if (key == "output") {
    cfg.output_path = detail::trim(value);
  } else if (key == "csv") {
    cfg.csv_path = detail::trim(value);
  } else {
    throw ConfigError(key, "unknown setting");
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", "line " + std::to_string(line_no) +
                                      ": expected key=value, got '" + t + "'");
    apply_setting(cfg, detail::trim(t.substr(0, eq)),
                  detail::trim(t.substr(eq + 1)));
  }
}

inline const char* kUsage =
    "usage: khinchin-lab <command> [flags]\n"
    "\n"
    "commands:\n"
    "  eval-psi0       L1 reference functional Psi0(s)\n"
    "  eval-phi0       negative-moment reference functional Phi0(s)\n"
    "  eval-psi        perturbed Psi(s) for a 1D magnitude law\n"
    "  eval-phi        perturbed Phi(s) for a 3D radial law\n"
    "  certify-lemmas  run every lemma checker and aggregate verdicts\n"
    "  verify-szarek   sharp L1 inequality for one coefficient vector\n"
    "  verify-ball     sharp negative-moment inequality for one vector\n"
    "  np-analysis     sign-change / majorization analysis of F_a - G\n"
    "  sweep           scan a functional over an s-grid (CSV)\n"
    "\n"
    "flags:\n"
    "  --config PATH        key=value file with the same keys as the flags\n"
    "  --dist NAME          rademacher|two_point|four_point|noise (line)\n"
    "                       sphere|scaled|two_point (radial commands)\n"
    "  --param C            perturbation size for the family\n"
    "  --vector a1,a2,...   coordinates; decimals or 1/\xE2\x88\x9Ak literals\n"
    "  --random-vector n:seed[:small|any]\n"
    "  --s VALUE            single evaluation point\n"
    "  --s-grid MIN:MAX:POINTS:lin|log\n"
    "  --tol T              quadrature tolerance (default 1e-8)\n"
    "  --mc-samples N       Monte Carlo corroboration size (default 1e6)\n"
    "  --seed S             Monte Carlo seed\n"
    "  --a-param A          comparison-curve parameter in [1, pi/3]\n"
    "  --s0 S0              tangency point for the majorization check\n"
    "  --target NAME        sweep target: psi0|phi0|psi|phi\n"
    "  --families F         certify-lemmas families: default|none\n"
    "  --output PATH        write the JSON report to PATH as well as stdout\n"
    "  --csv PATH           write the scan table (s,value,uncertainty,bound,margin)\n"
    "  --threads via env KHINCHIN_LAB_THREADS\n";

inline RunConfig parse_command_line(int argc, const char* const* argv) {
  RunConfig cfg;
  std::vector<std::pair<std::string, std::string>> pending;
  int i = 1;
  if (i < argc && argv[i][0] != '-') cfg.command = argv[i++];
  for (; i < argc; ++i) {
    std::string flag = argv[i];
    if (flag.rfind("--", 0) != 0)
      throw ConfigError("command line", "unexpected argument '" + flag + "'");
    flag = flag.substr(2);
    const auto eq = flag.find('=');
    std::string value;
    if (eq != std::string::npos) {
      value = flag.substr(eq + 1);
      flag = flag.substr(0, eq);
    } else {
      if (i + 1 >= argc)
        throw ConfigError(flag, "missing value");
      value = argv[++i];
    }
    if (flag == "config")
      load_config_file(cfg, value);  // positional: later flags override
    else
      pending.emplace_back(flag, value);
  }
  for (const auto& [k, v] : pending) apply_setting(cfg, k, v);
  return cfg;
}

// ---------------------------------------------------------------------------
// Distribution construction.

namespace detail {

inline Distribution1D make_line_dist(const RunConfig& cfg) {
  const std::string kind = cfg.dist.empty() ? "rademacher" : cfg.dist;
  try {
    if (kind == "rademacher") return dist::rademacher();
    if (kind == "two_point")
      return dist::make_perturbed_rademacher(dist::Family1D::two_point,
                                             cfg.param);
    if (kind == "four_point")
      return dist::make_perturbed_rademacher(dist::Family1D::four_point,
                                             cfg.param);
    if (kind == "noise")
      return dist::make_perturbed_rademacher(dist::Family1D::noise, cfg.param);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("param", e.what());
  }
  throw ConfigError("dist", "'" + kind +
                                "' is not a 1D magnitude law (use rademacher, "
                                "two_point, four_point, or noise)");
}

inline RadialDist3D make_radial_dist(const RunConfig& cfg) {
  const std::string kind = cfg.dist.empty() ? "sphere" : cfg.dist;
  try {
    if (kind == "sphere") return dist::make_radial(dist::RadialKind::sphere, 0.0);
    if (kind == "scaled")
      return dist::make_radial(dist::RadialKind::scaled, cfg.param);
    if (kind == "two_point" || kind == "radial_two_point")
      return dist::make_radial(dist::RadialKind::two_point, cfg.param);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("param", e.what());
  }
  throw ConfigError("dist", "'" + kind +
                                "' is not a 3D radial law (use sphere, "
                                "scaled, or two_point)");
}

inline UnitVector make_vector(const RunConfig& cfg) {
  if (cfg.random_vec) {
    return verify::random_unit_vector(cfg.rand_n, cfg.rand_seed,
                                      cfg.rand_small);
  }
  if (cfg.vector_text.empty())
    throw ConfigError("vector", "this command needs --vector or --random-vector");
  try {
    return UnitVector::normalized(parse_vector("vector", cfg.vector_text));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("vector", e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Execution results.

struct ScanRow {
  double s = 0.0, value = 0.0, uncertainty = 0.0, bound = 0.0, margin = 0.0;
};

struct Execution {
  int exit_code = 0;
  std::vector<LemmaReport> reports;
  std::vector<ScanRow> scan;
  // Free-form result fields in emission order (name, value or text).
  std::vector<std::pair<std::string, double>> numbers;
  std::vector<std::pair<std::string, std::string>> texts;
  std::vector<double> series;  // np-analysis lobe maxima
  std::string series_name;
};

namespace detail {

inline int exit_from_verdict(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    default: return 3;
  }
}

// value/uncertainty/certified triple from any evaluator.
struct EvalPoint {
  double value = 0.0, unc = 0.0;
  bool certified = true;
};

// Unified access to the four sweepable functionals.  The reference bound is
// the benchmark value at s = 2 of the same functional; psi-type targets must
// stay above it, phi-type targets below.
struct Target {
  std::string name;
  bool psi_side = true;  // margin = value - bound (psi) or bound - value (phi)
  std::function<EvalPoint(double)> eval;
  EvalPoint bench;
};

inline Target make_target(const RunConfig& cfg) {
  Target t;
  t.name = cfg.target.empty()
               ? (cfg.command == "eval-psi0"   ? "psi0"
                  : cfg.command == "eval-phi0" ? "phi0"
                  : cfg.command == "eval-psi"  ? "psi"
                                               : "phi")
               : cfg.target;
  const double tol = cfg.tol;
  if (t.name == "psi0") {
    t.psi_side = true;
    t.eval = [](double s) {
      const auto c = specialfn::psi0(s);
      return EvalPoint{c.value, c.unc, c.ok};
    };
  } else if (t.name == "phi0") {
    t.psi_side = false;
    t.eval = [tol](double s) {
      const auto c = specialfn::phi0(s, std::min(tol, 1e-9));
      return EvalPoint{c.value, c.unc, c.ok};
    };
  } else if (t.name == "psi") {
    auto d = make_line_dist(cfg);
    t.psi_side = true;
    t.eval = [d, tol](double s) {
      const auto e = perturbed::psi(s, d, tol);
      return EvalPoint{e.value, e.uncertainty, e.certified};
    };
  } else if (t.name == "phi") {
    auto d = make_radial_dist(cfg);
    t.psi_side = false;
    t.eval = [d, tol](double s) {
      const auto e = perturbed::phi3(s, d, tol);
      return EvalPoint{e.value, e.uncertainty, e.certified};
    };
  } else {
    throw ConfigError("target", "'" + t.name +
                                    "' is not a sweep target (use psi0, "
                                    "phi0, psi, or phi)");
  }
  t.bench = t.eval(2.0);
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Command execution.

inline Execution execute(const RunConfig& cfg) {
  Execution out;

  // Shared by the eval commands and sweep.  Scan rows always carry the
  // benchmark comparison margin; only sweep turns a negative margin into a
  // failed verdict (the eval commands are pure evaluations).
  const auto run_eval_or_sweep = [&cfg, &out](bool parallel, bool enforce) {
    auto target = detail::make_target(cfg);
    std::vector<double> s_values;
    if (cfg.grid)
      s_values = detail::grid_values(*cfg.grid);
    else if (cfg.s)
      s_values = {*cfg.s};
    else
      throw ConfigError("s", "this command needs --s or --s-grid");

    std::vector<detail::EvalPoint> pts(s_values.size());
    if (parallel && s_values.size() > 1) {
      parallel_for(s_values.size(),
                   [&](std::size_t i) { pts[i] = target.eval(s_values[i]); });
    } else {
      for (std::size_t i = 0; i < s_values.size(); ++i)
        pts[i] = target.eval(s_values[i]);
    }

    bool certified = target.bench.certified;
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s_values.size(); ++i) {
      ScanRow row;
      row.s = s_values[i];
      row.value = pts[i].value;
      row.uncertainty = pts[i].unc;
      row.bound = target.bench.value;
      // Margin widened by both uncertainty envelopes: the comparison only
      // counts as violated when it fails beyond everything we cannot resolve.
      const double widen = pts[i].unc + target.bench.unc;
      row.margin = (target.psi_side ? row.value - row.bound
                                    : row.bound - row.value) +
                   widen;
      certified = certified && pts[i].certified;
      if (row.margin < 0.0) ++violations;
      min_margin = std::min(min_margin, row.margin);
      out.scan.push_back(row);
    }
    out.numbers.emplace_back("benchmark", target.bench.value);
    out.numbers.emplace_back("benchmark_uncertainty", target.bench.unc);
    out.numbers.emplace_back("min_margin", min_margin);
    out.numbers.emplace_back("violations", static_cast<double>(violations));
    out.texts.emplace_back("target", target.name);
    out.texts.emplace_back("certified", certified ? "true" : "false");
    if (out.scan.size() == 1) {
      out.numbers.emplace_back("value", out.scan[0].value);
      out.numbers.emplace_back("uncertainty", out.scan[0].uncertainty);
    }
    out.exit_code = (enforce && violations > 0) ? 1 : 0;
  };

  if (cfg.command == "eval-psi0" || cfg.command == "eval-phi0" ||
      cfg.command == "eval-psi" || cfg.command == "eval-phi") {
    run_eval_or_sweep(false, false);
  } else if (cfg.command == "sweep") {
    if (!cfg.grid) throw ConfigError("s-grid", "sweep needs --s-grid");
    if (cfg.target.empty()) throw ConfigError("target", "sweep needs --target");
    run_eval_or_sweep(true, true);
  } else if (cfg.command == "certify-lemmas") {
    const auto summary =
        cfg.families == "none"
            ? verify::certify_all(cfg.tol, {}, {})
            : verify::certify_all(cfg.tol);
    out.reports = summary.reports;
    out.numbers.emplace_back("n_pass", static_cast<double>(summary.n_pass));
    out.numbers.emplace_back("n_fail", static_cast<double>(summary.n_fail));
    out.numbers.emplace_back("n_rejected",
                             static_cast<double>(summary.n_rejected));
    out.texts.emplace_back("all_pass", summary.all_pass ? "true" : "false");
    out.exit_code =
        summary.n_fail > 0 ? 1 : (summary.n_rejected > 0 ? 3 : 0);
  } else if (cfg.command == "verify-szarek") {
    const auto a = detail::make_vector(cfg);
    const auto d = detail::make_line_dist(cfg);
    auto r = verify::verify_szarek(a, d, cfg.tol, cfg.mc_samples, cfg.seed);
    out.exit_code = detail::exit_from_verdict(r.verdict);
    out.reports.push_back(std::move(r));
  } else if (cfg.command == "verify-ball") {
    const auto a = detail::make_vector(cfg);
    const auto d = detail::make_radial_dist(cfg);
    auto r = verify::verify_ball(a, d, cfg.tol, cfg.mc_samples, cfg.seed);
    out.exit_code = detail::exit_from_verdict(r.verdict);
    out.reports.push_back(std::move(r));
  } else if (cfg.command == "np-analysis") {
    const double a = cfg.a_param.value_or(1.0);
    const auto an = verify::np_sign_change(a);
    out.numbers.emplace_back("a_param", an.a_param);
    out.numbers.emplace_back("y0", an.y0);
    out.numbers.emplace_back("crossings", static_cast<double>(an.crossings));
    out.numbers.emplace_back("moment_identity_residual",
                             an.moment_identity_residual);
    out.series = an.lobe_maxima;
    out.series_name = "lobe_maxima";
    const bool ok =
        an.crossings == 1 && std::abs(an.moment_identity_residual) <= 1e-6;
    out.exit_code = ok ? 0 : 1;
    if (cfg.s0) {
      std::vector<double> grid;
      if (cfg.grid)
        grid = detail::grid_values(*cfg.grid);
      else if (cfg.s)
        grid = {*cfg.s};
      else
        throw ConfigError("s-grid",
                          "the majorization check needs --s-grid or --s");
      auto r = verify::np_majorization_check(a, *cfg.s0, grid, cfg.tol);
      const int e = detail::exit_from_verdict(r.verdict);
      out.reports.push_back(std::move(r));
      if (e == 1 || out.exit_code == 1)
        out.exit_code = 1;  // a failed verdict dominates
      else if (e != 0)
        out.exit_code = e;
    }
  } else if (cfg.command.empty()) {
    throw ConfigError("command", "no command given (see --help)");
  } else {
    throw ConfigError("command", "unknown command '" + cfg.command + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report emission.

namespace detail {

inline void write_config_echo(JsonWriter& w, const RunConfig& cfg) {
  w.key("config").begin_object();
  w.key("command").value(cfg.command);
  w.key("dist").value(cfg.dist.empty() ? std::string("(default)") : cfg.dist);
  w.key("param").value(cfg.param);
  if (cfg.random_vec) {
    w.key("random_vector").begin_object();
    w.key("n").value(cfg.rand_n);
    w.key("seed").value(cfg.rand_seed);
    w.key("small_coeff").value(cfg.rand_small);
    w.end_object();
  } else {
    w.key("vector").value(cfg.vector_text);
  }
  if (cfg.s) w.key("s").value(*cfg.s);
  if (cfg.grid) {
    w.key("s_grid").begin_object();
    w.key("min").value(cfg.grid->lo);
    w.key("max").value(cfg.grid->hi);
    w.key("points").value(cfg.grid->points);
    w.key("spacing").value(cfg.grid->log_spacing ? "log" : "lin");
    w.end_object();
  }
  w.key("tol").value(cfg.tol);
  w.key("mc_samples").value(cfg.mc_samples);
  w.key("seed").value(cfg.seed);
  if (cfg.a_param) w.key("a_param").value(*cfg.a_param);
  if (cfg.s0) w.key("s0").value(*cfg.s0);
  if (!cfg.target.empty()) w.key("target").value(cfg.target);
  if (cfg.command == "certify-lemmas") w.key("families").value(cfg.families);
  w.key("threads").value(static_cast<std::size_t>(effective_thread_count()));
  w.end_object();
}

inline std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

inline std::string render_json(const RunConfig& cfg, const Execution& out,
                               double wall_ms) {
  JsonWriter w;
  w.begin_object();
  w.key("schema").value(kSchema);
  w.key("tool").value("khinchin-lab");
  w.key("version").value(kVersion);
  w.key("timestamp").value(detail::utc_timestamp());
  w.key("wall_ms").value(wall_ms);
  w.key("command").value(cfg.command);
  detail::write_config_echo(w, cfg);

  w.key("results").begin_object();
  for (const auto& [k, v] : out.texts) w.key(k).value(v);
  for (const auto& [k, v] : out.numbers) w.key(k).value(v);
  if (!out.series.empty()) {
    w.key(out.series_name).begin_array();
    for (double v : out.series) w.value(v);
    w.end_array();
  }
  w.end_object();

  if (!out.scan.empty()) {
    w.key("scan_columns").begin_array();
    for (const char* c : {"s", "value", "uncertainty", "bound", "margin"})
      w.value(c);
    w.end_array();
    w.key("scan").begin_array();
    for (const auto& row : out.scan) {
      w.begin_array();
      w.value(row.s).value(row.value).value(row.uncertainty);
      w.value(row.bound).value(row.margin);
      w.end_array();
    }
    w.end_array();
  }

  w.key("reports").begin_array();
  for (const auto& r : out.reports) report::write_json(w, r);
  w.end_array();

  w.key("exit").value(out.exit_code);
  w.end_object();
  return w.str() + "\n";
}

inline std::string render_csv(const Execution& out) {
  std::string csv = "s,value,uncertainty,bound,margin\n";
  for (const auto& row : out.scan) {
    csv += report::json_number(row.s) + "," + report::json_number(row.value) +
           "," + report::json_number(row.uncertainty) + "," +
           report::json_number(row.bound) + "," +
           report::json_number(row.margin) + "\n";
  }
  return csv;
}

// ---------------------------------------------------------------------------
// Entry point.

inline int run(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--help") == 0 ||
        std::strcmp(argv[i], "-h") == 0) {
      std::fputs(kUsage, stdout);
      return 0;
    }
  }
  try {
    const RunConfig cfg = parse_command_line(argc, argv);
    const auto t0 = std::chrono::steady_clock::now();
    const Execution out = execute(cfg);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - t0)
            .count();

    const std::string json = render_json(cfg, out, wall_ms);
    std::fputs(json.c_str(), stdout);
    if (!cfg.output_path.empty()) {
      std::ofstream f(cfg.output_path);
      if (!f) throw ConfigError("output", "cannot write '" + cfg.output_path + "'");
      f << json;
    }
    if (!cfg.csv_path.empty()) {
      std::ofstream f(cfg.csv_path);
      if (!f) throw ConfigError("csv", "cannot write '" + cfg.csv_path + "'");
      f << render_csv(out);
    }
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "rejected: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace khinchin::cli
