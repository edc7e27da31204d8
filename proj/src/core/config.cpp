#include "aggrestab/config.hpp"

#include "aggrestab/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace aggrestab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Parser {
  std::string where;

  [[noreturn]] void bad(const std::string& msg) const { fail(ErrorCode::config, where + ": " + msg); }

  double real(const std::string& v) const {
    if (v == "inf") return kInf;
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || std::isnan(x)) bad("not a number: '" + v + "'");
    return x;
  }
  double positive(const std::string& v) const {
    const double x = real(v);
    if (!(x > 0.0) || std::isinf(x)) bad("expected a positive finite number, got '" + v + "'");
    return x;
  }
  double nonnegative(const std::string& v) const {
    const double x = real(v);
    if (!(x >= 0.0) || std::isinf(x)) bad("expected a nonnegative finite number, got '" + v + "'");
    return x;
  }
  std::uint64_t integer(const std::string& v) const {
    std::uint64_t x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) bad("not an unsigned integer: '" + v + "'");
    return x;
  }
  bool boolean(const std::string& v) const {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad("not a boolean: '" + v + "'");
  }
  std::vector<double> reals(const std::string& v) const {
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(real(trim(item)));
    if (out.empty()) bad("empty list");
    return out;
  }
};

struct KernelKeys {
  std::string type = "green";
  double a = 1.0;
  std::optional<int> terms;
  double sigma = 0.1;
  double c = 1.0;
  double alpha = 0.5;
  double delta = 0.0;
  std::string path;
  double scale = 1.0;
};

KernelSpec build_kernel(const KernelKeys& k, std::size_t n, const std::string& origin) {
  KernelSpec spec = KernelSpec::zero();
  if (k.type == "green") {
    spec = (k.a == 1.0 && !k.terms) ? KernelSpec::green_closed_form() : KernelSpec::green_series(k.a, k.terms.value_or(4096));
  } else if (k.type == "gaussian") {
    spec = KernelSpec::gaussian(k.sigma, k.c);
  } else if (k.type == "power_law") {
    spec = KernelSpec::power_law_gradient(k.alpha, k.delta);
  } else if (k.type == "tabulated") {
    if (k.path.empty()) fail(ErrorCode::config, origin + ": kernel.path is required for a tabulated kernel");
    spec = load_tabulated_csv(k.path, Grid1D(n));
  } else if (k.type == "zero") {
    return KernelSpec::zero();
  } else {
    fail(ErrorCode::config, origin + ": unknown kernel.type '" + k.type + "'");
  }
  return k.scale == 1.0 ? spec : spec.scaled(k.scale);
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  KernelKeys kk;
  std::optional<double> sim_dt;

  std::map<std::string, std::function<void(const Parser&, const std::string&)>> handlers{
      {"seed", [&](const Parser& p, const std::string& v) { cfg.seed = p.integer(v); }},
      {"grid.n",
       [&](const Parser& p, const std::string& v) {
         cfg.n = p.integer(v);
         if (cfg.n < 4) p.bad("grid.n must be at least 4");
       }},
      {"output.dir", [&](const Parser&, const std::string& v) { cfg.output_dir = v; }},
      {"output.snapshots", [&](const Parser& p, const std::string& v) { cfg.write_snapshots = p.boolean(v); }},
      {"kernel.type", [&](const Parser&, const std::string& v) { kk.type = v; }},
      {"kernel.a", [&](const Parser& p, const std::string& v) { kk.a = p.positive(v); }},
      {"kernel.terms",
       [&](const Parser& p, const std::string& v) {
         const auto m = p.integer(v);
         if (m < 1 || m > 1000000) p.bad("kernel.terms must lie in [1, 1000000]");
         kk.terms = static_cast<int>(m);
       }},
      {"kernel.sigma", [&](const Parser& p, const std::string& v) { kk.sigma = p.positive(v); }},
      {"kernel.c", [&](const Parser& p, const std::string& v) { kk.c = p.real(v); }},
      {"kernel.alpha", [&](const Parser& p, const std::string& v) { kk.alpha = p.positive(v); }},
      {"kernel.delta", [&](const Parser& p, const std::string& v) { kk.delta = p.nonnegative(v); }},
      {"kernel.path", [&](const Parser&, const std::string& v) { kk.path = v; }},
      {"kernel.scale", [&](const Parser& p, const std::string& v) { kk.scale = p.real(v); }},
      {"sim.mode",
       [&](const Parser& p, const std::string& v) {
         try {
           cfg.sim.mode = parse_sim_mode(v);
         } catch (const Error& e) {
           p.bad(e.what());
         }
       }},
      {"sim.M", [&](const Parser& p, const std::string& v) { cfg.sim.M = p.nonnegative(v); }},
      {"sim.t_end", [&](const Parser& p, const std::string& v) { cfg.sim.t_end = p.positive(v); }},
      {"sim.dt", [&](const Parser& p, const std::string& v) { sim_dt = p.positive(v); }},
      {"sim.initial",
       [&](const Parser& p, const std::string& v) {
         try {
           (void)InitialDatum::parse(v);
         } catch (const Error& e) {
           p.bad(e.what());
         }
         cfg.sim.initial = v;
       }},
      {"sim.output_interval", [&](const Parser& p, const std::string& v) { cfg.sim.output_interval = p.nonnegative(v); }},
      {"sim.positivity_tol", [&](const Parser& p, const std::string& v) { cfg.sim.positivity_tol = p.nonnegative(v); }},
      {"sim.mass_tol", [&](const Parser& p, const std::string& v) { cfg.sim.mass_tol = p.nonnegative(v); }},
      {"analysis.tol", [&](const Parser& p, const std::string& v) { cfg.assumption_tol = p.positive(v); }},
      {"analysis.assumptions",
       [&](const Parser& p, const std::string& v) {
         cfg.check_boundary = cfg.check_mass_neutral = cfg.check_norm = false;
         std::istringstream is(v);
         std::string item;
         while (std::getline(is, item, ',')) {
           item = trim(item);
           if (item == "boundary") cfg.check_boundary = true;
           else if (item == "mass_neutral") cfg.check_mass_neutral = true;
           else if (item == "norm") cfg.check_norm = true;
           else if (!item.empty()) p.bad("unknown assumption '" + item + "'");
         }
       }},
      {"analysis.q_prime",
       [&](const Parser& p, const std::string& v) {
         cfg.q_primes = p.reals(v);
         for (double q : cfg.q_primes) {
           if (!(q >= 1.0)) p.bad("q' values must be >= 1");
         }
       }},
      {"analysis.M",
       [&](const Parser& p, const std::string& v) {
         cfg.analyze_M = p.reals(v);
         for (double m : cfg.analyze_M) {
           if (!(m >= 0.0) || std::isinf(m)) p.bad("analysis.M values must be nonnegative and finite");
         }
       }},
      {"analysis.M_lo", [&](const Parser& p, const std::string& v) { cfg.M_lo = p.nonnegative(v); }},
      {"analysis.M_hi", [&](const Parser& p, const std::string& v) { cfg.M_hi = p.positive(v); }},
      {"analysis.tol_M", [&](const Parser& p, const std::string& v) { cfg.tol_M = p.positive(v); }},
      {"analysis.mild_T", [&](const Parser& p, const std::string& v) { cfg.mild_T = p.positive(v); }},
      {"analysis.mild_T_factor", [&](const Parser& p, const std::string& v) { cfg.mild_T_factor = p.positive(v); }},
      {"analysis.mild_steps",
       [&](const Parser& p, const std::string& v) {
         cfg.mild_steps = p.integer(v);
         if (cfg.mild_steps < 1) p.bad("analysis.mild_steps must be at least 1");
       }},
      {"analysis.mild_iterations",
       [&](const Parser& p, const std::string& v) {
         cfg.mild_iterations = p.integer(v);
         if (cfg.mild_iterations < 1) p.bad("analysis.mild_iterations must be at least 1");
       }},
      {"analysis.mild_tol", [&](const Parser& p, const std::string& v) { cfg.mild_tol = p.positive(v); }},
      {"analysis.C_emp", [&](const Parser& p, const std::string& v) { cfg.C_emp = p.positive(v); }},
  };

  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const Parser p{origin + ":" + std::to_string(lineno)};
    const auto eq = t.find('=');
    if (eq == std::string::npos) p.bad("expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    const auto h = handlers.find(key);
    if (h == handlers.end()) p.bad("unknown key '" + key + "'");
    if (seen.count(key)) p.bad("duplicate key '" + key + "'");
    seen[key] = lineno;
    if (value.empty()) p.bad("empty value for '" + key + "'");
    h->second(p, value);
  }
  if (cfg.M_hi <= cfg.M_lo) fail(ErrorCode::config, origin + ": analysis.M_hi must exceed analysis.M_lo");

  cfg.sim.n = cfg.n;
  cfg.sim.dt = sim_dt;
  try {
    cfg.kernel = build_kernel(kk, cfg.n, origin);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io || e.code() == ErrorCode::load || e.code() == ErrorCode::config) throw;
    fail(ErrorCode::config, origin + ": " + e.what());
  }
  cfg.sim.kernel = cfg.kernel;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config " + path);
  return parse_run_config(in, path);
}

void apply_environment(RunConfig& config) {
  const char* s = std::getenv("AGGRESTAB_SEED");
  if (!s || !*s) return;
  const std::string v(s);
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) fail(ErrorCode::config, "AGGRESTAB_SEED is not an unsigned integer");
  config.seed = x;
}

}  // namespace aggrestab
