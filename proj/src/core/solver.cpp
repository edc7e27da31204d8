#include "aggrestab/solver.hpp"

#include "aggrestab/error.hpp"
#include "aggrestab/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace aggrestab {

const char* to_string(SimMode m) {
  switch (m) {
    case SimMode::nonlinear: return "nonlinear";
    case SimMode::perturbed: return "perturbed";
    case SimMode::linearized: return "linearized";
  }
  return "nonlinear";
}

SimMode parse_sim_mode(const std::string& s) {
  if (s == "nonlinear") return SimMode::nonlinear;
  if (s == "perturbed") return SimMode::perturbed;
  if (s == "linearized") return SimMode::linearized;
  fail(ErrorCode::config, "unknown simulation mode '" + s + "'");
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) fail(ErrorCode::config, "bad number '" + s + "' in " + what);
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorCode::config, "bad integer '" + s + "' in " + what);
  return v;
}

double uniform_pm1(std::mt19937_64& rng) { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; }

// Backward-Euler Neumann diffusion: solves (I - dt Lap) v = rhs with the Thomas algorithm.
Eigen::VectorXd implicit_diffusion(const Eigen::VectorXd& rhs, double r) {
  const Eigen::Index n = rhs.size();
  Eigen::VectorXd c(n), d(n);
  auto diag = [&](Eigen::Index i) { return 1.0 + r * ((i > 0) + (i + 1 < n)); };
  double b = diag(0);
  c[0] = -r / b;
  d[0] = rhs[0] / b;
  for (Eigen::Index i = 1; i < n; ++i) {
    b = diag(i) + r * c[i - 1];
    c[i] = -r / b;
    d[i] = (rhs[i] + r * d[i - 1]) / b;
  }
  Eigen::VectorXd v(n);
  v[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) v[i] = d[i] - c[i] * v[i + 1];
  return v;
}

}  // namespace

InitialDatum InitialDatum::parse(const std::string& descriptor) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) fail(ErrorCode::config, "initial datum '" + descriptor + "' lacks a ':'");
  const std::string kind = descriptor.substr(0, colon);
  const std::string rest = descriptor.substr(colon + 1);
  if (kind == "csv") {
    if (rest.empty()) fail(ErrorCode::config, "csv initial datum needs a path");
    return InitialDatum(Csv{rest});
  }
  const auto args = split(rest, ',');
  if (kind == "constant") {
    if (args.size() != 1) fail(ErrorCode::config, "constant:<M> takes one argument");
    return InitialDatum(Constant{parse_real(args[0], descriptor)});
  }
  if (kind == "constant_plus_mode") {
    if (args.size() != 3) fail(ErrorCode::config, "constant_plus_mode:<M>,<amplitude>,<k> takes three arguments");
    const auto k = parse_uint(args[2], descriptor);
    if (k < 1) fail(ErrorCode::config, "constant_plus_mode needs k >= 1");
    return InitialDatum(ConstantPlusMode{parse_real(args[0], descriptor), parse_real(args[1], descriptor), k});
  }
  if (kind == "random_zero_mean") {
    if (args.size() != 2) fail(ErrorCode::config, "random_zero_mean:<amplitude>,<seed> takes two arguments");
    return InitialDatum(RandomZeroMean{parse_real(args[0], descriptor), parse_uint(args[1], descriptor)});
  }
  fail(ErrorCode::config, "unknown initial datum kind '" + kind + "'");
}

Field InitialDatum::build(const Grid1D& grid, double base) const {
  return std::visit(
      [&](const auto& d) -> Field {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return Field::constant(grid, d.value);
        } else if constexpr (std::is_same_v<T, ConstantPlusMode>) {
          require(d.k < grid.n(), "mode index must be below the grid size");
          const double kp = static_cast<double>(d.k) * kPi;
          return Field::from_function(grid, [&](double x) {
            return d.level * (1.0 + d.amplitude * std::sqrt(2.0) * std::cos(kp * x));
          });
        } else if constexpr (std::is_same_v<T, RandomZeroMean>) {
          Field f = random_zero_mean_field(grid, d.amplitude, d.seed);
          f.values.array() += base;
          return f;
        } else {
          std::ifstream in(d.path);
          if (!in) fail(ErrorCode::io, "cannot open initial datum " + d.path);
          std::vector<double> vals;
          std::string line;
          while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            vals.push_back(parse_real(line, d.path));
          }
          if (vals.size() != grid.n()) {
            fail(ErrorCode::load, "initial datum " + d.path + " has " + std::to_string(vals.size()) +
                                      " values, grid has " + std::to_string(grid.n()));
          }
          return Field(grid, Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
        }
      },
      data_);
}

Field random_zero_mean_field(const Grid1D& grid, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field f(grid);
  const std::size_t top = std::min<std::size_t>(16, grid.n() - 1);
  for (std::size_t k = 1; k <= 16; ++k) {
    const double coeff = uniform_pm1(rng) / static_cast<double>(k);
    if (k > top) continue;
    const double kp = static_cast<double>(k) * kPi;
    for (std::size_t i = 0; i < grid.n(); ++i) {
      f.values[static_cast<Eigen::Index>(i)] += coeff * std::sqrt(2.0) * std::cos(kp * grid.center(i));
    }
  }
  f = project_zero_mean(f);
  const double norm = lp_norm(f, 2.0);
  if (norm > 0.0) f.values *= amplitude / norm;
  return f;
}

Diagnostics diagnose(const Field& f) {
  return Diagnostics{mass(f), lp_norm(f, 1.0), lp_norm(f, 2.0), lp_norm(f, kInf), f.values.minCoeff()};
}

void Trajectory::record(double t, const Field& f) {
  times.push_back(t);
  snapshots.push_back(f);
  diagnostics.push_back(diagnose(f));
}

FaceVector transport_velocity(const Field& state, SimMode mode, double M, const KernelMatrices& km) {
  FaceVector v = apply_grad(km, state);
  v[0] = 0.0;
  v[v.size() - 1] = 0.0;
  if (mode == SimMode::linearized) v *= M;
  return v;
}

double auto_dt(const Field& state, const KernelMatrices& km, SimMode mode, double M) {
  const double h = state.grid.h();
  const double vmax = transport_velocity(state, mode, M, km).cwiseAbs().maxCoeff();
  return std::min(h / (2.0 * vmax + 1e-30), 10.0 * h * h);
}

Field step_imex(const Field& state, double dt, SimMode mode, double M, const KernelMatrices& km) {
  require(dt > 0.0, "time step must be positive");
  require(state.grid == km.grid, "state and kernel grids differ", ErrorCode::grid_mismatch);
  const double h = state.grid.h();
  const auto n = static_cast<Eigen::Index>(state.grid.n());
  const FaceVector v = transport_velocity(state, mode, M, km);
  const double admissible = h / (2.0 * v.cwiseAbs().maxCoeff() + 1e-30);
  if (dt > admissible * (1.0 + 1e-12)) throw RejectedStep(dt, admissible);

  const Eigen::VectorXd& u = state.values;
  const double offset = (mode == SimMode::perturbed) ? M : 0.0;
  FaceVector flux = FaceVector::Zero(n + 1);
  for (Eigen::Index f = 1; f < n; ++f) {
    if (mode == SimMode::linearized) {
      flux[f] = v[f];
    } else {
      flux[f] = v[f] * (offset + (v[f] > 0.0 ? u[f - 1] : u[f]));
    }
  }
  Eigen::VectorXd explicit_state(n);
  for (Eigen::Index i = 0; i < n; ++i) explicit_state[i] = u[i] - dt * (flux[i + 1] - flux[i]) / h;

  const Eigen::VectorXd implicit = implicit_diffusion(explicit_state, dt / (h * h));
  // total face flux: transport minus diffusion, applied once so the update telescopes
  for (Eigen::Index f = 1; f < n; ++f) flux[f] -= (implicit[f] - implicit[f - 1]) / h;
  Field next(state.grid);
  for (Eigen::Index i = 0; i < n; ++i) next.values[i] = u[i] - dt * (flux[i + 1] - flux[i]) / h;
  return next;
}

Trajectory evolve(const SimConfig& config) {
  const Grid1D grid(config.n);
  const Field initial = InitialDatum::parse(config.initial).build(grid, config.M);
  const Field start = (config.mode == SimMode::nonlinear) ? initial : [&] {
    Field phi = initial;
    phi.values.array() -= config.M;
    return phi;
  }();
  return evolve(config, start, std::make_shared<const KernelMatrices>(assemble(config.kernel, grid)));
}

Trajectory evolve(const SimConfig& config, const Field& initial, const std::shared_ptr<const KernelMatrices>& km) {
  require(config.t_end > 0.0, "t_end must be positive");
  require(config.M >= 0.0, "M must be nonnegative");
  require(!config.dt || *config.dt > 0.0, "fixed dt must be positive");
  require(config.output_interval >= 0.0, "output interval must be nonnegative");
  require(km && initial.grid == km->grid, "initial datum and kernel grids differ", ErrorCode::grid_mismatch);
  if (config.mode == SimMode::nonlinear) {
    require(initial.values.minCoeff() >= 0.0, "nonlinear mode needs a nonnegative initial datum");
  } else {
    const double m = mass(initial);
    const double ref = std::max({1.0, config.M, lp_norm(initial, 1.0)});
    require(std::abs(m) <= 1e-12 * ref,
            "perturbed/linearized modes need a zero-mean perturbation (mass " + format_double(m) + ")");
  }

  Trajectory traj;
  Field state = initial;
  traj.record(0.0, state);
  const double mass0 = mass(state);
  const double mass_ref = std::max(std::abs(mass0), lp_norm(state, 1.0));

  double t = 0.0;
  std::size_t next_index = 1;
  const auto next_output = [&] {
    return config.output_interval > 0.0
               ? std::min(config.t_end, static_cast<double>(next_index) * config.output_interval)
               : config.t_end;
  };
  while (t < config.t_end) {
    const double target = next_output();
    double dt = config.dt ? *config.dt : auto_dt(state, *km, config.mode, config.M);
    double t_new = t + dt;
    if (t_new >= target - 1e-12 * std::max(1.0, target)) {
      dt = target - t;
      t_new = target;
    }
    state = step_imex(state, dt, config.mode, config.M, *km);
    t = t_new;
    ++traj.steps;

    if (config.mode == SimMode::nonlinear) {
      const double lo = state.values.minCoeff();
      if (lo < -config.positivity_tol) {
        fail(ErrorCode::scheme_failure, "positivity lost at t=" + format_double(t) + " (min " + format_double(lo) +
                                            "); reduce dt or refine the grid");
      }
      const double drift = std::abs(mass(state) - mass0);
      if (mass_ref > 0.0 && drift > config.mass_tol * mass_ref) {
        fail(ErrorCode::scheme_failure, "mass drift " + format_double(drift / mass_ref) + " at t=" + format_double(t));
      }
    }
    if (config.output_interval == 0.0 || t == target) {
      traj.record(t, state);
      if (t == target) ++next_index;
    }
  }
  return traj;
}

Field heat_semigroup(const SpectralBasis& basis, const Field& f, double t) {
  require(t >= 0.0, "heat semigroup needs t >= 0");
  if (t == 0.0) return f;
  Eigen::VectorXd c = basis.to_spectral(f);
  for (Eigen::Index k = 1; k < c.size(); ++k) c[k] *= std::exp(-basis.lambda_discrete(static_cast<std::size_t>(k)) * t);
  return basis.from_spectral(c);
}

std::vector<NamedProbe> default_probe_set(std::uint64_t seed) {
  auto cosine = [](std::size_t k) {
    return [k](const Grid1D& g) {
      const double kp = static_cast<double>(k) * kPi;
      return Field::from_function(g, [kp](double x) { return std::sqrt(2.0) * std::cos(kp * x); });
    };
  };
  return {
      {"w1", cosine(1)},
      {"w3", cosine(3)},
      {"random_zero_mean", [seed](const Grid1D& g) { return random_zero_mean_field(g, 1.0, seed); }},
      {"smoothed_indicator",
       [](const Grid1D& g) {
         return Field::from_function(
             g, [](double x) { return 0.5 * (std::tanh((x - 0.3) / 0.02) - std::tanh((x - 0.6) / 0.02)); });
       }},
  };
}

std::vector<double> log_time_grid(double t_lo, double t_hi, std::size_t points_per_octave) {
  require(t_lo > 0.0 && t_hi > t_lo, "time grid needs 0 < t_lo < t_hi");
  require(points_per_octave >= 1, "time grid needs at least one point per octave");
  std::vector<double> t;
  for (std::size_t k = 0;; ++k) {
    const double v = t_lo * std::exp2(static_cast<double>(k) / static_cast<double>(points_per_octave));
    if (v >= t_hi * (1.0 - 1e-12)) break;
    t.push_back(v);
  }
  t.push_back(t_hi);
  return t;
}

ProbeReport semigroup_probe(const Grid1D& grid, const std::vector<NamedProbe>& probes, double p, double q,
                            const std::vector<double>& t_grid) {
  require(q >= 1.0 && p >= q, "semigroup probe needs 1 <= q <= p <= inf");
  for (double t : t_grid) require(t > 0.0, "probe times must be positive");
  const SpectralBasis basis(grid);
  const double e = 0.5 * (1.0 / q - (std::isinf(p) ? 0.0 : 1.0 / p));
  const double lambda1 = SpectralBasis::lambda(1);

  ProbeReport r;
  r.p = p;
  r.q = q;
  r.t_grid = t_grid;
  for (const auto& probe : probes) {
    const Field f = probe.make(grid);
    // the mean does not move and has no gradient; dropping it keeps round-off out of the gradient term
    const Field f0 = project_zero_mean(f);
    const double fq = lp_norm(f, q);
    double c1 = 0.0, c2 = 0.0;
    if (fq > 0.0) {
      for (double t : t_grid) {
        c1 = std::max(c1, lp_norm(heat_semigroup(basis, f, t), p) / ((1.0 + std::pow(t, -e)) * fq));
        const FaceVector d = gradient(heat_semigroup(basis, f0, t));
        c2 = std::max(c2, face_lp_norm(grid, d, p) * std::pow(t, e + 0.5) * std::exp(lambda1 * t) / fq);
      }
    }
    r.per_probe_C1.push_back(c1);
    r.per_probe_C2.push_back(c2);
    r.C1 = std::max(r.C1, c1);
    r.C2 = std::max(r.C2, c2);
  }
  return r;
}

ProbeRefinement semigroup_probe_refinement(std::size_t n, const std::vector<NamedProbe>& probes, double p, double q,
                                           double t_lo, double t_hi, std::size_t points_per_octave,
                                           double tolerance) {
  ProbeRefinement out;
  out.coarse = semigroup_probe(Grid1D(n), probes, p, q, log_time_grid(t_lo, t_hi, points_per_octave));
  out.refined = semigroup_probe(Grid1D(2 * n), probes, p, q, log_time_grid(t_lo, t_hi, 2 * points_per_octave));
  auto rel = [](double a, double b) { return a == 0.0 ? (b == 0.0 ? 0.0 : kInf) : std::abs(b - a) / a; };
  out.change_C1 = rel(out.coarse.C1, out.refined.C1);
  out.change_C2 = rel(out.coarse.C2, out.refined.C2);
  out.stable = std::isfinite(out.refined.C1) && std::isfinite(out.refined.C2) && out.change_C1 <= tolerance &&
               out.change_C2 <= tolerance;
  return out;
}

double conjugate_exponent(double q_prime) {
  require(q_prime >= 1.0, "q' must lie in [1, inf]");
  if (std::isinf(q_prime)) return 1.0;
  if (q_prime == 1.0) return kInf;
  return q_prime / (q_prime - 1.0);
}

double existence_time(const Field& u0, double kernel_norm, double q, double q_prime, double C_emp) {
  require(C_emp > 0.0, "empirical semigroup constant must be positive");
  require(q >= 1.0 && q_prime >= 1.0, "exponents must lie in [1, inf]");
  const double inv_sum = (std::isinf(q) ? 0.0 : 1.0 / q) + (std::isinf(q_prime) ? 0.0 : 1.0 / q_prime);
  require(std::abs(inv_sum - 1.0) <= 1e-12, "q and q' must be conjugate");
  if (!std::isfinite(kernel_norm)) {
    fail(ErrorCode::no_existence_time, "kernel gradient norm is infinite; no existence time");
  }
  if (kernel_norm == 0.0) return kInf;

  double exponent = 0.5;
  double data_norm = lp_norm(u0, 1.0);
  if (q_prime > 1.0) {
    // d = 1: (1/2)(1 - d(1 - 1/q))
    exponent = 0.5 * (1.0 - (1.0 - (std::isinf(q) ? 0.0 : 1.0 / q)));
  } else {
    data_norm += lp_norm(u0, q);
  }
  if (data_norm == 0.0) return kInf;
  return std::pow(1.0 / (4.0 * C_emp * kernel_norm * data_norm), 1.0 / exponent);
}

}  // namespace aggrestab
