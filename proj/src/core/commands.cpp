#include "aggrestab/commands.hpp"

#include "aggrestab/analysis.hpp"
#include "aggrestab/format.hpp"
#include "aggrestab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace aggrestab {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory " + dir + ": " + ec.message());
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) fail(ErrorCode::io, "write to " + path.string() + " failed");
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

std::string qp_label(double q) { return std::isinf(q) ? "inf" : format_double(q); }

ExitCode cmd_validate_kernel(const RunConfig& cfg, const std::string& out_dir) {
  const Grid1D grid(cfg.n);
  const ValidationReport r = validate_assumptions(cfg.kernel, grid, cfg.assumption_tol, cfg.q_primes);
  const bool tab = cfg.kernel.variant() == KernelVariant::tabulated;
  const Classification c = tab ? classify(cfg.kernel, {cfg.n}) : classify(cfg.kernel);

  bool pass = true;
  if (cfg.check_boundary) pass = pass && r.boundary_ok;
  if (cfg.check_mass_neutral) pass = pass && r.mass_neutral_ok;
  if (cfg.check_norm) pass = pass && r.norm_ok;

  std::ostringstream os;
  os << "kernel=" << cfg.kernel.describe() << "\n";
  os << "n=" << cfg.n << "\n";
  os << "tol=" << format_double(r.tol) << "\n";
  os << "boundary_residual=" << format_double(r.boundary_residual) << "\n";
  os << "boundary_ok=" << yes_no(r.boundary_ok) << "\n";
  os << "mass_neutral_residual=" << format_double(r.mass_neutral_residual) << "\n";
  os << "mass_neutral_ok=" << yes_no(r.mass_neutral_ok) << "\n";
  for (const auto& e : r.norms) {
    os << "norm_inf_qprime[" << qp_label(e.q_prime) << "]=" << format_double(e.value) << "\n";
  }
  os << "norm_ok=" << yes_no(r.norm_ok) << "\n";
  os << "symmetry_residual=" << format_double(r.symmetry_residual) << "\n";
  os << "hs_norm=" << format_double(r.hs_norm) << "\n";
  os << "classification=" << to_string(c.kind) << "\n";
  os << "critical_q_prime=" << format_double(c.critical_q_prime) << "\n";
  for (const auto& e : c.probes) {
    os << "probe[" << qp_label(e.q_prime) << "]=" << format_double(e.value)
       << " growth=" << format_double(e.growth_ratio) << (e.ambiguous ? " ambiguous" : "") << "\n";
  }
  os << "checked=" << (cfg.check_boundary ? "boundary," : "") << (cfg.check_mass_neutral ? "mass_neutral," : "")
     << (cfg.check_norm ? "norm" : "") << "\n";
  os << "status=" << (pass ? "pass" : "fail") << "\n";
  write_file(out_dir, "kernel_report.txt", os.str());
  return pass ? ExitCode::ok : ExitCode::validation_failed;
}

ExitCode cmd_analyze(const RunConfig& cfg, const std::string& out_dir, unsigned jobs) {
  const Grid1D grid(cfg.n);
  const auto km = std::make_shared<const KernelMatrices>(assemble(cfg.kernel, grid));
  const std::vector<double> masses = cfg.analyze_M.empty() ? std::vector<double>{cfg.sim.M} : cfg.analyze_M;

  std::vector<std::string> rows(masses.size());
  std::vector<std::exception_ptr> errors(masses.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < masses.size(); i = next++) {
      try {
        rows[i] = to_csv_row(stability_verdict(km, masses[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(masses.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::string body = std::string(kStabilityCsvHeader) + "\n";
  for (const auto& r : rows) body += r + "\n";
  write_file(out_dir, "stability_report.csv", body);
  return ExitCode::ok;
}

ExitCode cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  const Trajectory traj = evolve(cfg.sim);
  std::ostringstream os;
  os << "t,mass,l1,l2,linf,min_u\n";
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const auto& d = traj.diagnostics[j];
    os << format_double(traj.times[j]) << ',' << format_double(d.mass) << ',' << format_double(d.l1) << ','
       << format_double(d.l2) << ',' << format_double(d.linf) << ',' << format_double(d.min) << '\n';
  }
  write_file(out_dir, "trajectory.csv", os.str());

  if (cfg.write_snapshots) {
    const Grid1D grid(cfg.n);
    std::ostringstream ss;
    ss << 'x';
    for (double t : traj.times) ss << ",t=" << format_double(t);
    ss << '\n';
    for (std::size_t i = 0; i < grid.n(); ++i) {
      ss << format_double(grid.center(i));
      for (const auto& s : traj.snapshots) ss << ',' << format_double(s.values[static_cast<Eigen::Index>(i)]);
      ss << '\n';
    }
    write_file(out_dir, "snapshots.csv", ss.str());
  }
  return ExitCode::ok;
}

std::string picard_csv(const std::vector<double>& dist, double T) {
  std::ostringstream os;
  os << "iteration,distance_XT,ratio\n";
  for (std::size_t j = 0; j < dist.size(); ++j) {
    os << (j + 1) << ',' << format_double(dist[j]) << ',';
    if (j > 0) os << format_double(dist[j - 1] > 0.0 ? dist[j] / dist[j - 1] : 0.0);
    os << '\n';
  }
  os << "T_existence=" << format_double(T) << '\n';
  return os.str();
}

ExitCode cmd_mild_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& diag) {
  const Grid1D grid(cfg.n);
  const Field u0 = InitialDatum::parse(cfg.sim.initial).build(grid, cfg.sim.M);
  const double q_prime = cfg.q_primes.front();
  const double q = conjugate_exponent(q_prime);

  std::vector<std::size_t> levels;
  if (cfg.kernel.variant() == KernelVariant::tabulated) {
    levels = {cfg.n};
  } else {
    levels = {cfg.n / 4, cfg.n / 2, cfg.n};
  }
  const KernelNormEstimate norm = norm_inf_qprime(cfg.kernel, q_prime, levels);
  if (norm.infinite || norm.ambiguous) {
    fail(ErrorCode::no_existence_time, "kernel gradient norm at q'=" + qp_label(q_prime) +
                                           (norm.infinite ? " diverges" : " has no settled refinement trend"));
  }
  double C = 0.0;
  if (cfg.C_emp) {
    C = *cfg.C_emp;
  } else {
    const double p = std::isinf(q) ? kInf : q;
    C = semigroup_probe(grid, default_probe_set(cfg.seed), p, q, log_time_grid(1e-3, 5.0, 4)).C2;
  }
  const double T_est = existence_time(u0, norm.value, q, q_prime, C);
  double T = cfg.mild_T.value_or(T_est * cfg.mild_T_factor);
  if (!std::isfinite(T)) T = cfg.sim.t_end;
  diag << "kernel_norm=" << format_double(norm.value) << " C_emp=" << format_double(C)
       << " T_estimate=" << format_double(T_est) << " T=" << format_double(T) << "\n";

  MildSolveOptions opts;
  opts.time_steps = cfg.mild_steps;
  opts.max_iterations = cfg.mild_iterations;
  opts.tol = cfg.mild_tol;
  opts.q = std::isinf(q) ? kInf : q;
  const auto km = std::make_shared<const KernelMatrices>(assemble(cfg.kernel, grid));
  try {
    const MildSolveDiagnostics d = picard_mild_solve(u0, km, T, opts);
    for (const auto& w : d.warnings) diag << "warning: " << w << "\n";
    write_file(out_dir, "picard.csv", picard_csv(d.picard_distances, T));
  } catch (const NonContraction& e) {
    write_file(out_dir, "picard.csv", picard_csv(e.history(), T));
    throw;
  }
  return ExitCode::ok;
}

ExitCode cmd_threshold(const RunConfig& cfg, const std::string& out_dir) {
  const ThresholdResult r = threshold_bisect(cfg.kernel, Grid1D(cfg.n), cfg.M_lo, cfg.M_hi, cfg.tol_M);
  std::ostringstream os;
  os << "step,M,principal_eig\n";
  for (std::size_t j = 0; j < r.history.size(); ++j) {
    os << j << ',' << format_double(r.history[j].M) << ',' << format_double(r.history[j].eigenvalue) << '\n';
  }
  os << "M_critical=" << format_double(r.M_critical) << '\n';
  write_file(out_dir, "threshold.csv", os.str());
  return ExitCode::ok;
}

}  // namespace

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config: return ExitCode::usage;
    case ErrorCode::io:
    case ErrorCode::load: return ExitCode::io;
    case ErrorCode::scheme_failure:
    case ErrorCode::rejected_step: return ExitCode::scheme_failure;
    case ErrorCode::non_contraction: return ExitCode::non_contraction;
    case ErrorCode::unsupported_kernel:
    case ErrorCode::singularity:
    case ErrorCode::no_existence_time: return ExitCode::unusable_kernel;
    default: return ExitCode::validation_failed;
  }
}

bool is_command(const std::string& name) {
  return name == "validate-kernel" || name == "analyze" || name == "simulate" || name == "mild-solve" ||
         name == "threshold";
}

ExitCode run_command(const std::string& name, const RunConfig& config, const std::string& out_dir, unsigned jobs,
                     std::ostream& diagnostics) {
  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
  if (name == "validate-kernel") return cmd_validate_kernel(config, dir);
  if (name == "analyze") return cmd_analyze(config, dir, jobs);
  if (name == "simulate") return cmd_simulate(config, dir);
  if (name == "mild-solve") return cmd_mild_solve(config, dir, diagnostics);
  if (name == "threshold") return cmd_threshold(config, dir);
  fail(ErrorCode::config, "unknown command '" + name + "'");
}

}  // namespace aggrestab
