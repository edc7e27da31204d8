#include "aggrestab/analysis.hpp"

#include "aggrestab/error.hpp"
#include "aggrestab/format.hpp"

#include <algorithm>
#include <cmath>

namespace aggrestab {

const char* to_string(RateNorm n) {
  switch (n) {
    case RateNorm::l1: return "l1";
    case RateNorm::l2: return "l2";
    case RateNorm::linf: return "linf";
  }
  return "l2";
}

RateFit fit_rate(const Trajectory& traj, RateNorm norm, double offset, const RateWindow& window) {
  require(window.t_hi > window.t_lo, "rate window is empty");
  const double p = norm == RateNorm::l1 ? 1.0 : (norm == RateNorm::l2 ? 2.0 : kInf);

  double first_t = kInf, last_t = -kInf;
  for (double t : traj.times) {
    if (t < window.t_lo || t > window.t_hi) continue;
    first_t = std::min(first_t, t);
    last_t = std::max(last_t, t);
  }
  if (!(last_t > first_t)) fail(ErrorCode::fit_failure, "fewer than 10 snapshots inside the rate window");
  const double start = first_t + window.skip_fraction * (last_t - first_t);

  std::vector<double> ts, ys;
  double reference = 0.0;
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    const double t = traj.times[j];
    if (t < start || t > window.t_hi) continue;
    Field f = traj.snapshots[j];
    f.values.array() -= offset;
    const double v = lp_norm(f, p);
    if (ts.empty()) reference = v;
    if (!(v > 0.0) || !std::isfinite(v) || v < window.floor * reference || v > window.ceiling * reference) break;
    ts.push_back(t);
    ys.push_back(std::log(v));
  }
  if (ts.size() < 10) {
    fail(ErrorCode::fit_failure, "only " + std::to_string(ts.size()) + " usable snapshots in the rate window");
  }

  const double count = static_cast<double>(ts.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    mt += ts[j];
    my += ys[j];
  }
  mt /= count;
  my /= count;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    stt += (ts[j] - mt) * (ts[j] - mt);
    sty += (ts[j] - mt) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  RateFit fit;
  fit.t_lo = ts.front();
  fit.t_hi = ts.back();
  fit.samples_used = ts.size();
  const double slope = sty / stt;
  fit.rate = -slope;
  if (syy <= 1e-24 * count * std::max(1.0, my * my)) {
    fit.degenerate = true;
    fit.rate = 0.0;
    fit.r_squared = 0.0;
  } else {
    fit.r_squared = std::clamp(slope * sty / syy, 0.0, 1.0);
  }
  return fit;
}

ThresholdResult threshold_bisect(const KernelSpec& spec, const Grid1D& grid, double M_lo, double M_hi,
                                 double tol_M) {
  require(M_lo >= 0.0 && M_hi > M_lo, "threshold bracket needs 0 <= M_lo < M_hi", ErrorCode::invalid_bracket);
  require(tol_M > 0.0, "threshold tolerance must be positive");
  const auto km = std::make_shared<const KernelMatrices>(assemble(spec, grid));
  ThresholdResult out;
  auto eig = [&](double M) {
    const double e = principal_eigenpair(assemble_linearized(grid, km, M)).lambda;
    out.history.push_back({M, e});
    return e;
  };
  const double e_lo = eig(M_lo);
  const double e_hi = eig(M_hi);
  if (!(e_lo > 0.0 && e_hi < 0.0)) {
    fail(ErrorCode::invalid_bracket, "no sign change of the principal eigenvalue on [" + format_double(M_lo) + ", " +
                                         format_double(M_hi) + "] (" + format_double(e_lo) + ", " +
                                         format_double(e_hi) + ")");
  }
  double lo = M_lo, hi = M_hi;
  while (hi - lo > tol_M) {
    const double mid = 0.5 * (lo + hi);
    (eig(mid) > 0.0 ? lo : hi) = mid;
  }
  out.M_lo = lo;
  out.M_hi = hi;
  out.M_critical = 0.5 * (lo + hi);
  return out;
}

BasinProbe basin_probe(const KernelSpec& spec, const Grid1D& grid, double M, double amplitude_hi, std::size_t steps,
                       const BasinOptions& options) {
  require(amplitude_hi >= 0.0, "basin amplitude must be nonnegative");
  const auto km = std::make_shared<const KernelMatrices>(assemble(spec, grid));
  const StabilityReport report = stability_verdict(km, M);
  require(report.verdict == Verdict::linearly_stable_sufficient,
          "basin probing needs a verified linearly stable state (verdict " + std::string(to_string(report.verdict)) +
              ")");

  BasinProbe out;
  out.M = M;
  out.t_end = std::min(options.max_t_end, options.horizon_factor / report.principal_eigenvalue);

  const SpectralBasis basis(grid);
  const Field w1 = basis.mode(1);
  auto classify = [&](double a) {
    BasinSample s{a, 0.0, true};
    if (a > 0.0) {
      SimConfig cfg;
      cfg.n = grid.n();
      cfg.kernel = spec;
      cfg.mode = SimMode::perturbed;
      cfg.M = M;
      cfg.t_end = out.t_end;
      cfg.output_interval = out.t_end;
      const Field phi0(grid, a * w1.values);
      const Trajectory traj = evolve(cfg, phi0, km);
      s.final_ratio = lp_norm(traj.snapshots.back(), 2.0) / lp_norm(phi0, 2.0);
      s.decayed = s.final_ratio <= options.decay_fraction;
    }
    out.history.push_back(s);
    return s.decayed;
  };

  if (classify(amplitude_hi)) {
    out.eta_estimate = amplitude_hi;
    out.open_above = true;
    return out;
  }
  double lo = 0.0, hi = amplitude_hi;
  for (std::size_t i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (classify(mid) ? lo : hi) = mid;
  }
  out.eta_estimate = lo;
  out.eta_fail = hi;
  return out;
}

CrossValidation cross_validate(const Field& u0, const KernelSpec& spec, double T,
                               const MildSolveOptions& mild_options, std::optional<double> evolve_dt) {
  const auto km = std::make_shared<const KernelMatrices>(assemble(spec, u0.grid));
  CrossValidation out;
  out.mild = picard_mild_solve(u0, km, T, mild_options);

  SimConfig cfg;
  cfg.n = u0.grid.n();
  cfg.kernel = spec;
  cfg.mode = SimMode::nonlinear;
  cfg.t_end = T;
  cfg.dt = evolve_dt;
  cfg.output_interval = T / static_cast<double>(mild_options.time_steps);
  const Trajectory mol = evolve(cfg, u0, km);

  const auto& mild = out.mild.final_iterate;
  double best_gap = kInf;
  for (std::size_t j = 0; j < mild.times.size(); ++j) {
    const auto it = std::find_if(mol.times.begin(), mol.times.end(),
                                 [&](double t) { return std::abs(t - mild.times[j]) <= 1e-12 * T; });
    if (it == mol.times.end()) continue;
    const auto& other = mol.snapshots[static_cast<std::size_t>(it - mol.times.begin())];
    const double d = (mild.snapshots[j].values - other.values).cwiseAbs().maxCoeff();
    out.max_discrepancy = std::max(out.max_discrepancy, d);
    const double gap = std::abs(mild.times[j] - 0.5 * T);
    if (gap < best_gap) {
      best_gap = gap;
      out.discrepancy_at_half = d;
      out.time_at_half = mild.times[j];
    }
  }
  require(std::isfinite(best_gap), "no shared output times between the two solvers", ErrorCode::grid_mismatch);
  return out;
}

}  // namespace aggrestab
