#include "aggrestab/aggrestab.h"

#include "aggrestab/analysis.hpp"
#include "aggrestab/commands.hpp"

#include <functional>
#include <iostream>
#include <sstream>

struct aggrestab_kernel {
  aggrestab::KernelSpec spec;
};

struct aggrestab_config {
  aggrestab::RunConfig config;
};

struct aggrestab_trajectory {
  aggrestab::Trajectory traj;
};

namespace {

thread_local std::string last_error;

aggrestab_status to_status(aggrestab::ErrorCode c) { return static_cast<aggrestab_status>(static_cast<int>(c)); }

template <class F>
aggrestab_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return AGGRESTAB_OK;
  } catch (const aggrestab::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return AGGRESTAB_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return AGGRESTAB_INTERNAL;
  }
}

template <class T>
T& deref(T* p, const char* what) {
  if (!p) aggrestab::fail(aggrestab::ErrorCode::invalid_parameter, std::string("null ") + what);
  return *p;
}

std::string text_arg(const char* p, const char* what) { return &deref(p, what); }

aggrestab_status make_kernel(aggrestab_kernel** out, const std::function<aggrestab::KernelSpec()>& make) {
  return guarded([&] {
    deref(out, "output pointer");
    *out = new aggrestab_kernel{make()};
  });
}

}  // namespace

extern "C" {

const char* aggrestab_version(void) { return "0.1.0"; }

const char* aggrestab_last_error(void) { return last_error.c_str(); }

const char* aggrestab_status_name(aggrestab_status status) {
  if (status == AGGRESTAB_OK) return "ok";
  if (status == AGGRESTAB_INTERNAL) return "internal";
  if (status < AGGRESTAB_INVALID_PARAMETER || status > AGGRESTAB_CONFIG) return "unknown";
  return aggrestab::to_string(static_cast<aggrestab::ErrorCode>(static_cast<int>(status)));
}

aggrestab_status aggrestab_kernel_green(double a, aggrestab_kernel** out) {
  return make_kernel(out, [a] {
    return a == 1.0 ? aggrestab::KernelSpec::green_closed_form() : aggrestab::KernelSpec::green_series(a);
  });
}

aggrestab_status aggrestab_kernel_gaussian(double sigma, double c, aggrestab_kernel** out) {
  return make_kernel(out, [=] { return aggrestab::KernelSpec::gaussian(sigma, c); });
}

aggrestab_status aggrestab_kernel_power_law(double alpha, double delta, aggrestab_kernel** out) {
  return make_kernel(out, [=] { return aggrestab::KernelSpec::power_law_gradient(alpha, delta); });
}

aggrestab_status aggrestab_kernel_zero(aggrestab_kernel** out) {
  return make_kernel(out, [] { return aggrestab::KernelSpec::zero(); });
}

aggrestab_status aggrestab_kernel_load_csv(const char* path, size_t n, aggrestab_kernel** out) {
  return make_kernel(out, [=] { return aggrestab::load_tabulated_csv(text_arg(path, "path"), aggrestab::Grid1D(n)); });
}

void aggrestab_kernel_free(aggrestab_kernel* kernel) { delete kernel; }

aggrestab_status aggrestab_compute_A(const aggrestab_kernel* kernel, size_t n, double* out) {
  return guarded([&] {
    const aggrestab::Grid1D grid(n);
    deref(out, "output pointer") =
        aggrestab::compute_A(aggrestab::assemble(deref(kernel, "kernel").spec, grid), aggrestab::SpectralBasis(grid));
  });
}

aggrestab_status aggrestab_operator_norm(const aggrestab_kernel* kernel, size_t n, uint64_t seed, double* out) {
  return guarded([&] {
    const auto km = aggrestab::assemble(deref(kernel, "kernel").spec, aggrestab::Grid1D(n));
    deref(out, "output pointer") = aggrestab::l2_operator_norm(km, true, seed);
  });
}

aggrestab_status aggrestab_stability_verdict(const aggrestab_kernel* kernel, size_t n, double M,
                                             aggrestab_stability* out) {
  return guarded([&] {
    const auto r = aggrestab::stability_verdict(deref(kernel, "kernel").spec, aggrestab::Grid1D(n), M);
    auto& o = deref(out, "output pointer");
    o.M = r.M;
    o.lambda1 = r.lambda1;
    o.grad_norm = r.grad_norm;
    o.A = r.A;
    o.critical_mass_instability = r.critical_mass_instability;
    o.stability_bound_mass = r.stability_bound_mass;
    o.principal_eigenvalue = r.principal_eigenvalue;
    o.verdict = static_cast<aggrestab_verdict>(static_cast<int>(r.verdict));
  });
}

aggrestab_status aggrestab_threshold(const aggrestab_kernel* kernel, size_t n, double M_lo, double M_hi,
                                     double tol_M, double* out) {
  return guarded([&] {
    deref(out, "output pointer") =
        aggrestab::threshold_bisect(deref(kernel, "kernel").spec, aggrestab::Grid1D(n), M_lo, M_hi, tol_M).M_critical;
  });
}

aggrestab_status aggrestab_classify(const aggrestab_kernel* kernel, aggrestab_singularity* kind,
                                    double* critical_q_prime) {
  return guarded([&] {
    const auto& spec = deref(kernel, "kernel").spec;
    const auto c = spec.variant() == aggrestab::KernelVariant::tabulated
                       ? aggrestab::classify(spec, {spec.table()->grid.n()})
                       : aggrestab::classify(spec);
    deref(kind, "kind pointer") = static_cast<aggrestab_singularity>(static_cast<int>(c.kind));
    if (critical_q_prime) *critical_q_prime = c.critical_q_prime;
  });
}

aggrestab_status aggrestab_config_load(const char* path, aggrestab_config** out) {
  return guarded([&] {
    auto cfg = aggrestab::load_run_config(text_arg(path, "path"));
    aggrestab::apply_environment(cfg);
    deref(out, "output pointer");
    *out = new aggrestab_config{std::move(cfg)};
  });
}

aggrestab_status aggrestab_config_parse(const char* text, aggrestab_config** out) {
  return guarded([&] {
    std::istringstream in(text_arg(text, "text"));
    auto cfg = aggrestab::parse_run_config(in);
    aggrestab::apply_environment(cfg);
    deref(out, "output pointer");
    *out = new aggrestab_config{std::move(cfg)};
  });
}

void aggrestab_config_free(aggrestab_config* config) { delete config; }

aggrestab_status aggrestab_simulate(const aggrestab_config* config, aggrestab_trajectory** out) {
  return guarded([&] {
    auto traj = aggrestab::evolve(deref(config, "config").config.sim);
    deref(out, "output pointer");
    *out = new aggrestab_trajectory{std::move(traj)};
  });
}

size_t aggrestab_trajectory_size(const aggrestab_trajectory* traj) { return traj ? traj->traj.times.size() : 0; }

aggrestab_status aggrestab_trajectory_diagnostics(const aggrestab_trajectory* traj, size_t index,
                                                  aggrestab_diagnostics* out) {
  return guarded([&] {
    const auto& t = deref(traj, "trajectory").traj;
    aggrestab::require(index < t.times.size(), "snapshot index out of range");
    const auto& d = t.diagnostics[index];
    deref(out, "output pointer") = {t.times[index], d.mass, d.l1, d.l2, d.linf, d.min};
  });
}

aggrestab_status aggrestab_trajectory_snapshot(const aggrestab_trajectory* traj, size_t index, double* values,
                                               size_t n) {
  return guarded([&] {
    const auto& t = deref(traj, "trajectory").traj;
    aggrestab::require(index < t.times.size(), "snapshot index out of range");
    const auto& v = t.snapshots[index].values;
    aggrestab::require(n == static_cast<size_t>(v.size()), "buffer length differs from the grid size",
                       aggrestab::ErrorCode::grid_mismatch);
    deref(values, "values");
    for (size_t i = 0; i < n; ++i) values[i] = v[static_cast<Eigen::Index>(i)];
  });
}

void aggrestab_trajectory_free(aggrestab_trajectory* traj) { delete traj; }

aggrestab_status aggrestab_run(const char* command, const aggrestab_config* config, const char* out_dir,
                               unsigned jobs, int* exit_code) {
  int code = static_cast<int>(aggrestab::ExitCode::usage);
  const aggrestab_status s = guarded([&] {
    const std::string name = text_arg(command, "command");
    if (!aggrestab::is_command(name)) {
      aggrestab::fail(aggrestab::ErrorCode::config, "unknown command '" + name + "'");
    }
    code = static_cast<int>(aggrestab::run_command(name, deref(config, "config").config, out_dir ? out_dir : "",
                                                   jobs == 0 ? 1 : jobs, std::cerr));
  });
  if (s != AGGRESTAB_OK) {
    code = s == AGGRESTAB_INTERNAL ? 70 : static_cast<int>(aggrestab::exit_code_for(
                                              static_cast<aggrestab::ErrorCode>(static_cast<int>(s))));
  }
  if (exit_code) *exit_code = code;
  return s;
}

}  // extern "C"
