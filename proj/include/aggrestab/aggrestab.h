#ifndef AGGRESTAB_AGGRESTAB_H
#define AGGRESTAB_AGGRESTAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(AGGRESTAB_BUILDING_LIBRARY)
#define AGGRESTAB_API __attribute__((visibility("default")))
#else
#define AGGRESTAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aggrestab_status {
  AGGRESTAB_OK = 0,
  AGGRESTAB_INVALID_PARAMETER = 1,
  AGGRESTAB_SINGULARITY = 2,
  AGGRESTAB_GRID_MISMATCH = 3,
  AGGRESTAB_CONVERGENCE = 4,
  AGGRESTAB_UNSUPPORTED_KERNEL = 5,
  AGGRESTAB_REJECTED_STEP = 6,
  AGGRESTAB_SCHEME_FAILURE = 7,
  AGGRESTAB_NO_EXISTENCE_TIME = 8,
  AGGRESTAB_NON_CONTRACTION = 9,
  AGGRESTAB_INVALID_BRACKET = 10,
  AGGRESTAB_FIT_FAILURE = 11,
  AGGRESTAB_LOAD = 12,
  AGGRESTAB_IO = 13,
  AGGRESTAB_CONFIG = 14,
  AGGRESTAB_INTERNAL = 99
} aggrestab_status;

typedef struct aggrestab_kernel aggrestab_kernel;
typedef struct aggrestab_config aggrestab_config;
typedef struct aggrestab_trajectory aggrestab_trajectory;

typedef enum aggrestab_verdict {
  AGGRESTAB_LINEARLY_STABLE_SUFFICIENT = 0,
  AGGRESTAB_LINEARLY_UNSTABLE = 1,
  AGGRESTAB_INCONCLUSIVE = 2
} aggrestab_verdict;

typedef enum aggrestab_singularity {
  AGGRESTAB_MILDLY_SINGULAR = 0,
  AGGRESTAB_STRONGLY_SINGULAR = 1,
  AGGRESTAB_UNDETERMINED = 2
} aggrestab_singularity;

typedef struct aggrestab_stability {
  double M;
  double lambda1;
  double grad_norm;
  double A;
  double critical_mass_instability;
  double stability_bound_mass;
  double principal_eigenvalue;
  aggrestab_verdict verdict;
} aggrestab_stability;

typedef struct aggrestab_diagnostics {
  double t;
  double mass;
  double l1;
  double l2;
  double linf;
  double min_u;
} aggrestab_diagnostics;

AGGRESTAB_API const char* aggrestab_version(void);
/* Message of the last failed call on this thread, "" if none. */
AGGRESTAB_API const char* aggrestab_last_error(void);
AGGRESTAB_API const char* aggrestab_status_name(aggrestab_status status);

AGGRESTAB_API aggrestab_status aggrestab_kernel_green(double a, aggrestab_kernel** out);
AGGRESTAB_API aggrestab_status aggrestab_kernel_gaussian(double sigma, double c, aggrestab_kernel** out);
AGGRESTAB_API aggrestab_status aggrestab_kernel_power_law(double alpha, double delta, aggrestab_kernel** out);
AGGRESTAB_API aggrestab_status aggrestab_kernel_zero(aggrestab_kernel** out);
AGGRESTAB_API aggrestab_status aggrestab_kernel_load_csv(const char* path, size_t n, aggrestab_kernel** out);
AGGRESTAB_API void aggrestab_kernel_free(aggrestab_kernel* kernel);

AGGRESTAB_API aggrestab_status aggrestab_compute_A(const aggrestab_kernel* kernel, size_t n, double* out);
AGGRESTAB_API aggrestab_status aggrestab_operator_norm(const aggrestab_kernel* kernel, size_t n, uint64_t seed,
                                                       double* out);
AGGRESTAB_API aggrestab_status aggrestab_stability_verdict(const aggrestab_kernel* kernel, size_t n, double M,
                                                           aggrestab_stability* out);
AGGRESTAB_API aggrestab_status aggrestab_threshold(const aggrestab_kernel* kernel, size_t n, double M_lo,
                                                   double M_hi, double tol_M, double* out);
AGGRESTAB_API aggrestab_status aggrestab_classify(const aggrestab_kernel* kernel, aggrestab_singularity* kind,
                                                  double* critical_q_prime);

AGGRESTAB_API aggrestab_status aggrestab_config_load(const char* path, aggrestab_config** out);
AGGRESTAB_API aggrestab_status aggrestab_config_parse(const char* text, aggrestab_config** out);
AGGRESTAB_API void aggrestab_config_free(aggrestab_config* config);

AGGRESTAB_API aggrestab_status aggrestab_simulate(const aggrestab_config* config, aggrestab_trajectory** out);
AGGRESTAB_API size_t aggrestab_trajectory_size(const aggrestab_trajectory* traj);
AGGRESTAB_API aggrestab_status aggrestab_trajectory_diagnostics(const aggrestab_trajectory* traj, size_t index,
                                                                aggrestab_diagnostics* out);
/* Copies snapshot `index` into values[0..n). */
AGGRESTAB_API aggrestab_status aggrestab_trajectory_snapshot(const aggrestab_trajectory* traj, size_t index,
                                                             double* values, size_t n);
AGGRESTAB_API void aggrestab_trajectory_free(aggrestab_trajectory* traj);

/* Runs a CLI subcommand; *exit_code receives the process exit code even when the call fails. */
AGGRESTAB_API aggrestab_status aggrestab_run(const char* command, const aggrestab_config* config,
                                             const char* out_dir, unsigned jobs, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
