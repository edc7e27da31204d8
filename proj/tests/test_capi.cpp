#include "doctest.h"

#include "aggrestab/aggrestab.h"

#include <cmath>
#include <string>
#include <vector>

TEST_CASE("kernel handles and scalar queries") {
  aggrestab_kernel* k = nullptr;
  REQUIRE(aggrestab_kernel_green(1.0, &k) == AGGRESTAB_OK);
  const double pi2 = M_PI * M_PI;

  double A = 0.0;
  REQUIRE(aggrestab_compute_A(k, 512, &A) == AGGRESTAB_OK);
  CHECK(std::abs(A - 1.0 / (1.0 + pi2)) <= 1e-6);

  double norm = 0.0;
  REQUIRE(aggrestab_operator_norm(k, 256, 5, &norm) == AGGRESTAB_OK);
  CHECK(norm == doctest::Approx(M_PI / (1.0 + pi2)).epsilon(1e-2));

  aggrestab_stability s{};
  REQUIRE(aggrestab_stability_verdict(k, 128, 12.0, &s) == AGGRESTAB_OK);
  CHECK(s.verdict == AGGRESTAB_LINEARLY_UNSTABLE);
  CHECK(s.principal_eigenvalue < 0.0);

  double mc = 0.0;
  REQUIRE(aggrestab_threshold(k, 128, 1.0, 20.0, 0.01, &mc) == AGGRESTAB_OK);
  CHECK(mc == doctest::Approx(1.0 + pi2).epsilon(0.01));

  aggrestab_singularity kind = AGGRESTAB_UNDETERMINED;
  REQUIRE(aggrestab_classify(k, &kind, nullptr) == AGGRESTAB_OK);
  CHECK(kind == AGGRESTAB_MILDLY_SINGULAR);
  aggrestab_kernel_free(k);
}

TEST_CASE("errors carry status and message") {
  aggrestab_kernel* k = nullptr;
  CHECK(aggrestab_kernel_power_law(2.0, 0.0, &k) == AGGRESTAB_INVALID_PARAMETER);
  CHECK(k == nullptr);
  CHECK(std::string(aggrestab_last_error()).size() > 0);
  CHECK(aggrestab_kernel_green(1.0, nullptr) == AGGRESTAB_INVALID_PARAMETER);
  CHECK(aggrestab_compute_A(nullptr, 64, nullptr) == AGGRESTAB_INVALID_PARAMETER);
  CHECK(aggrestab_kernel_load_csv("/nonexistent.csv", 16, &k) == AGGRESTAB_IO);

  REQUIRE(aggrestab_kernel_zero(&k) == AGGRESTAB_OK);
  CHECK(std::string(aggrestab_last_error()).empty());
  double mc = 0.0;
  CHECK(aggrestab_threshold(k, 64, 1.0, 20.0, 0.01, &mc) == AGGRESTAB_INVALID_BRACKET);
  CHECK(std::string(aggrestab_status_name(AGGRESTAB_INVALID_BRACKET)) == "invalid bracket");
  aggrestab_kernel_free(k);
  aggrestab_kernel_free(nullptr);
}

TEST_CASE("configs, trajectories and commands") {
  aggrestab_config* cfg = nullptr;
  CHECK(aggrestab_config_parse("nonsense=1\n", &cfg) == AGGRESTAB_CONFIG);
  REQUIRE(aggrestab_config_parse("grid.n=32\nsim.initial=constant_plus_mode:1,0.1,1\nsim.t_end=0.01\n"
                                 "sim.output_interval=0.005\n",
                                 &cfg) == AGGRESTAB_OK);
  aggrestab_trajectory* tr = nullptr;
  REQUIRE(aggrestab_simulate(cfg, &tr) == AGGRESTAB_OK);
  REQUIRE(aggrestab_trajectory_size(tr) == 3);
  aggrestab_diagnostics d{};
  REQUIRE(aggrestab_trajectory_diagnostics(tr, 2, &d) == AGGRESTAB_OK);
  CHECK(d.t == doctest::Approx(0.01));
  CHECK(d.mass == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> v(32);
  CHECK(aggrestab_trajectory_snapshot(tr, 0, v.data(), v.size()) == AGGRESTAB_OK);
  CHECK(v[0] == doctest::Approx(1.0 + 0.1 * std::sqrt(2.0) * std::cos(M_PI / 64)));
  CHECK(aggrestab_trajectory_snapshot(tr, 0, v.data(), 16) == AGGRESTAB_GRID_MISMATCH);
  CHECK(aggrestab_trajectory_diagnostics(tr, 9, &d) == AGGRESTAB_INVALID_PARAMETER);
  aggrestab_trajectory_free(tr);

  int code = -1;
  CHECK(aggrestab_run("explode", cfg, "/tmp", 1, &code) == AGGRESTAB_CONFIG);
  CHECK(code == 64);
  const std::string out = "/tmp/aggrestab_capi_run";
  CHECK(aggrestab_run("simulate", cfg, out.c_str(), 1, &code) == AGGRESTAB_OK);
  CHECK(code == 0);
  aggrestab_config_free(cfg);

  REQUIRE(aggrestab_config_parse("kernel.type=zero\n", &cfg) == AGGRESTAB_OK);
  CHECK(aggrestab_run("threshold", cfg, out.c_str(), 1, &code) == AGGRESTAB_INVALID_BRACKET);
  CHECK(code == 2);
  aggrestab_config_free(cfg);
  CHECK(std::string(aggrestab_version()) == "0.1.0");
}
