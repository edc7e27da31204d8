#include "doctest.h"
#include "oracles.hpp"

#include "aggrestab/analysis.hpp"
#include "aggrestab/error.hpp"

using namespace aggrestab;

namespace {

const double pi2 = oracle::pi * oracle::pi;

std::shared_ptr<const KernelMatrices> green(std::size_t n) {
  return std::make_shared<const KernelMatrices>(assemble(KernelSpec::green_closed_form(), Grid1D(n)));
}

Trajectory linearized_run(std::size_t n, double M, double t_end) {
  SimConfig cfg;
  cfg.n = n;
  cfg.mode = SimMode::linearized;
  cfg.M = M;
  cfg.t_end = t_end;
  cfg.output_interval = t_end / 200.0;
  return evolve(cfg, SpectralBasis(Grid1D(n)).mode(1), green(n));
}

}  // namespace

TEST_CASE("rate fit on synthetic exponentials") {
  const Grid1D g(16);
  const Field w1 = SpectralBasis(g).mode(1);
  Trajectory t;
  for (int j = 0; j <= 40; ++j) t.record(0.05 * j, Field(g, std::exp(-3.0 * 0.05 * j) * w1.values));
  const RateFit f = fit_rate(t, RateNorm::l2);
  CHECK(f.rate == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.reliable());
  CHECK(f.t_lo == doctest::Approx(0.1));
  CHECK(fit_rate(t, RateNorm::linf).rate == doctest::Approx(3.0).epsilon(1e-12));

  Trajectory c;
  for (int j = 0; j <= 40; ++j) c.record(0.05 * j, w1);
  const RateFit fc = fit_rate(c, RateNorm::l2);
  CHECK(std::abs(fc.rate) <= 1e-10);
  CHECK(fc.degenerate);
  CHECK_FALSE(fc.reliable());

  // offset: the norm of the snapshot minus a constant level
  Trajectory o;
  for (int j = 0; j <= 40; ++j) o.record(0.05 * j, Field(g, 5.0 + std::exp(2.0 * 0.05 * j) * w1.values.array()));
  CHECK(fit_rate(o, RateNorm::l1, 5.0).rate == doctest::Approx(-2.0).epsilon(1e-9));

  // the window stops once the norm leaves the usable range
  Trajectory fast;
  for (int j = 0; j <= 100; ++j) fast.record(0.01 * j, Field(g, std::exp(-40.0 * 0.01 * j) * w1.values));
  const RateFit ff = fit_rate(fast, RateNorm::l2);
  CHECK(ff.samples_used < 101);
  CHECK(ff.rate == doctest::Approx(40.0).epsilon(1e-9));

  Trajectory shortt;
  for (int j = 0; j < 5; ++j) shortt.record(j, w1);
  try {
    fit_rate(shortt, RateNorm::l2);
    FAIL("expected a fit failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::fit_failure);
  }
}

TEST_CASE("rates of the linearized flow") {
  const RateFit f0 = fit_rate(linearized_run(256, 0.0, 0.3), RateNorm::l2);
  CHECK(f0.rate == doctest::Approx(pi2).epsilon(0.02));
  const RateFit f2 = fit_rate(linearized_run(256, 2 * (1 + pi2), 0.3), RateNorm::l2);
  CHECK(f2.rate == doctest::Approx(-pi2).epsilon(0.02));
  CHECK(f2.reliable());
}

TEST_CASE("rates follow the principal eigenvalue across M") {
  const std::size_t n = 128;
  const Grid1D g(n);
  const auto km = green(n);
  for (double M : {0.0, 3.0, 6.0, 16.0, 21.74}) {
    const double mu = principal_eigenpair(assemble_linearized(g, km, M)).lambda;
    const RateFit f = fit_rate(linearized_run(n, M, std::min(2.0, 2.0 / std::abs(mu))), RateNorm::l2);
    CHECK(f.rate == doctest::Approx(mu).epsilon(0.02));
  }
}

TEST_CASE("nonlinear growth matches the linearized rate at small amplitude") {
  const std::size_t n = 128;
  const Grid1D g(n);
  const auto km = green(n);
  const double mu = principal_eigenpair(assemble_linearized(g, km, 12.0)).lambda;
  SimConfig cfg;
  cfg.n = n;
  cfg.mode = SimMode::perturbed;
  cfg.M = 12.0;
  cfg.t_end = 1.5;
  cfg.output_interval = 0.01;
  const Field phi0(g, 1e-3 * SpectralBasis(g).mode(1).values);
  const RateFit f = fit_rate(evolve(cfg, phi0, km), RateNorm::l2);
  CHECK(f.rate == doctest::Approx(mu).epsilon(0.05));
}

TEST_CASE("threshold bisection") {
  const ThresholdResult r1 = threshold_bisect(KernelSpec::green_closed_form(), Grid1D(256), 1.0, 20.0, 0.01);
  CHECK(r1.M_critical == doctest::Approx(1.0 + pi2).epsilon(0.01));
  CHECK(r1.M_hi - r1.M_lo <= 0.01);
  CHECK(r1.history.size() >= 3);

  const ThresholdResult r4 = threshold_bisect(KernelSpec::green_series(4.0), Grid1D(256), 1.0, 30.0, 0.01);
  CHECK(r4.M_critical == doctest::Approx(4.0 + pi2).epsilon(0.01));

  const ThresholdResult coarse = threshold_bisect(KernelSpec::green_closed_form(), Grid1D(128), 1.0, 20.0, 0.01);
  CHECK(std::abs(coarse.M_critical - r1.M_critical) <= 0.01 + 0.01 * r1.M_critical);

  try {
    threshold_bisect(KernelSpec::zero(), Grid1D(64), 1.0, 20.0, 0.01);
    FAIL("expected an invalid bracket");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_bracket);
  }
}

TEST_CASE("basin probing") {
  const Grid1D g(64);
  const BasinProbe b = basin_probe(KernelSpec::green_closed_form(), g, 5.0, 0.1, 3);
  CHECK(b.open_above);
  CHECK(b.eta_estimate == 0.1);
  CHECK(b.history.size() == 1);
  CHECK(b.history[0].final_ratio <= 0.01);

  const BasinProbe z = basin_probe(KernelSpec::green_closed_form(), g, 0.0, 0.0, 2);
  CHECK(z.history[0].decayed);
  const BasinProbe s = basin_probe(KernelSpec::green_closed_form(), g, 0.0, 0.05, 2);
  CHECK(s.open_above);

  CHECK_THROWS_AS(basin_probe(KernelSpec::green_closed_form(), g, 12.0, 0.1, 2), Error);
}
