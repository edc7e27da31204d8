#include "doctest.h"
#include "oracles.hpp"

#include "aggrestab/analysis.hpp"
#include "aggrestab/error.hpp"
#include "aggrestab/solver.hpp"

using namespace aggrestab;

namespace {

std::shared_ptr<const KernelMatrices> kernel(const KernelSpec& s, std::size_t n) {
  return std::make_shared<const KernelMatrices>(assemble(s, Grid1D(n)));
}

}  // namespace

TEST_CASE("X_T distance") {
  const Grid1D g(16);
  const auto a = oracle::random_vector(16, 1);
  const auto b = oracle::random_vector(16, 2);
  std::vector<Field> fa, fb;
  double s1 = 0.0, s2 = 0.0;
  for (int j = 0; j < 3; ++j) {
    std::vector<double> x(16), y(16), d(16);
    for (int i = 0; i < 16; ++i) {
      x[i] = a[i] * (j + 1);
      y[i] = b[i];
      d[i] = x[i] - y[i];
    }
    fa.emplace_back(g, Eigen::Map<Eigen::VectorXd>(x.data(), 16));
    fb.emplace_back(g, Eigen::Map<Eigen::VectorXd>(y.data(), 16));
    s1 = std::max(s1, oracle::lp(d, 1.0));
    s2 = std::max(s2, oracle::lp(d, 2.0));
  }
  CHECK(xt_distance(fa, fb, 2.0) == doctest::Approx(s1 + s2).epsilon(1e-13));
  CHECK_THROWS_AS(xt_distance(fa, {fb[0]}, 2.0), Error);
}

TEST_CASE("zero kernel gives the heat flow in one iteration") {
  const Grid1D g(64);
  const Field u0 = InitialDatum::parse("random_zero_mean:0.5,4").build(g, 1.0);
  const auto d = picard_mild_solve(u0, kernel(KernelSpec::zero(), 64), 0.1);
  CHECK(d.converged);
  CHECK(d.picard_distances.size() == 1);
  CHECK(d.picard_distances[0] == 0.0);
  const SpectralBasis b(g);
  const auto& tr = d.final_iterate;
  for (std::size_t j = 0; j < tr.times.size(); j += 50) {
    CHECK((tr.snapshots[j].values - heat_semigroup(b, u0, tr.times[j]).values).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("constants are fixed by every iterate") {
  const Grid1D g(64);
  const auto d = picard_mild_solve(Field::constant(g, 3.0), kernel(KernelSpec::green_closed_form(), 64), 0.01);
  for (const auto& s : d.final_iterate.snapshots) CHECK((s.values.array() - 3.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("contraction within the existence time") {
  const std::size_t n = 256;
  const Grid1D g(n);
  const Field u0 = InitialDatum::parse("constant_plus_mode:1,0.1,1").build(g);
  const auto kn = norm_inf_qprime(KernelSpec::green_closed_form(), kInf, {64, 128, 256});
  const double C = semigroup_probe(g, default_probe_set(1), 1.0, 1.0, log_time_grid(1e-3, 5.0, 4)).C2;
  const double T = existence_time(u0, kn.value, 1.0, kInf, C);
  CHECK(T > 0.0);

  const auto cv = cross_validate(u0, KernelSpec::green_closed_form(), T);
  const auto& dist = cv.mild.picard_distances;
  CHECK(cv.mild.contraction_ratio < 1.0);
  for (std::size_t j = 1; j < dist.size(); ++j) CHECK(dist[j] < dist[j - 1]);
  CHECK(cv.discrepancy_at_half <= 1e-3);
  CHECK(cv.time_at_half == doctest::Approx(T / 2));
  CHECK(cv.mild.yt_norm > 0.0);
}

TEST_CASE("iteration cap raises non-contraction with the history") {
  const Grid1D g(64);
  const Field u0 = InitialDatum::parse("constant_plus_mode:1,0.5,1").build(g);
  MildSolveOptions opts;
  opts.max_iterations = 3;
  opts.tol = 1e-300;
  try {
    picard_mild_solve(u0, kernel(KernelSpec::green_closed_form(), 64), 1.0, opts);
    FAIL("expected non-contraction");
  } catch (const NonContraction& e) {
    CHECK(e.history().size() == 3);
    CHECK(e.code() == ErrorCode::non_contraction);
  }
}

TEST_CASE("cross validation on trivial data") {
  const Grid1D g(64);
  CHECK(cross_validate(Field::constant(g, 2.0), KernelSpec::green_closed_form(), 0.01).max_discrepancy <= 1e-12);

  MildSolveOptions opts;
  opts.time_steps = 100;
  const Field u0 = InitialDatum::parse("constant_plus_mode:1,0.1,1").build(g);
  CHECK(cross_validate(u0, KernelSpec::zero(), 0.01, opts, 1e-6).max_discrepancy <= 1e-6);
}
