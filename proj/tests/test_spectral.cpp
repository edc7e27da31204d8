#include "doctest.h"
#include "oracles.hpp"

#include "aggrestab/error.hpp"
#include "aggrestab/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

using namespace aggrestab;

namespace {

const double pi2 = oracle::pi * oracle::pi;

std::shared_ptr<const KernelMatrices> green(std::size_t n) {
  return std::make_shared<const KernelMatrices>(assemble(KernelSpec::green_closed_form(), Grid1D(n)));
}

// Smallest nonzero real eigenvalue of the full operator, general (non-symmetric) solver.
double smallest_nonconstant_eigenvalue(const Eigen::MatrixXd& L) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(L, false);
  std::vector<double> ev;
  for (Eigen::Index i = 0; i < L.rows(); ++i) ev.push_back(es.eigenvalues()[i].real());
  std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  ev.erase(ev.begin());  // the constant mode
  return *std::min_element(ev.begin(), ev.end());
}

}  // namespace

TEST_CASE("bilinear form") {
  const Grid1D g(256);
  const auto km = green(256);
  const Field one = Field::constant(g, 1.0);
  const Field w1 = SpectralBasis(g).mode(1);
  CHECK(bilinear_form(assemble_linearized(g, km, 3.0), one, one) == doctest::Approx(0.0));
  CHECK(bilinear_form(assemble_linearized(g, km, 0.0), w1, w1) == doctest::Approx(pi2).epsilon(0.005));
  CHECK(bilinear_form(assemble_linearized(g, km, 2 * (1 + pi2)), w1, w1) == doctest::Approx(-pi2).epsilon(0.01));
}

TEST_CASE("linearized operator structure") {
  const std::size_t n = 64;
  const Grid1D g(n);
  const double h = g.h();
  const auto lop0 = assemble_linearized(g, green(n), 0.0);
  // M = 0: negated three-point Neumann Laplacian
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    if (i > 0) {
      lap(i, i - 1) = -1.0 / (h * h);
      lap(i, i) += 1.0 / (h * h);
    }
    if (i + 1 < static_cast<Eigen::Index>(n)) {
      lap(i, i + 1) = -1.0 / (h * h);
      lap(i, i) += 1.0 / (h * h);
    }
  }
  CHECK((lop0.matrix - lap).cwiseAbs().maxCoeff() <= 1e-8);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  for (int k = 1; k <= 3; ++k) CHECK(es.eigenvalues()[k] == doctest::Approx(k * k * pi2).epsilon(0.01 * k * k));

  const Grid1D g2(256);
  const auto km = green(256);
  const Field w1 = SpectralBasis(g2).mode(1);
  for (double M : {0.0, 4.0, 12.0, 20.0}) {
    const auto lop = assemble_linearized(g2, km, M);
    const Eigen::VectorXd lw = lop.matrix * w1.values;
    const Eigen::VectorXd ref = pi2 * (1.0 - M / (1.0 + pi2)) * w1.values;
    CHECK((lw - ref).norm() <= 0.01 * std::max(ref.norm(), pi2 * w1.values.norm() * 0.05));
    CHECK((lop.matrix * Eigen::VectorXd::Ones(256)).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + M) / (g2.h() * g2.h()));
    const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(oracle::random_vector(256, 9).data(), 256);
    CHECK(std::abs(g2.h() * (lop.matrix * f).sum()) <= 1e-12 * (lop.matrix * f).cwiseAbs().maxCoeff() * 256);
  }
}

TEST_CASE("principal eigenpair") {
  const Grid1D g(256);
  const auto km = green(256);
  const Field w1 = SpectralBasis(g).mode(1);

  const EigenPair e0 = principal_eigenpair(assemble_linearized(g, km, 0.0));
  CHECK(e0.lambda == doctest::Approx(pi2).epsilon(0.001));
  CHECK(lp_norm(Field(g, e0.mode.values - w1.values), 2.0) <= 0.02);

  const EigenPair ec = principal_eigenpair(assemble_linearized(g, km, 1.0 + pi2));
  CHECK(std::abs(ec.lambda) <= 0.01 * pi2);
  CHECK(lp_norm(Field(g, ec.mode.values - w1.values), 2.0) <= 0.02);

  const EigenPair e2 = principal_eigenpair(assemble_linearized(g, km, 2 * (1 + pi2)));
  CHECK(e2.lambda == doctest::Approx(-pi2).epsilon(0.01));

  // general eigensolver on the full operator as an independent check
  const Grid1D gs(64);
  const auto small = green(64);
  for (double M : {0.0, 8.0, 15.0}) {
    const auto lop = assemble_linearized(gs, small, M);
    CHECK(principal_eigenpair(lop).lambda == doctest::Approx(smallest_nonconstant_eigenvalue(lop.matrix)).epsilon(1e-6));
  }

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(8, 8);
  k(0, 1) = 1.0;
  const Grid1D g8(8);
  const auto asym = std::make_shared<const KernelMatrices>(
      assemble(KernelSpec::tabulated({g8, k, Eigen::MatrixXd::Zero(9, 8)}), g8));
  try {
    principal_eigenpair(assemble_linearized(g8, asym, 1.0));
    FAIL("expected unsupported kernel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unsupported_kernel);
  }
}

TEST_CASE("instability constant") {
  // A = 1/(a + lambda_1)
  const Grid1D g(512);
  const SpectralBasis b(g);
  CHECK(std::abs(compute_A(assemble(KernelSpec::green_closed_form(), g), b) - 1.0 / (1.0 + pi2)) <= 1e-6);
  CHECK(std::abs(compute_A(assemble(KernelSpec::green_series(4.0), g), b) - 1.0 / (4.0 + pi2)) <= 1e-5);
  CHECK(compute_A(assemble(KernelSpec::zero(), g), b) == 0.0);
  CHECK(std::abs(1.0 / (1.0 + pi2) - 0.0919997) <= 1e-7);
}

TEST_CASE("stability verdicts") {
  const auto km = green(256);
  const auto r5 = stability_verdict(km, 5.0);
  CHECK(r5.verdict == Verdict::linearly_stable_sufficient);
  CHECK(r5.principal_eigenvalue > 0.0);
  CHECK(5.0 * r5.grad_norm == doctest::Approx(1.445).epsilon(0.002));

  const auto r12 = stability_verdict(km, 12.0);
  CHECK(r12.verdict == Verdict::linearly_unstable);
  CHECK(r12.principal_eigenvalue < 0.0);
  CHECK_FALSE(r12.eigen_sign_mismatch);

  const auto r0 = stability_verdict(km, 0.0);
  CHECK(r0.verdict == Verdict::linearly_stable_sufficient);
  CHECK(r0.stability_margin == doctest::Approx(oracle::pi));

  const auto rz = stability_verdict(KernelSpec::zero(), Grid1D(64), 100.0);
  CHECK(rz.verdict == Verdict::linearly_stable_sufficient);
  CHECK(std::isnan(rz.critical_mass_instability));
}

TEST_CASE("sharpness of the two thresholds") {
  const auto r = stability_verdict(green(512), 1.0);
  CHECK(r.stability_bound_mass == doctest::Approx(1.0 + pi2).epsilon(0.005));
  CHECK(r.critical_mass_instability == doctest::Approx(1.0 + pi2).epsilon(0.005));
  CHECK(r.stability_bound_mass == doctest::Approx(r.critical_mass_instability).epsilon(0.005));
}

TEST_CASE("principal eigenvalue is affine and decreasing in M") {
  const Grid1D g(128);
  const auto km = green(128);
  double prev = kInf;
  for (int i = 0; i < 10; ++i) {
    const double M = 2.0 * (1.0 + pi2) * i / 9.0;
    const double e = principal_eigenpair(assemble_linearized(g, km, M)).lambda;
    CHECK(e <= prev + 1e-9);
    prev = e;
    CHECK(std::abs(e - pi2 * (1.0 - M / (1.0 + pi2))) <= 0.01 * pi2);
  }
}

TEST_CASE("report serialisation") {
  const auto r = stability_verdict(green(64), 12.0);
  const std::string row = to_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 7);
  CHECK(row.substr(row.rfind(',') + 1) == "linearly_unstable");
  CHECK(std::string(kStabilityCsvHeader) == "M,lambda1,grad_norm,A,M_crit_instab,M_bound_stab,principal_eig,verdict");
  CHECK(to_key_value(r).find("verdict=linearly_unstable") != std::string::npos);
}
