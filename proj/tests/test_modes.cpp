#include <cmath>
#include <complex>

#include "doctest.h"
#include "milne/modes.hpp"

using namespace milne;

TEST_CASE("mode right-hand side and quadratic form") {
  const ModeRhs r = mode_rhs({0.5, 2.0, -1.0});
  CHECK(r.du == -1.0);
  CHECK(r.dw == doctest::Approx(2.0 - 9.0 * 0.5 * 2.0));
  const ModeRhs f = mode_rhs({0.5, 0.0, 0.0}, ModeForcing{0.25, 0.5});
  CHECK(f.dw == doctest::Approx(18.0 * 0.5 * 0.25));
  CHECK(mode_quadratic({1.0, 1.0, 2.0}, 0.5) == doctest::Approx(0.5 * 4 + 4.5 + 0.5 * 2));
  // eigenvalues of [[4.5 l, c/2], [c/2, 1/2]]
  const double l = 1.0 / 9.0, c = 0.99;
  const double tr = 4.5 * l + 0.5, det = 4.5 * l * 0.5 - c * c / 4;
  CHECK(quadform_min_eig(l, c) == doctest::Approx(tr / 2 - std::sqrt(tr * tr / 4 - det)));
  CHECK(quadform_min_eig(l, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("RK4 against the exact damped oscillator") {
  // u'' + 2u' + 9 lambda u = 0, roots -1 +- sqrt(1 - 9 lambda)
  for (double lambda : {0.2, 1.0, 2.0}) {
    ModeIntegration opt;
    opt.Tend = 5.0;
    opt.h = 1e-3;
    const ModeTrajectory tr = integrate_mode({lambda, 1.0, 0.0}, opt);
    const std::complex<double> r1 = -1.0 + std::sqrt(std::complex<double>(1.0 - 9.0 * lambda));
    const std::complex<double> r2 = -1.0 - std::sqrt(std::complex<double>(1.0 - 9.0 * lambda));
    // u(0) = 1, u'(0) = 0
    const std::complex<double> A = -r2 / (r1 - r2), B = r1 / (r1 - r2);
    const double u = (A * std::exp(r1 * 5.0) + B * std::exp(r2 * 5.0)).real();
    CHECK(tr.states.back().u == doctest::Approx(u).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("cE = alpha = 1: dE/dT + 2E = 0 identically") {
  const CorrectionConstants cc = correction_constants(1.0, 1e-4);
  for (double lambda : {0.2, 5.0 / 9.0, 1.0, 2.0}) {
    ModeIntegration opt;
    opt.Tend = 10.0;
    const ModeTrajectory tr = integrate_mode({lambda, 1.0, 0.3}, opt);
    const DecayCheck d = energy_decay_check(tr, cc, 6);
    CHECK(d.max_identity_residual < 1e-12);
    CHECK(d.holds);
  }
}

TEST_CASE("borderline lambda = 1/9: dE/dT <= -2 (0.9) E with epsPrime = 1/900") {
  const CorrectionConstants cc = correction_constants(1.0 / 9.0, 1.0 / 900.0);
  ModeIntegration opt;
  opt.Tend = 10.0;
  opt.h = 1e-2;
  for (double w0 : {-1.0, 0.0, 1.0}) {
    const ModeTrajectory tr = integrate_mode({1.0 / 9.0, 1.0, w0}, opt);
    CHECK(tr.T.size() == 1001);
    const DecayCheck d = energy_decay_check(tr, cc, 6);
    CHECK(d.holds);
    for (std::size_t k = 0; k < d.dE.size(); ++k) CHECK(d.dE[k] <= d.bound[k]);
  }
  // cE = 1 at the borderline loses coercivity and the inequality
  CorrectionConstants bad;
  bad.lambda0 = 1.0 / 9.0;
  CHECK(quadform_min_eig(1.0 / 9.0, bad.cE) <= 1e-15);
}

TEST_CASE("corrected energy: order sums, contracts") {
  const CorrectionConstants cc = correction_constants(1.0, 1e-4);
  const ModeState st{2.0, 0.5, 0.1};
  const ModeEnergy e1 = corrected_energy({{st, 1.0}}, cc, 1);
  const ModeEnergy e3 = corrected_energy({{st, 1.0}}, cc, 3);
  CHECK(e3.Es == doctest::Approx(e1.Es * (1 + 2.0 + 4.0)));
  CHECK(corrected_energy({{st, 2.0}}, cc, 1).Es == doctest::Approx(2.0 * e1.Es));
  CHECK_THROWS(corrected_energy({{st, 1.0}}, cc, 0));
  CHECK_THROWS(corrected_energy({{st, 1.0}}, cc, kMaxEnergyOrder + 1));
  CHECK_THROWS(corrected_energy({{{0.1, 1.0, 0.0}, 1.0}}, cc, 1));
  CHECK_THROWS(corrected_energy({{st, -1.0}}, cc, 1));
}

TEST_CASE("sweep: rates of sqrt(E_s) approach alpha(lambda), serial = parallel") {
  ModeSweepOptions opt;
  opt.integ.Tend = 20.0;
  opt.epsPrime = 1e-4;
  const std::vector<double> grid{1.0 / 9.0, 0.2, 1.0, 2.0};
  const auto a = sweep_modes(grid, opt, Exec::serial);
  const auto b = sweep_modes(grid, opt, Exec::parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a[i].fitted_rate == b[i].fitted_rate);
    CHECK(std::abs(0.5 * a[i].fitted_rate - a[i].alpha) < 0.05);
    CHECK(a[i].min_quadform_eig > 0.0);
  }
  CHECK(a[0].alpha == doctest::Approx(1.0 - std::sqrt(9e-4)));  // alpha = 1 - sqrt(9 epsPrime)
}
