#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "milne/matter.hpp"
#include "milne/quadrature.hpp"
#include "milne/scenarios.hpp"

using namespace milne;

namespace {
double bump(double q, double f0, double Q) { return q < Q ? f0 * std::pow(1.0 - sq(q / Q), 4) : 0.0; }

// int_0^Q q^2 sqrt(1 + a^2 q^2) dq
double top_hat_rho_integral(double a, double Q) {
  const double z = a * a * Q * Q;
  if (z < 1e-4) return Q * Q * Q * (1.0 / 3.0 + z / 10.0 - z * z / 56.0);  // closed form cancels here
  const double r = std::sqrt(1.0 + a * a * Q * Q);
  return Q * (2.0 * a * a * Q * Q + 1.0) * r / (8.0 * a * a) - std::asinh(a * Q) / (8.0 * a * a * a);
}
}  // namespace

TEST_CASE("radial distribution: construction contracts") {
  CHECK_THROWS_AS(RadialDistribution(0.0, 1.0, {1, 1, 1}), DomainError);
  CHECK_THROWS_AS(RadialDistribution(0.1, 1.0, {1.0}), DomainError);
  CHECK_THROWS_AS(RadialDistribution(0.1, 0.1, {1, -1, 1, 1}), DomainError);
  const RadialDistribution f = RadialDistribution::bump(1.0, 1.0, 64);
  CHECK(f.value(1.5) == 0.0);
  CHECK(f.value(0.0) == doctest::Approx(1.0));
  // even reflection at q = 0
  CHECK(std::abs(f.derivative(0.0)) < 1e-3);  // O(dq^3) from the one-sided stencil data
}

TEST_CASE("top-hat rho matches the closed-form radial integral for any tau") {
  const double f0 = 2e-3, Q = 1.3;
  const RadialDistribution f = RadialDistribution::top_hat(f0, Q, 64);
  for (double T : {0.0, 0.5, 2.0, 10.0}) {
    const TimeFrame fr = make_time_frame(-1.0, T);
    LocalGeometry bg;
    bg.N = 3.0;
    const MatterMoments m = moments_from_distribution(f, bg, fr);
    CHECK(m.rho == doctest::Approx(4.0 * M_PI * f0 * top_hat_rho_integral(fr.s, Q)).epsilon(1e-12));
  }
  // tau -> 0 limit: (4 pi / 3) f0 Q^3
  const TimeFrame late = make_time_frame(-1.0, 30.0);
  LocalGeometry bg;
  CHECK(moments_from_distribution(f, bg, late).rho == doctest::Approx(4.0 * M_PI / 3.0 * f0 * Q * Q * Q).epsilon(1e-12));
}

TEST_CASE("bump integral converges at fourth order to the Beta-function value") {
  // 4 pi int_0^1 q^2 (1-q^2)^4 dq = 2 pi B(3/2, 5)
  const double exact = 2.0 * M_PI * std::tgamma(1.5) * std::tgamma(5.0) / std::tgamma(6.5);
  double prev = 0.0;
  for (int cells : {16, 32, 64, 128}) {
    const RadialDistribution f = RadialDistribution::bump(1.0, 1.0, cells);
    const double err = std::abs(f.integrate([](double, double F) { return F; }) - exact);
    if (prev > 0.0 && err > 1e-14) CHECK(prev / err > 12.0);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("dilation: f(q e^{-dA}) within interpolation error") {
  const RadialDistribution f = RadialDistribution::bump(1.0, 1.0, 128);
  const RadialDistribution g = f.dilated(0.3);
  CHECK(g.qmax() == doctest::Approx(std::exp(0.3)));
  for (double q : {0.0, 0.2, 0.7, 1.1, 1.3})
    CHECK(g.value(q) == doctest::Approx(bump(q * std::exp(-0.3), 1.0, 1.0)).epsilon(1e-6).scale(1.0));
}

TEST_CASE("X = 0 analytic path agrees with the angular product rule") {
  std::mt19937_64 rng(31);
  const RadialDistribution f = RadialDistribution::bump(1e-2, 1.2, 64);
  for (int n = 0; n < 10; ++n) {
    LocalGeometry g;
    g.g = testing::rand_spd(rng);
    g.N = testing::uniform(rng, 1.0, 3.0);
    const TimeFrame fr = make_time_frame(-1.0, testing::uniform(rng, 0.0, 3.0));
    const MatterMoments a = moments_from_distribution(f, g, fr);
    g.X = 1e-9 * Vec3(1, 0, 0);
    const MatterMoments b = moments_from_distribution(f, g, fr);
    CHECK(b.rho == doctest::Approx(a.rho).epsilon(1e-8));
    CHECK(b.etaUnder == doctest::Approx(a.etaUnder).epsilon(1e-8));
    CHECK((b.Tunder - a.Tunder).norm() < 1e-8 * a.Tunder.norm());
    CHECK((b.S - a.S).norm() < 1e-8 * a.S.norm());
    CHECK(b.j.norm() < 1e-8 * a.rho);
  }
}

TEST_CASE("eta from the unrescaled moments equals rho + tau^2 eta_under when X = 0") {
  std::mt19937_64 rng(32);
  const RadialDistribution f = RadialDistribution::bump(1e-2, 1.0, 48);
  for (int n = 0; n < 10; ++n) {
    LocalGeometry g;
    g.g = testing::rand_spd(rng);
    g.N = testing::uniform(rng, 1.0, 3.0);
    const TimeFrame fr = make_time_frame(-1.0, testing::uniform(rng, 0.0, 3.0));
    const MatterMoments m = moments_from_distribution(f, g, fr);
    CHECK(eta_direct(f, g, fr) == doctest::Approx(m.eta).epsilon(1e-10));
  }
}

TEST_CASE("with shift, the kinetic p_under = N p0 differs from |p~_0|; the gap closes as X -> 0") {
  const RadialDistribution f = RadialDistribution::bump(1e-2, 1.0, 48);
  LocalGeometry g;
  g.N = 2.5;
  const TimeFrame fr = make_time_frame(-1.0, 0.5);
  double prev = 0.0;
  for (double a : {0.4, 0.2, 0.1}) {
    g.X = Vec3(a, 0.0, 0.0);
    const double gap = std::abs(eta_direct(f, g, fr) / moments_from_distribution(f, g, fr).eta - 1.0);
    CHECK(gap > 0.0);
    if (prev > 0.0) CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("ensemble moments: single-particle formulas, linearity, serial = parallel") {
  LocalGeometry g;
  g.g = 1.3 * Mat3::Identity();
  g.N = 2.7;
  const TimeFrame fr = make_time_frame(-1.0, 0.6);
  ParticleEnsemble one;
  Particle pt;
  pt.state.p = Vec3(0.2, -0.5, 0.9);
  pt.weight = 0.5;
  one.particles = {pt};
  const MatterMoments m = moments_from_ensemble(one, g, fr);
  const double p0 = kinetic_p0(g, pt.state.p, fr);
  CHECK(m.rho == doctest::Approx(0.5 * g.N * p0));
  CHECK((m.j - 0.5 * pt.state.p).norm() < 1e-15);
  CHECK(m.etaUnder == doctest::Approx(0.5 * norm2(g.g, pt.state.p) / (g.N * p0)));

  ParticleEnsemble ens = make_random_ensemble(500, 1.0, 1.0, 4);
  const MatterMoments s = moments_from_ensemble(ens, g, fr, Exec::serial);
  const MatterMoments p = moments_from_ensemble(ens, g, fr, Exec::parallel);
  CHECK(s.rho == p.rho);
  CHECK(s.Tunder == p.Tunder);
  for (auto& q : ens.particles) q.weight = 3.0;
  CHECK(moments_from_ensemble(ens, g, fr).rho == doctest::Approx(3.0 * s.rho));
}

TEST_CASE("continuity: background is stationary, homogeneous reduction") {
  ContinuitySample bg{background_geometry(Vec3(0.2, 0.1, 0.0)), make_time_frame(-1.0, 1.0), Mat3::Zero(),
                      ContinuityGradients{}};
  const RhoJ r = continuity_rhs({0.7, Vec3::Zero()}, bg);
  CHECK(r.rho == 0.0);
  CHECK(r.j.norm() == 0.0);

  // g = b gamma, X = 0, isotropic T = (eta/3) g^-1: rho' = (3-N) rho - tau^2 (N/3) eta_under
  const RadialDistribution f = RadialDistribution::bump(1e-2, 1.0, 64);
  LocalGeometry g;
  g.g = 1.2 * Mat3::Identity();
  g.N = 2.6;
  g.d = SpatialDerivatives{};
  g.d->dg = T3{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
  const TimeFrame fr = make_time_frame(-1.0, 0.4);
  const MatterMoments m = moments_from_distribution(f, g, fr);
  ContinuitySample s{g, fr, m.Tunder, ContinuityGradients{}};
  const RhoJ h = continuity_rhs({m.rho, Vec3::Zero()}, s);
  CHECK(h.rho == doctest::Approx((3.0 - g.N) * m.rho - fr.tau * fr.tau * g.N / 3.0 * m.etaUnder));

  ContinuitySample bad = s;
  bad.grad.reset();
  bad.geom.X = Vec3(0.1, 0, 0);
  CHECK_THROWS_AS(continuity_rhs({1.0, Vec3::Zero()}, bad), ContractViolation);
}

TEST_CASE("Cauchy-Schwarz constant") {
  CHECK(cauchy_schwarz_constant(2.0) == doctest::Approx(M_PI).epsilon(1e-14));
  for (double mu : {2.5, 3.0, 4.0}) {
    // 4 pi int_0^inf q^2 (1+q^2)^-mu dq with q = tan(t)
    const double I = 4.0 * M_PI * integrate([&](double t) { return std::pow(std::sin(t), 2) * std::pow(std::cos(t), 2 * mu - 4); },
                                            0.0, M_PI / 2, 64, 8);
    CHECK(cauchy_schwarz_constant(mu) == doctest::Approx(std::sqrt(I)).epsilon(1e-10));
  }
  CHECK_THROWS(cauchy_schwarz_constant(1.5));
}

TEST_CASE("moment bounds hold on sample distributions") {
  const RadialDistribution f = RadialDistribution::bump(5e-2, 2.0, 64);
  LocalGeometry g;
  g.g = 0.8 * Mat3::Identity();
  for (int ell = 0; ell <= 2; ++ell) {
    const MomentBoundReport r = moment_bound_check(f, g, make_time_frame(-1.0, 0.3), ell);
    CHECK(r.holds);
    CHECK(r.rho_lhs <= r.rho_rhs);
    CHECK(r.eta_lhs <= r.eta_rhs);
  }
}

TEST_CASE("pressure rate: the volume-form-halved form matches d/dT eta_under along the homogeneous flow") {
  // g = b(T) gamma with gdot = -2k g, N = 3(1-k), f(T, q) = F(q e^{-k (T - T0)})
  const double f0 = 1e-2, Q = 1.0, T0 = 0.5;
  for (double k : {0.0, 0.02, -0.03}) {
    auto eta_at = [&](double h) {
      const double e = std::exp(k * h);
      const RadialDistribution f =
          RadialDistribution::sample([&](double q) { return bump(q / e, f0, Q); }, Q * e, 256);
      LocalGeometry g;
      g.g = std::exp(-2.0 * k * h) * Mat3::Identity();
      g.N = 3.0 * (1.0 - k);
      return moments_from_distribution(f, g, make_time_frame(-1.0, T0 + h)).etaUnder;
    };
    const double fd = testing::diff(eta_at, 0.0, 1e-3);
    LocalGeometry g;
    g.N = 3.0 * (1.0 - k);
    FieldRates rates;
    rates.dTg = -2.0 * k * g.g;
    const PressureRate r = pressure_time_derivative_reduced(RadialDistribution::bump(f0, Q, 256), g,
                                                            make_time_frame(-1.0, T0), rates);
    CHECK(r.transport_consistent == doctest::Approx(fd).epsilon(1e-6));
    if (k != 0.0) CHECK(std::abs(r.printed - fd) > 1e-3 * std::abs(fd));
    else CHECK(r.printed == doctest::Approx(fd).epsilon(1e-6));
  }
  LocalGeometry shifted;
  shifted.X = Vec3(0.1, 0, 0);
  CHECK_THROWS_AS(pressure_time_derivative_reduced(RadialDistribution::bump(f0, Q, 32), shifted,
                                                   make_time_frame(-1.0, 0.0), FieldRates{}),
                  UnsupportedMode);
}

TEST_CASE("Einstein sources: couplings and index placement") {
  MatterMoments m;
  m.rho = 2.0;
  m.eta = 3.0;
  m.j = Vec3(1, 0, 0);
  m.S = Mat3::Identity();
  LocalGeometry g;
  g.g = 2.0 * Mat3::Identity();
  const EinsteinSources s = einstein_sources(m, g);
  CHECK(s.rho == 2.0 * conversion::rho_coupling);
  CHECK(s.eta == 3.0 * conversion::eta_coupling);
  CHECK(s.j(0) == doctest::Approx(2.0 * conversion::j_coupling));
  CHECK(s.S(1, 1) == doctest::Approx(conversion::S_coupling));
}
