#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "milne/fields.hpp"
#include "milne/geometry.hpp"

using namespace milne;
using testing::diff;

TEST_CASE("time frame conversions") {
  const TimeFrame f = make_time_frame(-2.0, std::log(4.0));
  CHECK(f.tau == doctest::Approx(-0.5));
  CHECK(f.s == doctest::Approx(0.5));
  CHECK(f.t == doctest::Approx(6.0));
  const TimeFrame g = frame_at_tau(-2.0, -0.5);
  CHECK(g.T == doctest::Approx(std::log(4.0)));
  CHECK_THROWS_AS(make_time_frame(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(frame_at_tau(-1.0, -2.0), DomainError);
}

TEST_CASE("chart metric: origin, boundary, finite-difference derivative") {
  CHECK((chart::metric(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
  CHECK_THROWS_AS(chart::metric(Vec3(6.0, 0.0, 0.0)), DomainError);
  std::mt19937_64 rng(1);
  for (int n = 0; n < 50; ++n) {
    const Vec3 x = testing::rand_in_ball(rng, 4.0);
    const T3 d = chart::metric_derivative(x);
    for (int c = 0; c < 3; ++c) {
      auto gc = [&](double h) {
        Vec3 y = x;
        y(c) += h;
        return Mat3(chart::metric(y));
      };
      CHECK((d[c] - diff(gc, 0.0, 1e-4)).norm() < 1e-7);
    }
    // Levi-Civita from the metric agrees with the conformal closed form
    const T3 G = chart::christoffel(x), H = christoffel_from(chart::metric(x), d);
    for (int a = 0; a < 3; ++a) CHECK((G[a] - H[a]).norm() < 1e-12);
  }
}

TEST_CASE("constant curvature -1/9 at 10^4 random chart points") {
  std::mt19937_64 rng(2);
  double worst_R = 0, worst_ric = 0, worst_scal = 0;
  for (int n = 0; n < 10000; ++n) {
    const Vec3 x = testing::rand_in_ball(rng, 5.0);
    const Mat3 g = chart::metric(x);
    const auto R = chart::riemann(x);
    const auto C = chart::riemann_closed_form(x);
    // lower the first index of R^a_bcd and compare with kappa (g g - g g)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        Mat3 low = Mat3::Zero();
        for (int e = 0; e < 3; ++e) low += g(a, e) * R[e][b];
        worst_R = std::max(worst_R, (low - C[a][b]).cwiseAbs().maxCoeff() / g(0, 0) / g(0, 0));
      }
    worst_ric = std::max(worst_ric, (chart::ricci(x) + 2.0 / 9.0 * g).cwiseAbs().maxCoeff() / g(0, 0));
    worst_scal = std::max(worst_scal, std::abs(chart::scalar_curvature(x) + 2.0 / 3.0));
  }
  CHECK(worst_R < 1e-12);
  CHECK(worst_ric < 1e-12);
  CHECK(worst_scal < 1e-12);
}

TEST_CASE("rescaling: Milne data maps to the fixed point, round trip") {
  const TimeFrame f = make_time_frame(-1.0, 1.3);
  const double tau = f.tau;
  const Vec3 x(0.3, -0.2, 1.1);
  GeometricTuple milne;
  milne.g = chart::metric(x) / (tau * tau);
  milne.N = 3.0 / (tau * tau);
  const GeometricTuple r = rescale_state(milne, f, Direction::forward);
  CHECK((r.g - chart::metric(x)).norm() < 1e-14);
  CHECK(r.N == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(r.Sigma.norm() == 0.0);
  CHECK(r.X.norm() == 0.0);

  std::mt19937_64 rng(3);
  GeometricTuple s;
  s.g = testing::rand_spd(rng);
  s.Sigma = testing::rand_spd(rng) - Mat3::Identity();
  s.N = 2.5;
  s.X = testing::rand_vec(rng, 1.0);
  s.p = testing::rand_vec(rng, 1.0);
  const GeometricTuple back = rescale_state(rescale_state(s, f, Direction::forward), f, Direction::backward);
  CHECK((back.g - s.g).norm() < 1e-13);
  CHECK((back.Sigma - s.Sigma).norm() < 1e-13);
  CHECK((back.X - s.X).norm() < 1e-13);
  CHECK((back.p - s.p).norm() < 1e-13);
  CHECK(back.N == doctest::Approx(s.N));
  s.g = -s.g;
  CHECK_THROWS_AS(rescale_state(s, f, Direction::forward), DomainError);
}

TEST_CASE("background: Gamma* and Gamma*_* vanish, spatial block is the chart connection") {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 100; ++n) {
    const Vec3 x = testing::rand_in_ball(rng, 4.0);
    const TimeFrame f = make_time_frame(-1.0, testing::uniform(rng, 0.0, 5.0));
    const SpacetimeChristoffels ch = rescaled_christoffels(background_geometry(x), f);
    CHECK(ch.gamma_star.norm() == 0.0);
    CHECK(ch.gamma_star_star.norm() == 0.0);
    const T3 G = chart::christoffel(x);
    for (int a = 0; a < 3; ++a) CHECK((ch.spatial[a] - G[a]).norm() < 1e-13);
  }
}

namespace {

// Analytic (g, N, X) fields of (T, x) with shift; Sigma follows from the
// definition of the second fundamental form so the 4-metric fixes everything.
struct ShiftField {
  double eps = 0.05;
  Mat3 M = (Mat3() << 1.0, 0.3, -0.2, 0.3, -0.5, 0.1, -0.2, 0.1, 0.7).finished();
  Mat3 g(double T, const Vec3& x) const {
    return chart::metric(x) + eps * std::exp(-T) * std::sin(x(0) + 0.5 * x(1) - x(2)) * M;
  }
  double N(double T, const Vec3& x) const { return 3.0 + eps * std::exp(-T) * std::cos(0.4 * x(0) - x(1)); }
  Vec3 X(double T, const Vec3& x) const {
    return eps * std::exp(-T) * Vec3(std::sin(x(1)), std::cos(x(2)) * x(0), x(0) * x(1) - 0.3);
  }
};

// unrescaled 4-metric in (tau, x)
Eigen::Matrix4d G4(const ShiftField& F, double tau0, double tau, const Vec3& x) {
  const TimeFrame f = frame_at_tau(tau0, tau);
  LocalGeometry geom;
  geom.g = F.g(f.T, x);
  geom.N = F.N(f.T, x);
  geom.X = F.X(f.T, x);
  return spacetime_metric(geom, f);
}

}  // namespace

TEST_CASE("rescaled Christoffels match finite differences of the 4-metric (shift, non-CMC slices)") {
  const ShiftField F;
  const double tau0 = -1.0;
  std::mt19937_64 rng(5);
  for (int n = 0; n < 5; ++n) {
    const Vec3 x = testing::rand_in_ball(rng, 2.0);
    const double T = testing::uniform(rng, 0.2, 1.5);
    const TimeFrame fr = make_time_frame(tau0, T);
    const double tau = fr.tau;

    // first derivatives of the 4-metric, coordinate 0 = tau
    std::array<Eigen::Matrix4d, 4> dG;
    dG[0] = diff([&](double h) { return Eigen::Matrix4d(G4(F, tau0, tau + h, x)); }, 0.0, 1e-5);
    for (int c = 0; c < 3; ++c)
      dG[c + 1] = diff(
          [&](double h) {
            Vec3 y = x;
            y(c) += h;
            return Eigen::Matrix4d(G4(F, tau0, tau, y));
          },
          0.0, 1e-4);
    const Eigen::Matrix4d Gi = G4(F, tau0, tau, x).inverse();
    auto Gam = [&](int m, int a, int b) {
      double v = 0.0;
      for (int s = 0; s < 4; ++s) v += 0.5 * Gi(m, s) * (dG[a](s, b) + dG[b](s, a) - dG[s](a, b));
      return v;
    };

    // rescaled state from the same fields
    LocalGeometry geom;
    geom.x = x;
    geom.g = F.g(T, x);
    geom.N = F.N(T, x);
    geom.X = F.X(T, x);
    SpatialDerivatives d;
    for (int c = 0; c < 3; ++c) {
      auto shift = [&](double h) {
        Vec3 y = x;
        y(c) += h;
        return y;
      };
      d.dg[c] = diff([&](double h) { return Mat3(F.g(T, shift(h))); }, 0.0);
      d.dN(c) = diff([&](double h) { return F.N(T, shift(h)); }, 0.0);
      d.dX.col(c) = diff([&](double h) { return Vec3(F.X(T, shift(h))); }, 0.0);
    }
    geom.d = d;
    FieldRates rates;
    rates.dTg = diff([&](double h) { return Mat3(F.g(T + h, x)); }, 0.0);
    rates.dTN = diff([&](double h) { return F.N(T + h, x); }, 0.0);
    rates.dTX = diff([&](double h) { return Vec3(F.X(T + h, x)); }, 0.0);
    // k~ = -(d_tau g~ - L_X~ g~) / (2 N~), K = tau k~ = Sigma + g/3
    {
      const double Nt = geom.N / (tau * tau);
      const Vec3 Xt = geom.X / tau;
      const Mat3 gt = geom.g / (tau * tau);
      const Mat3 dtau_gt = (-rates.dTg / tau - 2.0 * geom.g / tau) / (tau * tau);
      Mat3 lie = Mat3::Zero();
      for (int c = 0; c < 3; ++c) lie += Xt(c) * d.dg[c] / (tau * tau);
      const Mat3 dXt = d.dX / tau;  // (a,c) = d_c X~^a
      lie += dXt.transpose() * gt + gt * dXt;
      const Mat3 k = -(dtau_gt - lie) / (2.0 * Nt);
      geom.Sigma = tau * k - geom.g / 3.0;
    }
    const SpacetimeChristoffels ch = rescaled_christoffels(geom, fr, rates);

    const double tol = 2e-6;
    CHECK(std::abs(ch.lapse_00 - Gam(0, 0, 0)) < tol * (1 + std::abs(Gam(0, 0, 0))));
    for (int a = 0; a < 3; ++a) {
      CHECK(std::abs(ch.time_time(a) - Gam(a + 1, 0, 0)) < tol * (1 + std::abs(Gam(a + 1, 0, 0))));
      CHECK(std::abs(ch.lapse_0a(a) - Gam(0, 0, a + 1)) < tol);
      for (int b = 0; b < 3; ++b) {
        CHECK(std::abs(ch.time_space(a, b) - Gam(a + 1, 0, b + 1)) < tol * (1 + std::abs(Gam(a + 1, 0, b + 1))));
        CHECK(std::abs(ch.lapse_ab(a, b) - Gam(0, a + 1, b + 1)) < tol);
        for (int c = 0; c < 3; ++c) CHECK(std::abs(ch.spatial[a](b, c) - Gam(a + 1, b + 1, c + 1)) < tol);
      }
    }
  }
}

TEST_CASE("correction constants") {
  const CorrectionConstants b = correction_constants(1.0 / 9.0, 1.0 / 900.0);
  CHECK(b.cE == doctest::Approx(0.99));
  CHECK(b.deltaAlpha == doctest::Approx(0.1));
  CHECK(b.alpha == doctest::Approx(0.9));
  const CorrectionConstants a = correction_constants(0.2, 1e-4);
  CHECK(a.cE == 1.0);
  CHECK(a.alpha == 1.0);
  CHECK_THROWS_AS(correction_constants(0.1, 1e-4), DomainError);
  CHECK_THROWS_AS(correction_constants(1.0 / 9.0, 0.2), DomainError);
}
