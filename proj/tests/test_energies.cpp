#include <cmath>
#include <limits>

#include "doctest.h"
#include "milne/energies.hpp"

using namespace milne;

namespace {
constexpr double kPi = 3.14159265358979323846;

// composite Simpson on [0, Q]
template <class F>
double simpson(F&& f, double Q, int n = 20000) {
  const double h = Q / n;
  double acc = f(0.0) + f(Q);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}
}  // namespace

TEST_CASE("Sasaki ell = 0, top hat: closed form") {
  const double f0 = 0.3, Q = 1.0, b = 1.7, vol = 2.0;
  const RadialDistribution f = RadialDistribution::top_hat(f0, Q);
  // mu = 1: 4 pi f0^2 int (1 + q^2) q^2 dq
  const double I = 4 * kPi * f0 * f0 * (Q * Q * Q / 3 + std::pow(Q, 5) / 5);
  CHECK(sasaki_energy(f, b, 0, 1.0, SasakiBasis::g, vol) ==
        doctest::Approx(std::sqrt(std::pow(b, 1.5) * vol * I)).epsilon(1e-12));
  // gamma basis: r = q / sqrt(b), r^2 dr = b^{-3/2} q^2 dq, volume of gamma
  const double Ig = 4 * kPi * f0 * f0 * (Q * Q * Q / 3 + std::pow(Q, 5) / (5 * b)) * std::pow(b, -1.5);
  CHECK(sasaki_energy(f, b, 0, 1.0, SasakiBasis::gamma, vol) == doctest::Approx(std::sqrt(vol * Ig)).epsilon(1e-12));
}

TEST_CASE("Sasaki ell = 1, 2 against the analytic bump") {
  const double f0 = 0.5, Q = 1.2, mu = 3.0;
  const RadialDistribution f = RadialDistribution::bump(f0, Q, 256);
  auto F = [&](double q) { return f0 * std::pow(1 - q * q / (Q * Q), 4); };
  auto F1 = [&](double q) { return -8 * f0 * q / (Q * Q) * std::pow(1 - q * q / (Q * Q), 3); };
  auto F2 = [&](double q) {
    const double u = 1 - q * q / (Q * Q);
    return -8 * f0 / (Q * Q) * u * u * u + 48 * f0 * q * q / std::pow(Q, 4) * u * u;
  };
  const double e0 = simpson([&](double q) { return F(q) * F(q) * std::pow(1 + q * q, mu) * q * q; }, Q);
  const double e1a = simpson([&](double q) { return F(q) * F(q) * std::pow(1 + q * q, mu + 2) * q * q; }, Q);
  const double e1b = simpson([&](double q) { return F1(q) * F1(q) * std::pow(1 + q * q, mu + 1) * q * q; }, Q);
  // angular part of the Hessian of a radial function: 2 (F'/q)^2
  const double e2a = simpson([&](double q) { return F(q) * F(q) * std::pow(1 + q * q, mu + 4) * q * q; }, Q);
  const double e2b = simpson([&](double q) { return F1(q) * F1(q) * std::pow(1 + q * q, mu + 3) * q * q; }, Q);
  const double e2c = simpson(
      [&](double q) {
        const double r = q > 0 ? F1(q) / q : -8 * f0 / (Q * Q);
        return (F2(q) * F2(q) + 2 * r * r) * std::pow(1 + q * q, mu + 2) * q * q;
      },
      Q);
  CHECK(sasaki_energy(f, 1.0, 0, mu) == doctest::Approx(std::sqrt(4 * kPi * e0)).epsilon(1e-6));
  CHECK(sasaki_energy(f, 1.0, 1, mu) == doctest::Approx(std::sqrt(4 * kPi * (e1a + e1b))).epsilon(1e-4));
  CHECK(sasaki_energy(f, 1.0, 2, mu) == doctest::Approx(std::sqrt(4 * kPi * (e2a + e2b + e2c))).epsilon(1e-3));
  for (int ell = 0; ell <= 2; ++ell)
    CHECK(sasaki_energy(f, 1.0, ell, mu, SasakiBasis::gamma) == doctest::Approx(sasaki_energy(f, 1.0, ell, mu)));
  CHECK_THROWS_AS(sasaki_energy(f, 1.0, 3, mu), UnsupportedMode);
  CHECK_THROWS_AS(sasaki_energy(f, 0.0, 0, mu), DomainError);
}

TEST_CASE("rho energy and total energy") {
  CHECK(rho_energy(-0.2, 4.0, 1, 2.0) == doctest::Approx(0.2 * std::sqrt(8.0 * 2.0)));
  const double T = 1.3;
  CHECK(total_energy(2.0, 3.0, T, 0.2, 0.6) == doctest::Approx(std::exp(1.2 * T) * 2.0 + std::exp(-0.6 * T) * 3.0));
  CHECK_NOTHROW(validate_energy_weights(0.2, 0.6));
  CHECK_THROWS_AS(validate_energy_weights(0.0, 0.6), ConfigError);
  CHECK_THROWS_AS(validate_energy_weights(0.6, 0.6), ConfigError);
  CHECK_THROWS_AS(validate_energy_weights(0.2, 0.5), ConfigError);
  CHECK_THROWS_AS(validate_energy_weights(0.45, 0.58), ConfigError);  // sum >= 1
}

TEST_CASE("decay fit and total-decay monitor on exact exponentials") {
  std::vector<double> T, v, slow;
  for (int i = 0; i <= 200; ++i) {
    T.push_back(0.05 * i);
    v.push_back(3.0 * std::exp(-1.7 * T.back()));
    slow.push_back(std::exp(-0.5 * T.back()));
  }
  const DecayFit fit = decay_fit(T, v, 2.0, 8.0);
  CHECK(fit.rate == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.Ta == doctest::Approx(2.0));
  CHECK_THROWS(decay_fit(T, v, 2.0, 2.1));
  CHECK(total_decay_monitor(T, v, 0.1).holds);
  const MonitorResult m = total_decay_monitor(T, slow, 0.1);
  CHECK_FALSE(m.holds);
  CHECK(m.margin < 0.0);
}

TEST_CASE("tail ratio of an exponential") {
  std::vector<double> T, y, zero;
  for (int i = 0; i <= 8000; ++i) {
    T.push_back(1e-3 * i);
    y.push_back(std::exp(-T.back()));
    zero.push_back(0.0);
  }
  const double Te = 8.0;
  const double expect = std::exp(-Te / 4) * (1 - std::exp(-Te / 2)) / (1 - std::exp(-Te / 4));
  CHECK(tail_ratio(T, y) == doctest::Approx(expect).epsilon(1e-6));
  CHECK(tail_ratio(T, zero) == 0.0);
}

TEST_CASE("completeness: background holds with infinite margins, N > 3 fails") {
  CompletenessSeries s;
  for (int i = 0; i <= 100; ++i) {
    s.T.push_back(0.1 * i);
    s.N.push_back(3.0);
    s.gmin.push_back(1.0);
    s.Xnorm.push_back(0.0);
    s.gradN.push_back(0.0);
    s.SigmaNorm.push_back(0.0);
  }
  const CompletenessReport r = completeness_monitor(s);
  CHECK(r.holds());
  REQUIRE(r.conditions.size() == 5);
  for (int k : {0, 2, 3, 4}) CHECK(r.conditions[k].margin == std::numeric_limits<double>::infinity());
  s.N[50] = 3.01;
  CHECK_FALSE(completeness_monitor(s).holds());
  s.N[50] = 3.0;
  for (std::size_t i = 0; i < s.T.size(); ++i) s.gradN[i] = 1.0 / (1.0 + s.T[i]);  // not integrable
  const CompletenessReport slow = completeness_monitor(s);
  CHECK(slow.tail_ratio_gradN > 0.5);
  CHECK_FALSE(slow.holds());
}

TEST_CASE("smallness and continuation monitors") {
  CHECK(smallness_monitor(0.0, {0.1, 0.2}, 0.4).margin == doctest::Approx(0.5));
  CHECK_FALSE(smallness_monitor(0.0, {0.5}, 0.4).holds);
  CHECK(continuation_monitor({0, 1}, {0.0, 0.0}, 0.1).margin == std::numeric_limits<double>::infinity());
  CHECK_FALSE(continuation_monitor({0, 1}, {0.0, 0.2}, 0.1).holds);
}
