#include "milne/geometry.hpp"

#include <cmath>

namespace milne {

TimeFrame make_time_frame(double tau0, double T) {
  if (!(tau0 < 0.0)) throw DomainError("make_time_frame: tau0 must be negative");
  if (!(T >= 0.0)) throw DomainError("make_time_frame: T must be nonnegative");
  TimeFrame f;
  f.tau0 = tau0;
  f.T = T;
  f.tau = tau0 * std::exp(-T);
  f.s = -f.tau;
  f.t = -3.0 / f.tau;
  return f;
}

TimeFrame frame_at_tau(double tau0, double tau) {
  if (!(tau0 < 0.0)) throw DomainError("frame_at_tau: tau0 must be negative");
  if (!(tau < 0.0) || tau < tau0) throw DomainError("frame_at_tau: tau must lie in [tau0, 0)");
  TimeFrame f;
  f.tau0 = tau0;
  f.tau = tau;
  f.T = -std::log(tau / tau0);
  f.s = -tau;
  f.t = -3.0 / tau;
  return f;
}

// ------------------------------------------------------------------ chart
namespace chart {

namespace {
double u_of(const Vec3& x) { return 1.0 - x.squaredNorm() / (radius * radius); }
// d_c ln Omega
Vec3 dlog(const Vec3& x) { return x / (0.5 * radius * radius * u_of(x)); }
// d_d d_c ln Omega
Mat3 ddlog(const Vec3& x) {
  const double u = u_of(x);
  const double a = 0.5 * radius * radius;
  return Mat3::Identity() / (a * u) + x * x.transpose() / (a * a * u * u);
}
}  // namespace

bool contains(const Vec3& x) { return x.norm() < radius; }

double conformal_factor(const Vec3& x) {
  if (!contains(x)) throw DomainError("chart: point outside the Poincare ball");
  return 1.0 / u_of(x);
}

Mat3 metric(const Vec3& x) {
  const double om = conformal_factor(x);
  return om * om * Mat3::Identity();
}

T3 metric_derivative(const Vec3& x) {
  const double om2 = sq(conformal_factor(x));
  const Vec3 phi = dlog(x);
  T3 d;
  for (int c = 0; c < 3; ++c) d[c] = 2.0 * om2 * phi(c) * Mat3::Identity();
  return d;
}

T3 christoffel(const Vec3& x) {
  conformal_factor(x);
  const Vec3 phi = dlog(x);
  T3 G = zero_t3();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        G[a](b, c) = (a == b ? phi(c) : 0.0) + (a == c ? phi(b) : 0.0) - (b == c ? phi(a) : 0.0);
  return G;
}

std::array<T3, 3> christoffel_derivative(const Vec3& x) {
  conformal_factor(x);
  const Mat3 H = ddlog(x);
  std::array<T3, 3> dG;
  for (int d = 0; d < 3; ++d) {
    dG[d] = zero_t3();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          dG[d][a](b, c) = (a == b ? H(c, d) : 0.0) + (a == c ? H(b, d) : 0.0) - (b == c ? H(a, d) : 0.0);
  }
  return dG;
}

Riemann riemann(const Vec3& x) {
  const T3 G = christoffel(x);
  const auto dG = christoffel_derivative(x);
  Riemann R;
  // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      R[a][b] = Mat3::Zero();
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double v = dG[c][a](d, b) - dG[d][a](c, b);
          for (int e = 0; e < 3; ++e) v += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          R[a][b](c, d) = v;
        }
    }
  return R;
}

Riemann riemann_closed_form(const Vec3& x) {
  const Mat3 g = metric(x);
  Riemann R;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) R[a][b](c, d) = kappa * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
  return R;
}

Mat3 ricci(const Vec3& x) {
  const Riemann R = riemann(x);
  Mat3 Ric = Mat3::Zero();
  for (int b = 0; b < 3; ++b)
    for (int d = 0; d < 3; ++d)
      for (int a = 0; a < 3; ++a) Ric(b, d) += R[a][b](a, d);
  return Ric;
}

double scalar_curvature(const Vec3& x) { return (metric(x).inverse() * ricci(x)).trace(); }

}  // namespace chart

T3 christoffel_from(const Mat3& g, const T3& dg) {
  const Mat3 gi = g.inverse();
  // lowered: G_dbc = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
  T3 low = zero_t3();
  for (int d = 0; d < 3; ++d)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) low[d](b, c) = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
  T3 G = zero_t3();
  for (int a = 0; a < 3; ++a)
    for (int d = 0; d < 3; ++d) G[a] += gi(a, d) * low[d];
  return G;
}

LocalGeometry background_geometry(const Vec3& x) {
  LocalGeometry geom;
  geom.x = x;
  geom.g = chart::metric(x);
  SpatialDerivatives d;
  d.dg = chart::metric_derivative(x);
  geom.d = d;
  return geom;
}

GeometricTuple rescale_state(const GeometricTuple& in, const TimeFrame& frame, Direction dir) {
  const double tau = frame.tau;
  const double k = dir == Direction::forward ? 1.0 : -1.0;
  if (in.g.llt().info() != Eigen::Success)
    throw DomainError("rescale_state: metric not positive definite");
  GeometricTuple out;
  out.g = std::pow(tau, 2.0 * k) * in.g;
  out.Sigma = std::pow(tau, k) * in.Sigma;
  out.N = std::pow(tau, 2.0 * k) * in.N;
  out.X = std::pow(tau, k) * in.X;
  out.p = std::pow(tau, -2.0 * k) * in.p;
  return out;
}

Eigen::Matrix4d spacetime_metric(const LocalGeometry& geom, const TimeFrame& frame) {
  const double tau = frame.tau;
  const Vec3 Xl = geom.g * geom.X;
  Eigen::Matrix4d G;
  G(0, 0) = (-geom.N * geom.N + geom.X.dot(Xl)) / std::pow(tau, 4);
  for (int a = 0; a < 3; ++a) {
    G(0, a + 1) = G(a + 1, 0) = Xl(a) / std::pow(tau, 3);
    for (int b = 0; b < 3; ++b) G(a + 1, b + 1) = geom.g(a, b) / (tau * tau);
  }
  return G;
}

SpacetimeChristoffels rescaled_christoffels(const LocalGeometry& geom, const TimeFrame& frame,
                                            const FieldRates& rates) {
  if (!geom.d) throw ContractViolation("rescaled_christoffels: spatial derivatives missing");
  const auto& d = *geom.d;
  const double tau = frame.tau;
  const double N = geom.N;
  const Vec3& X = geom.X;
  const Mat3 gi = geom.ginv();
  const Mat3 K = geom.K();
  const Mat3 Sig_up = gi * geom.Sigma;  // Sigma^a_c
  const Vec3 KX = K * X;                // (K X)_c

  SpacetimeChristoffels out;
  out.spatial_g = christoffel_from(geom.g, d.dg);
  const T3& G = out.spatial_g;

  // nabla_c X^a
  Mat3 nablaX = d.dX;
  for (int a = 0; a < 3; ++a) nablaX.row(a) += (G[a] * X).transpose();
  const Vec3 gradN_up = gi * d.dN;
  const double XdN = X.dot(d.dN);
  const double KXX = X.dot(KX);

  out.gamma_star = -X - (2.0 / 3.0) * (N - 3.0) * X + nablaX * X - 2.0 * N * Sig_up * X + N * gradN_up +
                   (rates.dTN / N - XdN / N + KXX / N) * X;
  out.gamma_star_star = -N * Sig_up + (1.0 - N / 3.0) * Mat3::Identity() + nablaX -
                        X * d.dN.transpose() / N + X * KX.transpose() / N;

  for (int a = 0; a < 3; ++a) out.spatial[a] = G[a] + K * (X(a) / N);
  out.time_space = (-Mat3::Identity() + out.gamma_star_star) / tau;
  out.time_time = (-rates.dTX + out.gamma_star) / (tau * tau);

  out.lapse_00 = (-2.0 * N - rates.dTN + XdN - KXX) / (N * tau);
  out.lapse_0a = (d.dN - KX) / N;
  out.lapse_ab = -tau * K / N;
  return out;
}

CorrectionConstants correction_constants(double lambda0, double epsPrime) {
  constexpr double ninth = 1.0 / 9.0;
  CorrectionConstants c;
  c.lambda0 = lambda0;
  c.epsPrime = epsPrime;
  if (lambda0 < ninth - kLambdaBorderTol)
    throw DomainError("correction_constants: lambda0 < 1/9 violates the eigenvalue bound");
  if (lambda0 > ninth + kLambdaBorderTol) return c;  // alpha = cE = 1
  if (!(epsPrime > 0.0 && epsPrime < lambda0))
    throw DomainError("correction_constants: need 0 < epsPrime < lambda0 at lambda0 = 1/9");
  c.cE = 9.0 * (lambda0 - epsPrime);
  c.deltaAlpha = std::sqrt(1.0 - c.cE);
  c.alpha = 1.0 - c.deltaAlpha;
  return c;
}

}  // namespace milne
