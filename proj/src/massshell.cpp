#include "milne/massshell.hpp"

#include <cmath>

namespace milne {

void require_admissible(const LocalGeometry& geom, const char* who) {
  if (!(geom.N > 0.0)) throw DomainError(std::string(who) + ": lapse must be positive");
  if (!(geom.xhat2() < 1.0)) throw SingularDenominator(std::string(who) + ": |Xhat|_g >= 1");
}

double phat(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  require_admissible(geom, "phat");
  const double tau = frame.tau;
  const double xp = dot(geom.g, geom.Xhat(), p);
  return std::sqrt(tau * tau * xp * xp + (1.0 - geom.xhat2()) * (1.0 + tau * tau * norm2(geom.g, p)));
}

namespace {
double root_p0(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  const Eigen::Matrix4d G = spacetime_metric(geom, frame);
  const Vec3 pt = frame.tau * frame.tau * p;
  const double A = G(0, 0);
  double B = 0.0, C = 1.0;
  for (int a = 0; a < 3; ++a) {
    B += G(0, a + 1) * pt(a);
    for (int b = 0; b < 3; ++b) C += G(a + 1, b + 1) * pt(a) * pt(b);
  }
  // A y^2 + 2 B y + C = 0 with A < 0 < C; positive root, cancellation-free.
  const double D = std::sqrt(B * B - A * C);
  return B >= 0.0 ? (B + D) / (-A) : C / (D - B);
}
}  // namespace

double compute_p0(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame, P0Method method) {
  require_admissible(geom, "compute_p0");
  const double tau = frame.tau;
  const double x2 = geom.xhat2();
  const double xp = dot(geom.g, geom.Xhat(), p);
  switch (method) {
    case P0Method::first_principles:
      return root_p0(geom, p, frame);
    case P0Method::paper_primary:
      return (tau * xp + phat(geom, p, frame)) / (geom.N * (1.0 - x2));
    case P0Method::paper_alternative:
      return (1.0 + tau * tau * norm2(geom.g, p)) / (geom.N * (phat(geom, p, frame) - tau * xp));
  }
  throw UnsupportedMode("compute_p0: unknown method");
}

double kinetic_p0(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  return compute_p0(geom, p, frame, P0Method::paper_primary);
}

MomentumPoint make_momentum_point(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  MomentumPoint m;
  m.p = p;
  m.p0 = kinetic_p0(geom, p, frame);
  m.phat = phat(geom, p, frame);
  m.pbar = std::sqrt(1.0 + norm2(geom.g, p));
  m.pund = geom.N * m.p0;
  return m;
}

double massshell_residual(const LocalGeometry& geom, const Vec3& p, double p0, const TimeFrame& frame) {
  const Eigen::Matrix4d G = spacetime_metric(geom, frame);
  Eigen::Vector4d pt;
  pt << p0, p;
  pt *= frame.tau * frame.tau;
  return std::abs(pt.dot(G * pt) + 1.0);
}

NormalizationReport normalization_report(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  NormalizationReport r;
  r.first_principles = compute_p0(geom, p, frame, P0Method::first_principles);
  r.paper_primary = compute_p0(geom, p, frame, P0Method::paper_primary);
  r.ratio = r.first_principles / r.paper_primary;
  r.tau2 = frame.tau * frame.tau;
  return r;
}

EstimateReport pointwise_estimates_check(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  const double p0 = kinetic_p0(geom, p, frame);
  const double s = frame.s;
  const double x2 = geom.xhat2();
  const double pn = std::sqrt(norm2(geom.g, p));
  const double Xn = std::sqrt(norm2(geom.g, geom.X));
  EstimateReport r;
  r.lhs1 = pn / p0;
  r.rhs1 = 2.0 * Xn / s + geom.N * std::sqrt(1.0 - x2) / s;
  r.lhs2 = p0;
  r.rhs2 = (2.0 * s * std::sqrt(x2) * pn + std::sqrt(1.0 - x2) * std::sqrt(1.0 + s * s * pn * pn)) /
           (geom.N * (1.0 - x2));
  // X = 0 makes the second estimate an equality; allow rounding.
  constexpr double rel = 1e-12;
  r.holds1 = r.lhs1 <= r.rhs1 * (1.0 + rel);
  r.holds2 = r.lhs2 <= r.rhs2 * (1.0 + rel);
  return r;
}

double pressure_kernel(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  const double p0 = kinetic_p0(geom, p, frame);
  const Vec3 v = p + p0 / frame.tau * geom.X;
  return norm2(geom.g, v) / phat(geom, p, frame);
}

VerticalDerivatives vertical_derivatives(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame) {
  require_admissible(geom, "vertical_derivatives");
  const double tau = frame.tau;
  const double N = geom.N;
  const Mat3& g = geom.g;
  const Vec3 Xh = geom.Xhat();
  const Vec3 Xh_l = g * Xh;
  const Vec3 p_l = g * p;
  const double x2 = geom.xhat2();
  const double xp = Xh.dot(p_l);
  const double ph = phat(geom, p, frame);
  const double p0 = kinetic_p0(geom, p, frame);
  const Vec3 v = p + p0 / tau * geom.X;
  const double v2 = norm2(g, v);
  const double vX = dot(g, v, geom.X);

  VerticalDerivatives out;
  out.dp0 = (tau * p0 * Xh_l + tau * tau / N * p_l) / ph;
  out.dphat = tau * tau * (xp * Xh_l + (1.0 - x2) * p_l) / ph;
  out.dkernel = 2.0 * (g * v + out.dp0 * (vX / tau)) / ph - v2 * out.dphat / (ph * ph);

  const Vec3 X_l = g * geom.X;
  const double pX = p.dot(X_l);
  const double X2 = geom.X.dot(X_l);
  out.dkernel_printed = 2.0 / ph * (p_l + p0 / tau * X_l) * (1.0 + tau / N * pX / ph + p0 / N * X2) -
                        tau * tau * v2 / (ph * ph * ph) * (xp * Xh_l + (1.0 - x2) * p_l);
  return out;
}

MomentumTimeDerivatives time_derivatives(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame,
                                         const FieldRates& rates) {
  require_admissible(geom, "time_derivatives");
  const double tau = frame.tau;
  const double t2 = tau * tau;
  const double N = geom.N;
  const Mat3& g = geom.g;
  const Mat3& gd = rates.dTg;
  const Vec3 Xh = geom.Xhat();
  const Vec3 Xh_dot = (rates.dTX - Xh * rates.dTN) / N;

  const double x2 = geom.xhat2();
  const double x2_dot = norm2(gd, Xh) + 2.0 * dot(g, Xh, Xh_dot);
  const double xp = dot(g, Xh, p);
  const double xp_dot = dot(gd, Xh, p) + dot(g, Xh_dot, p);
  const double pp = norm2(g, p);
  const double pp_dot = norm2(gd, p);

  const double ph = phat(geom, p, frame);
  const double p0 = kinetic_p0(geom, p, frame);
  const double D = N * (1.0 - x2);
  const double D_dot = rates.dTN * (1.0 - x2) - N * x2_dot;

  MomentumTimeDerivatives out;
  // tau' = -tau
  const double ph2_dot = -2.0 * t2 * xp * xp + 2.0 * t2 * xp * xp_dot - x2_dot * (1.0 + t2 * pp) +
                         (1.0 - x2) * (-2.0 * t2 * pp + t2 * pp_dot);
  out.dphat_fixed_p = ph2_dot / (2.0 * ph);
  out.dp0_fixed_p = ((-tau * xp + tau * xp_dot) + out.dphat_fixed_p) / D - p0 * D_dot / D;

  // Holding p~ fixed adds the flow dp/dT = 2p.
  const VerticalDerivatives B = vertical_derivatives(geom, p, frame);
  out.dphat_fixed_ptilde = out.dphat_fixed_p + 2.0 * p.dot(B.dphat);
  out.dp0_fixed_ptilde = out.dp0_fixed_p + 2.0 * p.dot(B.dp0);

  out.dphat_printed =
      (2.0 * t2 * xp * xp + 2.0 * t2 * xp * (dot(gd, Xh, p) + dot(g, p, rates.dTX - Xh * rates.dTN) / N) -
       (1.0 + t2 * pp) * (norm2(gd, Xh) + 2.0 / N * dot(g, Xh, rates.dTX - Xh * rates.dTN)) +
       t2 * (1.0 - x2) * (2.0 * pp + pp_dot)) /
      (2.0 * ph);
  const Vec3& X = geom.X;
  const double X2 = norm2(g, X);
  const double d_lorentz = -2.0 * N * rates.dTN + norm2(gd, X) + 2.0 * dot(g, X, rates.dTX);
  out.dp0_printed = 2.0 * p0 + (4.0 * p0 * p0 * (-N * N + X2) + 6.0 * p0 * tau * dot(g, p, X) + 2.0 * t2 * pp +
                                p0 * p0 * d_lorentz + 2.0 * tau * p0 * dot(g, p, rates.dTX) + t2 * pp_dot) /
                                   (2.0 * N * ph);
  return out;
}

}  // namespace milne
