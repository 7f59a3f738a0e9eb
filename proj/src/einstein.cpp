#include "milne/einstein.hpp"

namespace milne {

namespace {
const SpatialDerivatives& need(const LocalGeometry& geom, const char* who) {
  if (!geom.d) throw ContractViolation(std::string(who) + ": spatial derivatives missing");
  return *geom.d;
}
double laplacian(const EinsteinInputs& in) { return (in.geom.ginv() * in.hessN).trace(); }
}  // namespace

EinsteinInputs background_inputs(const Vec3& x) {
  EinsteinInputs in;
  in.geom = background_geometry(x);
  in.ricci = chart::ricci(x);
  in.scalar = chart::scalar_curvature(x);
  return in;
}

// (L_X h)_ab = X^c d_c h_ab + h_cb d_a X^c + h_ac d_b X^c
Mat3 lie_metric(const Mat3& h, const T3& dh, const Vec3& X, const Mat3& dX) {
  Mat3 L = Mat3::Zero();
  for (int c = 0; c < 3; ++c) L += X(c) * dh[c];
  L += dX.transpose() * h + h * dX;
  return L;
}

Mat3 ev_g_rhs(const LocalGeometry& geom) {
  const auto& d = need(geom, "ev_g_rhs");
  return 2.0 * geom.N * geom.Sigma + 2.0 * geom.Nhat() * geom.g - lie_metric(geom.g, d.dg, geom.X, d.dX);
}

Mat3 ev_sigma_rhs(const EinsteinInputs& in, const TimeFrame& frame) {
  const auto& geom = in.geom;
  const auto& d = need(geom, "ev_sigma_rhs");
  const double N = geom.N;
  const Mat3 gi = geom.ginv();
  return -2.0 * geom.Sigma - N * (in.ricci + (2.0 / 9.0) * geom.g) + in.hessN +
         2.0 * N * geom.Sigma * gi * geom.Sigma - (1.0 / 3.0) * geom.Nhat() * geom.g - geom.Nhat() * geom.Sigma -
         lie_metric(geom.Sigma, in.dSigma, geom.X, d.dX) + N * frame.s * in.src.S;
}

double hamiltonian_residual(const EinsteinInputs& in, const TimeFrame& frame) {
  const double sig2 = tensor_norm2(in.geom.ginv(), in.geom.Sigma);
  return in.scalar - sig2 + 2.0 / 3.0 - 4.0 * frame.s * in.src.rho;
}

Vec3 momentum_residual(const EinsteinInputs& in, const TimeFrame& frame) {
  return in.divSigma - frame.tau * frame.tau * in.src.j;
}

double lapse_residual(const EinsteinInputs& in, const TimeFrame& frame) {
  return lapse_residual_printed(in, frame) + 1.0;
}

double lapse_residual_printed(const EinsteinInputs& in, const TimeFrame& frame) {
  const double sig2 = tensor_norm2(in.geom.ginv(), in.geom.Sigma);
  const double N = in.geom.N;
  return laplacian(in) - N / 3.0 - N * (sig2 + frame.s * in.src.eta);
}

}  // namespace milne
