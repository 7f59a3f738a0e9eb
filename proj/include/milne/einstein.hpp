#pragma once
// Rescaled Einstein equations in CMCSH gauge, pointwise: evolution
// right-hand sides and constraint / lapse residuals.

#include "milne/geometry.hpp"

namespace milne {

// Matter sources as they enter the Einstein equations.  The kinetic moments
// carry the rho-family coupling; j and S need twice that (see ledger).
struct EinsteinSources {
  double rho = 0.0;
  double eta = 0.0;
  Vec3 j = Vec3::Zero();  // lower index
  Mat3 S = Mat3::Zero();
};

struct EinsteinInputs {
  LocalGeometry geom;              // needs first derivatives
  Mat3 ricci = Mat3::Zero();       // R_ab[g]
  double scalar = 0.0;             // R[g]
  Mat3 hessN = Mat3::Zero();       // nabla_a nabla_b N
  T3 dSigma = zero_t3();           // [c](a,b) = d_c Sigma_ab
  Vec3 divSigma = Vec3::Zero();    // nabla^a Sigma_ab
  EinsteinSources src;
};

// Background input (gamma, 0, 3, 0, no matter) at a chart point.
EinsteinInputs background_inputs(const Vec3& x);

Mat3 lie_metric(const Mat3& g, const T3& dg, const Vec3& X, const Mat3& dX);
Mat3 ev_g_rhs(const LocalGeometry& geom);
Mat3 ev_sigma_rhs(const EinsteinInputs& in, const TimeFrame& frame);
double hamiltonian_residual(const EinsteinInputs& in, const TimeFrame& frame);
Vec3 momentum_residual(const EinsteinInputs& in, const TimeFrame& frame);
// (Delta - 1/3) N - N(|Sigma|^2 + s eta) + 1
double lapse_residual(const EinsteinInputs& in, const TimeFrame& frame);
// Same without the -1 source, as printed.
double lapse_residual_printed(const EinsteinInputs& in, const TimeFrame& frame);

}  // namespace milne
