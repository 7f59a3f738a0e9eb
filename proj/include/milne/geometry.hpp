#pragma once
// Background chart, rescalings, time variables, rescaled Christoffels,
// correction constants.

#include <optional>

#include "milne/core.hpp"

namespace milne {

// ---------------------------------------------------------------- time
struct TimeFrame {
  double tau0 = -1.0;
  double T = 0.0;
  double tau = -1.0;  // tau0 * exp(-T)
  double s = 1.0;     // |tau|
  double t = 3.0;     // -3 / tau
};

TimeFrame make_time_frame(double tau0, double T);
// Inverse direction: frame at a given mean curvature.
TimeFrame frame_at_tau(double tau0, double tau);

// ---------------------------------------------------------------- chart
// Poincare ball of sectional curvature -1/9, gamma = Omega^2 delta with
// Omega = 1/(1 - r^2/36), so gamma(0) = delta.  Ball radius 6.
namespace chart {
constexpr double kappa = -1.0 / 9.0;
constexpr double radius = 6.0;

bool contains(const Vec3& x);
double conformal_factor(const Vec3& x);
Mat3 metric(const Vec3& x);
T3 metric_derivative(const Vec3& x);  // [c](a,b) = d_c gamma_ab
T3 christoffel(const Vec3& x);        // [a](b,c)
// dGamma[d][a](b,c) = d_d Gamma^a_bc
std::array<T3, 3> christoffel_derivative(const Vec3& x);

// Riemann R^a_bcd built from Gamma and dGamma; R[a][b](c,d).
using Riemann = std::array<std::array<Mat3, 3>, 3>;
Riemann riemann(const Vec3& x);
// Lowered, closed form kappa (g_ac g_bd - g_ad g_bc); [a][b](c,d).
Riemann riemann_closed_form(const Vec3& x);
Mat3 ricci(const Vec3& x);
double scalar_curvature(const Vec3& x);
}  // namespace chart

// Levi-Civita connection of a metric from its first derivatives.
T3 christoffel_from(const Mat3& g, const T3& dg);

// ---------------------------------------------------------------- pointwise state
struct SpatialDerivatives {
  T3 dg = zero_t3();         // [c](a,b) = d_c g_ab
  Vec3 dN = Vec3::Zero();    // d_c N
  Mat3 dX = Mat3::Zero();    // (a,c) = d_c X^a
};

struct LocalGeometry {
  Vec3 x = Vec3::Zero();
  Mat3 g = Mat3::Identity();
  Mat3 Sigma = Mat3::Zero();  // lower indices
  double N = 3.0;
  Vec3 X = Vec3::Zero();      // upper index
  std::optional<SpatialDerivatives> d;

  double Nhat() const { return N / 3.0 - 1.0; }
  Vec3 Xhat() const { return X / N; }
  double xhat2() const { return norm2(g, X) / (N * N); }
  Mat3 ginv() const { return g.inverse(); }
  Mat3 K() const { return Sigma + g / 3.0; }  // tau * k~ (lower)
  double trace_sigma() const { return (ginv() * Sigma).trace(); }
};

// Time derivatives along the evolution (d/dT at fixed x).
struct FieldRates {
  Mat3 dTg = Mat3::Zero();
  double dTN = 0.0;
  Vec3 dTX = Vec3::Zero();
};

// (gamma, 0, 3, 0) at a chart point, with derivatives.
LocalGeometry background_geometry(const Vec3& x);

// ---------------------------------------------------------------- rescaling
struct GeometricTuple {
  Mat3 g = Mat3::Identity();
  Mat3 Sigma = Mat3::Zero();
  double N = 3.0;
  Vec3 X = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

enum class Direction { forward, backward };

// forward: unrescaled -> rescaled (g = tau^2 g~, Sigma = tau Sigma~,
// N = tau^2 N~, X = tau X~, p = tau^-2 p~); backward is the inverse.
GeometricTuple rescale_state(const GeometricTuple& in, const TimeFrame& frame, Direction dir);

// Unrescaled spacetime metric in (tau, x) coordinates.
Eigen::Matrix4d spacetime_metric(const LocalGeometry& geom, const TimeFrame& frame);

// ---------------------------------------------------------------- Christoffels
// Christoffels of the unrescaled metric in (tau, x) coordinates, written in
// rescaled variables, plus the reduced tensors Gamma^a and Gamma^a_c.
struct SpacetimeChristoffels {
  T3 spatial = zero_t3();            // Gamma~^a_bc
  Mat3 time_space = Mat3::Zero();    // Gamma~^a_0c  (a,c)
  Vec3 time_time = Vec3::Zero();     // Gamma~^a_00
  double lapse_00 = 0.0;             // Gamma~^0_00
  Vec3 lapse_0a = Vec3::Zero();      // Gamma~^0_0a
  Mat3 lapse_ab = Mat3::Zero();      // Gamma~^0_ab
  Vec3 gamma_star = Vec3::Zero();    // Gamma^a
  Mat3 gamma_star_star = Mat3::Zero();  // Gamma^a_c (a,c)
  T3 spatial_g = zero_t3();          // Gamma^a_bc of g
};

SpacetimeChristoffels rescaled_christoffels(const LocalGeometry& geom, const TimeFrame& frame,
                                            const FieldRates& rates = {});

// ---------------------------------------------------------------- correction constants
struct CorrectionConstants {
  double lambda0 = 1.0;
  double epsPrime = 0.0;
  double deltaAlpha = 0.0;
  double alpha = 1.0;
  double cE = 1.0;
};

// lambda0 within this distance of 1/9 counts as the borderline case.
constexpr double kLambdaBorderTol = 1e-12;

CorrectionConstants correction_constants(double lambda0, double epsPrime);

}  // namespace milne
