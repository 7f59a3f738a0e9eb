#pragma once
// Energy-momentum moments of f, continuity equations, moment bounds and the
// X = 0 pressure time derivative.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "milne/einstein.hpp"
#include "milne/massshell.hpp"
#include "milne/parallel.hpp"
#include "milne/transport.hpp"

namespace milne {

// Isotropic f(q), q = |p|_g, on a uniform grid q_i = i*dq, i = 0..cells.
// Values beyond qmax are zero.  Interpolation is local cubic Lagrange with
// even reflection at q = 0 and stencils kept inside [0, qmax].
class RadialDistribution {
 public:
  RadialDistribution() = default;
  RadialDistribution(double dq, double qmax, std::vector<double> f);

  static RadialDistribution sample(const std::function<double(double)>& F, double qmax, int cells = 64,
                                   double extent = 1.25);
  static RadialDistribution top_hat(double f0, double Q, int cells = 64, double extent = 1.25);
  // f0 (1 - (q/Q)^2)^4 on [0, Q]: C^3 at the support edge.
  static RadialDistribution bump(double f0, double Q, int cells = 64, double extent = 1.25);

  double dq() const { return dq_; }
  double qmax() const { return qmax_; }
  int cells() const { return static_cast<int>(f_.size()) - 1; }
  double extent() const { return dq_ * cells(); }
  const std::vector<double>& values() const { return f_; }
  bool empty() const;

  double value(double q) const;
  double derivative(double q) const;
  double second_derivative(double q) const;

  // Radial integral 4 pi int_0^qmax F(q) w(q) q^2 dq, composite 4-point
  // Gauss-Legendre per grid cell.
  double integrate(const std::function<double(double, double)>& w) const;  // w(q, F(q))

  // f(T, q) = f(q e^{-dA}): returns the remapped grid (support grows by e^{dA}).
  RadialDistribution dilated(double dA) const;

 private:
  int stencil_start(double q) const;
  double dq_ = 1.0;
  double qmax_ = 0.0;
  std::vector<double> f_;
};

struct MatterMoments {
  double rho = 0.0;
  Vec3 j = Vec3::Zero();        // upper
  double etaUnder = 0.0;
  Mat3 Tunder = Mat3::Zero();   // upper
  Mat3 S = Mat3::Zero();        // lower
  double eta = 0.0;             // rho + tau^2 etaUnder
  double trT = 0.0;             // g_ab Tunder^ab
};

// Moments for a radial f.  X = 0 uses the analytic angular reduction; X != 0
// falls back to a product angular rule.
MatterMoments moments_from_distribution(const RadialDistribution& f, const LocalGeometry& geom,
                                        const TimeFrame& frame);
// Weighted sums over an ensemble (positions ignored: homogeneous cell).
MatterMoments moments_from_ensemble(const ParticleEnsemble& ens, const LocalGeometry& geom, const TimeFrame& frame,
                                    Exec exec = Exec::serial);
// eta from the unrescaled moments rho~ + g~^ab T~_ab, rescaled by |tau|^-3.
double eta_direct(const RadialDistribution& f, const LocalGeometry& geom, const TimeFrame& frame);

// Coupling factors relative to the kinetic moments, and the resulting sources.
namespace conversion {
constexpr double rho_coupling = 1.0;  // 4 pi absorbed in the normalization of f
constexpr double eta_coupling = 1.0;
constexpr double j_coupling = 2.0;    // 8 pi / 4 pi
constexpr double S_coupling = 2.0;
// Powers of |tau| between unrescaled and rescaled moments.
constexpr int rho_tau_power = -3;
constexpr int eta_tau_power = -3;
constexpr int etaUnder_tau_power = -5;
constexpr int j_tau_power = -5;
constexpr int Tunder_tau_power = -7;
}  // namespace conversion
EinsteinSources einstein_sources(const MatterMoments& m, const LocalGeometry& geom);

// ---------------------------------------------------------------- continuity
struct ContinuityGradients {
  Vec3 grad_rho = Vec3::Zero();    // d_a rho
  double div_N2j = 0.0;            // nabla_a (N^2 j^a)
  Mat3 nabla_j = Mat3::Zero();     // (a,b) = nabla_b j^a
  Mat3 nablaX_up = Mat3::Zero();   // (a,b) = nabla^a X_b
  Vec3 div_NT = Vec3::Zero();      // nabla_b (N T^ab)
  Vec3 gradN_up = Vec3::Zero();    // nabla^a N
};

struct ContinuitySample {
  LocalGeometry geom;
  TimeFrame frame;
  Mat3 Tunder = Mat3::Zero();
  std::optional<ContinuityGradients> grad;
};

struct RhoJ {
  double rho = 0.0;
  Vec3 j = Vec3::Zero();
};

RhoJ continuity_rhs(const RhoJ& y, const ContinuitySample& s);
// RK4 step; samples at T, T + h/2, T + h.
RhoJ continuity_step(const RhoJ& y, const std::array<ContinuitySample, 3>& samples, double h);

// ---------------------------------------------------------------- bounds
struct MomentBoundReport {
  double rho_lhs = 0, rho_rhs = 0;
  double j_lhs = 0, j_rhs = 0;
  double eta_lhs = 0, eta_rhs = 0;
  double T_lhs = 0, T_rhs = 0;
  double S_lhs = 0, S_rhs = 0;
  double C_printed = 0;  // (int int pbar^{-2mu} sqrt g dp sqrt g dx)^{1/2}
  double C_used = 0;     // C_printed / sqrt(vol)
  bool holds = true;
  bool outside_lemma = false;  // ell < 4
};
// Homogeneous cell of gamma-volume vol_gamma; g = b gamma.
MomentBoundReport moment_bound_check(const RadialDistribution& f, const LocalGeometry& geom, const TimeFrame& frame,
                                     int ell, double vol_gamma = 1.0);
// (4 pi int_0^inf q^2 (1+q^2)^{-mu} dq)^{1/2}
double cauchy_schwarz_constant(double mu);

// ---------------------------------------------------------------- pressure rate, X = 0
struct PressureRate {
  double printed = 0.0;               // reduced printed formula
  double transport_consistent = 0.0;  // with the volume-form term halved
};
PressureRate pressure_time_derivative_reduced(const RadialDistribution& f, const LocalGeometry& geom,
                                              const TimeFrame& frame, const FieldRates& rates);

}  // namespace milne
