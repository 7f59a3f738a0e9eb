#pragma once
// Linearized per-eigenmode dynamics of (g - gamma, Sigma) at N = 3, X = 0 and
// the corrected energy E_s.

#include <optional>
#include <utility>
#include <vector>

#include "milne/geometry.hpp"
#include "milne/parallel.hpp"

namespace milne {

// u: amplitude of g - gamma on an eigentensor of eigenvalue lambda,
// w: amplitude of 6 Sigma.
struct ModeState {
  double lambda = 1.0;
  double u = 0.0;
  double w = 0.0;
};

// Prescribed scalar matter amplitude: 6 N |tau| S_amp enters dw/dT.
struct ModeForcing {
  double S_amp = 0.0;
  double s = 1.0;  // |tau|
};

struct ModeRhs {
  double du = 0.0, dw = 0.0;
};
ModeRhs mode_rhs(const ModeState& st, const std::optional<ModeForcing>& forcing = std::nullopt);

// Per-mode quadratic e = w^2/2 + (9/2) lambda u^2 + cE w u.
double mode_quadratic(const ModeState& st, double cE);
// Smallest eigenvalue of the 2x2 matrix of e.
double quadform_min_eig(double lambda, double cE);

struct ModeEnergy {
  std::vector<double> Em;  // E_(m), m = 1..s
  std::vector<double> Gm;  // Gamma_(m)
  double Es = 0.0;
  double min_quadform_eig = 0.0;  // over the supplied modes
};
constexpr int kMaxEnergyOrder = 6;
ModeEnergy corrected_energy(const std::vector<std::pair<ModeState, double>>& modes, const CorrectionConstants& cc,
                            int s);

struct ModeTrajectory {
  std::vector<double> T;
  std::vector<ModeState> states;
};
// Classical RK4; forcing amplitude S0 e^{-forcing_rate (T - T0)}, |tau| = |tau0| e^{-T}.
struct ModeIntegration {
  double T0 = 0.0, Tend = 10.0, h = 1e-2;
  double tau0 = -1.0;
  double forcing_amp = 0.0, forcing_rate = 1.0;
};
ModeTrajectory integrate_mode(const ModeState& start, const ModeIntegration& opt);

struct DecayCheck {
  std::vector<double> dE, bound;  // dE/dT and -2 alpha E
  double max_violation = 0.0;     // max (dE/dT + 2 alpha E), <= 0 when the inequality holds
  double max_identity_residual = 0.0;  // max |dE/dT + 2E| / max(1, E) (meaningful for cE = alpha = 1)
  bool holds = true;
};
// Along an unforced trajectory, dE/dT from the exact flow (not finite differences).
DecayCheck energy_decay_check(const ModeTrajectory& traj, const CorrectionConstants& cc, int s = 1);

struct ModeSweepRow {
  double lambda = 0, alpha = 0, cE = 0;
  double fitted_rate = 0;  // decay rate of E_s over the fit window
  double min_quadform_eig = 0;
  double max_violation = 0;
  double window_a = 0, window_b = 0;
};
struct ModeSweepOptions {
  ModeIntegration integ;
  double u0 = 1.0, w0 = 0.0;
  double epsPrime = 1e-4;
  int s = kMaxEnergyOrder;
};
// Independent per lambda; rows in grid order.
std::vector<ModeSweepRow> sweep_modes(const std::vector<double>& lambdas, const ModeSweepOptions& opt,
                                      Exec exec = Exec::parallel);

}  // namespace milne
