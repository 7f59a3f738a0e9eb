#pragma once
// Spatially homogeneous isotropic sector: g = b gamma, Sigma = 0, X = 0,
// algebraic lapse, Hamiltonian constraint, coupled metric-Vlasov evolution.

#include <string>
#include <vector>

#include "milne/matter.hpp"

namespace milne {

// (Delta - 1/3) N = N (|Sigma|^2 + s eta) - 1 with vanishing gradients.
double solve_lapse_algebraic(double Sigma2, double sEta);
// R(b gamma) - |Sigma|^2 + 2/3 = 4 s rho with R = -2/(3b) and Sigma = 0.
double hamiltonian_constraint_b(double rho, const TimeFrame& frame);

struct HomogeneousState {
  double b = 1.0;
  RadialDistribution f;  // in q = |p|_g
  TimeFrame frame;
};

struct HomogeneousOptions {
  double Tend = 5.0;
  double h = 1e-3;
  int output_every = 10;
  bool energies = true;  // Sasaki energies on logged rows
  double vol_gamma = 1.0;
};

struct HomogeneousRow {
  double T = 0, tau = 0;
  double b_ode = 1, b_constraint = 1;
  double N = 3;
  double rho = 0, rho_continuity = 0;
  double eta_under = 0, tau2_eta_under = 0, trT = 0, S_scalar = 0;
  double G = 0;  // sup |p|_g over the support
  double A = 0;  // log of the momentum dilation since T0
  double sasaki_2_3 = 0, sasaki_2_4 = 0, rho_energy = 0;
};

struct HomogeneousRun {
  std::vector<HomogeneousRow> rows;
  RadialDistribution final_f;
  double final_b = 1.0;
  double max_constraint_gap = 0.0;    // max |b_ode - b_constraint|
  double max_continuity_gap = 0.0;    // max |rho - rho_continuity|
  double min_N = 3.0, max_N = 3.0;
};

// RK4 on (b, A, rho_c) with A = int (1 - N/3) dT the momentum dilation:
// f(T, q) = f(T0, q e^{-A}).  Stage moments by change of variables; the grid is
// resampled from the initial data once per step (no accumulated interpolation).
HomogeneousRun evolve_homogeneous(const HomogeneousState& initial, const HomogeneousOptions& opt);

// State with b from the constraint at the given frame.
HomogeneousState constrained_initial_state(const RadialDistribution& f, const TimeFrame& frame);

}  // namespace milne
