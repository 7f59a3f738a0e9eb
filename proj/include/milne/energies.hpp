#pragma once
// Sasaki L2 energies of an isotropic f, the rho energy, the total energy,
// decay fits and the run monitors.

#include <string>
#include <vector>

#include "milne/matter.hpp"

namespace milne {

// Frame used for |p| and the volume forms: the evolving metric g = b gamma
// or the fixed background gamma.
enum class SasakiBasis { g, gamma };

constexpr int kMaxSasakiOrder = 2;

// E_{ell,mu}(f) (not squared) for a homogeneous isotropic f on a cell of
// gamma-volume vol_gamma, with g = b gamma.  Only vertical derivatives enter.
double sasaki_energy(const RadialDistribution& f, double b, int ell, double mu,
                     SasakiBasis basis = SasakiBasis::g, double vol_gamma = 1.0);

// rho_ell = |rho| sqrt(vol_g) for every ell (gradients vanish).
double rho_energy(double rho, double b, int ell, double vol_gamma = 1.0);

// Side conditions on the total-energy weights; throws ConfigError naming
// the failing inequality.
void validate_energy_weights(double deltaE, double deltaEcal);
// e^{(1+dE)T} E6 + e^{-dEcal T} sasaki54sq
double total_energy(double E6, double sasaki54sq, double T, double deltaE, double deltaEcal);

// ---------------------------------------------------------------- fits
struct DecayFit {
  double rate = 0.0;
  double Ta = 0.0, Tb = 0.0;
  double residual = 0.0;  // RMS of the log-linear fit
  int samples = 0;
};
// Least squares of ln v against T over samples with Ta <= T <= Tb.
DecayFit decay_fit(const std::vector<double>& T, const std::vector<double>& v, double Ta, double Tb);

// ---------------------------------------------------------------- monitors
struct MonitorResult {
  std::string name;
  bool holds = true;
  double margin = 0.0;  // +inf when nothing is perturbed
  double Ta = 0.0, Tb = 0.0;
  std::string detail;
};

// E_tot(T) <= factor * E_tot(T0) e^{-(1-epsDecay)(T-T0)}; margin is the
// smallest relative gap to the envelope.
MonitorResult total_decay_monitor(const std::vector<double>& T, const std::vector<double>& Etot, double epsDecay,
                                  double factor = 4.0);

// Membership of the representable norms in the smallness ball: every entry
// of `norms` at T0 below delta.
MonitorResult smallness_monitor(double T0, const std::vector<double>& norms, double delta);

// Q_cont = sup (|N-3| + |Sigma| + E-terms) below epsLoc along the run.
MonitorResult continuation_monitor(const std::vector<double>& T, const std::vector<double>& Q, double epsLoc);

// Rescaled series on the log-time grid.  With t = -1/tau (inverse-CMC time)
// the unrescaled quantities are N_icmc = N, |X_icmc|_g~ = |X|_g,
// |grad N_icmc|_g~ = |tau| |grad N|_g, |Sigma~|_g~ = |tau| |Sigma|_g, and
// dt = t dT, so the t-integrals of (iv), (v) are T-integrals of |grad N|_g, |Sigma|_g.
struct CompletenessSeries {
  double tau0 = -1.0;
  std::vector<double> T;
  std::vector<double> N;
  std::vector<double> gmin;       // smallest eigenvalue of g relative to gamma
  std::vector<double> Xnorm;      // |X|_g
  std::vector<double> gradN;      // |grad N|_g
  std::vector<double> SigmaNorm;  // |Sigma|_g
};
struct CompletenessReport {
  std::vector<MonitorResult> conditions;  // (i)..(v)
  double tail_ratio_gradN = 0.0, tail_ratio_Sigma = 0.0;
  bool holds() const;
};
// (i) 0 < N <= NM; (ii) g~ >= c t0^2 gamma; (iii) |X_icmc| t <= Xbound;
// (iv), (v) integrability on (t0, inf), decided by tail ratio < 0.5.
// Conditions whose deviation series vanish identically get margin +inf.
CompletenessReport completeness_monitor(const CompletenessSeries& s, double NM = 3.0, double c = 0.5,
                                        double Xbound = 10.0);
// Delta I(Te/2 -> Te) / Delta I(Te/4 -> Te/2), I = int y dT, Te = T.back().
// 0 when y vanishes on both windows.
double tail_ratio(const std::vector<double>& T, const std::vector<double>& y);

}  // namespace milne
