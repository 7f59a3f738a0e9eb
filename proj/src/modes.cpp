#include "milne/modes.hpp"

#include <algorithm>
#include <cmath>

#include "milne/energies.hpp"

namespace milne {

ModeRhs mode_rhs(const ModeState& st, const std::optional<ModeForcing>& forcing) {
  ModeRhs r;
  r.du = st.w;
  r.dw = -2.0 * st.w - 9.0 * st.lambda * st.u;
  if (forcing) r.dw += 6.0 * 3.0 * forcing->s * forcing->S_amp;
  return r;
}

double mode_quadratic(const ModeState& st, double cE) {
  return 0.5 * st.w * st.w + 4.5 * st.lambda * st.u * st.u + cE * st.w * st.u;
}

double quadform_min_eig(double lambda, double cE) {
  // [[9 lambda / 2, cE / 2], [cE / 2, 1/2]]
  const double a = 4.5 * lambda, d = 0.5, b = 0.5 * cE;
  const double m = 0.5 * (a + d), r = std::hypot(0.5 * (a - d), b);
  return m - r;
}

namespace {
void require_lambda(double lambda) {
  if (lambda < 1.0 / 9.0 - kLambdaBorderTol) throw DomainError("modes: lambda < 1/9 violates the eigenvalue bound");
}
}  // namespace

ModeEnergy corrected_energy(const std::vector<std::pair<ModeState, double>>& modes, const CorrectionConstants& cc,
                            int s) {
  if (s < 1 || s > kMaxEnergyOrder) throw DomainError("corrected_energy: order s must lie in [1, 6]");
  ModeEnergy e;
  e.Em.assign(s, 0.0);
  e.Gm.assign(s, 0.0);
  e.min_quadform_eig = modes.empty() ? 0.0 : quadform_min_eig(modes.front().first.lambda, cc.cE);
  for (const auto& [st, mult] : modes) {
    require_lambda(st.lambda);
    if (mult < 0.0) throw DomainError("corrected_energy: negative multiplicity");
    double lp = 1.0;  // lambda^{m-1}
    for (int m = 0; m < s; ++m) {
      e.Em[m] += mult * (0.5 * lp * st.w * st.w + 4.5 * lp * st.lambda * st.u * st.u);
      e.Gm[m] += mult * lp * st.w * st.u;
      lp *= st.lambda;
    }
    e.min_quadform_eig = std::min(e.min_quadform_eig, quadform_min_eig(st.lambda, cc.cE));
  }
  for (int m = 0; m < s; ++m) e.Es += e.Em[m] + cc.cE * e.Gm[m];
  return e;
}

ModeTrajectory integrate_mode(const ModeState& start, const ModeIntegration& opt) {
  require_lambda(start.lambda);
  if (!(opt.h > 0.0) || !(opt.Tend > opt.T0)) throw DomainError("integrate_mode: need h > 0 and Tend > T0");
  const long n = std::max<long>(1, std::lround(std::ceil((opt.Tend - opt.T0) / opt.h - 1e-9)));
  const double h = (opt.Tend - opt.T0) / n;
  auto forcing = [&](double T) -> std::optional<ModeForcing> {
    if (opt.forcing_amp == 0.0) return std::nullopt;
    return ModeForcing{opt.forcing_amp * std::exp(-opt.forcing_rate * (T - opt.T0)), std::abs(opt.tau0) * std::exp(-T)};
  };
  auto at = [](ModeState s, double c, const ModeRhs& k) {
    s.u += c * k.du;
    s.w += c * k.dw;
    return s;
  };
  ModeTrajectory tr;
  tr.T.reserve(n + 1);
  tr.states.reserve(n + 1);
  ModeState y = start;
  tr.T.push_back(opt.T0);
  tr.states.push_back(y);
  for (long i = 0; i < n; ++i) {
    const double T = opt.T0 + i * h;
    const ModeRhs k1 = mode_rhs(y, forcing(T));
    const ModeRhs k2 = mode_rhs(at(y, 0.5 * h, k1), forcing(T + 0.5 * h));
    const ModeRhs k3 = mode_rhs(at(y, 0.5 * h, k2), forcing(T + 0.5 * h));
    const ModeRhs k4 = mode_rhs(at(y, h, k3), forcing(T + h));
    y.u += h / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du);
    y.w += h / 6.0 * (k1.dw + 2 * k2.dw + 2 * k3.dw + k4.dw);
    tr.T.push_back(opt.T0 + (i + 1) * h);
    tr.states.push_back(y);
  }
  return tr;
}

DecayCheck energy_decay_check(const ModeTrajectory& traj, const CorrectionConstants& cc, int s) {
  DecayCheck d;
  double worst = 0.0;  // relative to max(1, E)
  for (const ModeState& st : traj.states) {
    const ModeEnergy E = corrected_energy({{st, 1.0}}, cc, s);
    // dE/dT along the flow: the lambda^{m-1} weights factor out of e.
    const ModeRhs r = mode_rhs(st);
    double wsum = 0.0, lp = 1.0;
    for (int m = 0; m < s; ++m, lp *= st.lambda) wsum += lp;
    const double de = st.w * r.dw + 9.0 * st.lambda * st.u * r.du + cc.cE * (r.dw * st.u + st.w * r.du);
    const double dE = wsum * de;
    d.dE.push_back(dE);
    d.bound.push_back(-2.0 * cc.alpha * E.Es);
    d.max_violation = std::max(d.max_violation, dE + 2.0 * cc.alpha * E.Es);
    worst = std::max(worst, (dE + 2.0 * cc.alpha * E.Es) / std::max(1.0, E.Es));
    d.max_identity_residual = std::max(d.max_identity_residual, std::abs(dE + 2.0 * E.Es) / std::max(1.0, E.Es));
  }
  d.holds = worst <= 1e-14;
  return d;
}

std::vector<ModeSweepRow> sweep_modes(const std::vector<double>& lambdas, const ModeSweepOptions& opt, Exec exec) {
  std::vector<ModeSweepRow> rows(lambdas.size());
  auto one = [&](long i) {
    const double lambda = lambdas[i];
    const CorrectionConstants cc = correction_constants(lambda, opt.epsPrime);
    const ModeTrajectory tr = integrate_mode({lambda, opt.u0, opt.w0}, opt.integ);
    std::vector<double> E(tr.states.size());
    for (std::size_t k = 0; k < E.size(); ++k) E[k] = corrected_energy({{tr.states[k], 1.0}}, cc, opt.s).Es;
    const double Ta = opt.integ.T0 + 0.5 * (opt.integ.Tend - opt.integ.T0);
    const DecayFit fit = decay_fit(tr.T, E, Ta, opt.integ.Tend);
    ModeSweepRow& r = rows[i];
    r.lambda = lambda;
    r.alpha = cc.alpha;
    r.cE = cc.cE;
    r.fitted_rate = fit.rate;
    r.min_quadform_eig = quadform_min_eig(lambda, cc.cE);
    r.max_violation = energy_decay_check(tr, cc, opt.s).max_violation;
    r.window_a = fit.Ta;
    r.window_b = fit.Tb;
  };
  for_each_index(static_cast<long>(lambdas.size()), exec, one);
  return rows;
}

}  // namespace milne
