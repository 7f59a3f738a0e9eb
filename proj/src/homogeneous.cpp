#include "milne/homogeneous.hpp"

#include <algorithm>
#include <cmath>

#include "milne/energies.hpp"

namespace milne {

double solve_lapse_algebraic(double Sigma2, double sEta) {
  if (sEta < 0.0 || Sigma2 < 0.0) throw DomainError("solve_lapse_algebraic: sources must be nonnegative");
  return 3.0 / (1.0 + 3.0 * Sigma2 + 3.0 * sEta);
}

double hamiltonian_constraint_b(double rho, const TimeFrame& frame) {
  const double x = 6.0 * frame.s * rho;
  if (!(x < 1.0)) throw ConstraintSingular("hamiltonian_constraint_b: s*rho >= 1/6");
  return 1.0 / (1.0 - x);
}

HomogeneousState constrained_initial_state(const RadialDistribution& f, const TimeFrame& frame) {
  HomogeneousState st;
  st.f = f;
  st.frame = frame;
  const LocalGeometry geom;  // moments in q = |p|_g do not see b
  st.b = hamiltonian_constraint_b(moments_from_distribution(f, geom, frame).rho, frame);
  return st;
}

namespace {

struct Kinetic {
  double rho = 0, etaUnder = 0;
};

// Moments of f0(q e^{-A}) by substitution q = q' e^{A}.
Kinetic kinetic_moments(const RadialDistribution& f0, double A, double tau) {
  const double e = std::exp(A), e3 = e * e * e, t2 = tau * tau * e * e;
  Kinetic k;
  k.rho = e3 * f0.integrate([&](double q, double F) { return F * std::sqrt(1.0 + t2 * q * q); });
  k.etaUnder = e3 * e * e * f0.integrate([&](double q, double F) { return F * q * q / std::sqrt(1.0 + t2 * q * q); });
  return k;
}

struct Y {
  double b, A, rhoc;
};

struct Eval {
  Y dy;
  Kinetic m;
  double N;
};

Eval rhs(const RadialDistribution& f0, double tau0, double T, const Y& y) {
  const TimeFrame fr = make_time_frame(tau0, T);
  Eval e;
  e.m = kinetic_moments(f0, y.A, fr.tau);
  const double tau2 = fr.tau * fr.tau;
  e.N = solve_lapse_algebraic(0.0, fr.s * (e.m.rho + tau2 * e.m.etaUnder));
  e.dy.A = 1.0 - e.N / 3.0;
  e.dy.b = 2.0 * (e.N / 3.0 - 1.0) * y.b;
  e.dy.rhoc = (3.0 - e.N) * y.rhoc - tau2 * (e.N / 3.0) * e.m.etaUnder;
  return e;
}

Y axpy(const Y& y, double h, const Y& k) { return {y.b + h * k.b, y.A + h * k.A, y.rhoc + h * k.rhoc}; }

}  // namespace

HomogeneousRun evolve_homogeneous(const HomogeneousState& initial, const HomogeneousOptions& opt) {
  const double T0 = initial.frame.T, tau0 = initial.frame.tau0;
  if (!(opt.h > 0.0) || !(opt.Tend > T0)) throw DomainError("evolve_homogeneous: need h > 0 and Tend > T0");
  if (!(initial.b > 0.0)) throw DomainError("evolve_homogeneous: b must be positive");
  const long n = std::max<long>(1, std::lround(std::ceil((opt.Tend - T0) / opt.h - 1e-9)));
  const double h = (opt.Tend - T0) / n;
  const long every = std::max(1, opt.output_every);
  const RadialDistribution& f0 = initial.f;

  HomogeneousRun run;
  Y y{initial.b, 0.0, kinetic_moments(f0, 0.0, initial.frame.tau).rho};

  auto log_row = [&](long step) {
    const double T = T0 + step * h;
    const TimeFrame fr = make_time_frame(tau0, T);
    const Eval e = rhs(f0, tau0, T, y);
    HomogeneousRow r;
    r.T = T;
    r.tau = fr.tau;
    r.b_ode = y.b;
    r.b_constraint = hamiltonian_constraint_b(e.m.rho, fr);
    r.N = e.N;
    r.rho = e.m.rho;
    r.rho_continuity = y.rhoc;
    r.eta_under = e.m.etaUnder;
    r.tau2_eta_under = fr.tau * fr.tau * e.m.etaUnder;
    r.trT = e.m.etaUnder;
    r.S_scalar = 0.5 * e.m.rho - r.tau2_eta_under / 6.0;
    r.G = f0.qmax() * std::exp(y.A);
    r.A = y.A;
    if (opt.energies) {
      const RadialDistribution ft = f0.dilated(y.A);
      r.sasaki_2_3 = sasaki_energy(ft, y.b, 2, 3.0, SasakiBasis::g, opt.vol_gamma);
      r.sasaki_2_4 = sasaki_energy(ft, y.b, 2, 4.0, SasakiBasis::g, opt.vol_gamma);
      r.rho_energy = rho_energy(e.m.rho, y.b, 2, opt.vol_gamma);
    }
    run.max_constraint_gap = std::max(run.max_constraint_gap, std::abs(r.b_ode - r.b_constraint));
    run.max_continuity_gap = std::max(run.max_continuity_gap, std::abs(r.rho - r.rho_continuity));
    run.rows.push_back(r);
  };

  run.min_N = run.max_N = rhs(f0, tau0, T0, y).N;
  for (long i = 0; i <= n; ++i) {
    if (i % every == 0 || i == n) log_row(i);
    if (i == n) break;
    const double T = T0 + i * h;
    const Eval k1 = rhs(f0, tau0, T, y);
    const Eval k2 = rhs(f0, tau0, T + 0.5 * h, axpy(y, 0.5 * h, k1.dy));
    const Eval k3 = rhs(f0, tau0, T + 0.5 * h, axpy(y, 0.5 * h, k2.dy));
    const Eval k4 = rhs(f0, tau0, T + h, axpy(y, h, k3.dy));
    for (const Eval* k : {&k1, &k2, &k3, &k4}) {
      run.min_N = std::min(run.min_N, k->N);
      run.max_N = std::max(run.max_N, k->N);
    }
    y.b += h / 6.0 * (k1.dy.b + 2 * k2.dy.b + 2 * k3.dy.b + k4.dy.b);
    y.A += h / 6.0 * (k1.dy.A + 2 * k2.dy.A + 2 * k3.dy.A + k4.dy.A);
    y.rhoc += h / 6.0 * (k1.dy.rhoc + 2 * k2.dy.rhoc + 2 * k3.dy.rhoc + k4.dy.rhoc);
    if (!(y.b > 0.0)) throw DomainError("evolve_homogeneous: b left the positive cone");
  }
  run.final_f = f0.dilated(y.A);
  run.final_b = y.b;
  return run;
}

}  // namespace milne
