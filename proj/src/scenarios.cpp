#include "milne/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "milne/einstein.hpp"

namespace milne {

using nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MonitorResult monitor(std::string name, bool holds, double margin, double Ta, double Tb, std::string detail) {
  MonitorResult m;
  m.name = std::move(name);
  m.holds = holds;
  m.margin = margin;
  m.Ta = Ta;
  m.Tb = Tb;
  m.detail = std::move(detail);
  return m;
}

// value below tol; margin (tol - value) / tol, +inf for an exact zero
MonitorResult below(std::string name, double value, double tol, double Ta, double Tb, std::string detail) {
  const double margin = value == 0.0 ? kInf : (tol - value) / tol;
  return monitor(std::move(name), value < tol, margin, Ta, Tb, std::move(detail));
}

double maxabs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }
double maxabs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

// dp minus the background geodesic spray, the part that must vanish on Milne
double geodesic_free_dp(const Vec3& dp, const SpacetimeChristoffels& ch, const Vec3& p, double p0, double tau) {
  Vec3 spray;
  for (int a = 0; a < 3; ++a) spray(a) = tau * p.dot(ch.spatial[a] * p) / p0;
  return maxabs(Vec3(dp - spray));
}

Vec3 random_in_ball(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  for (;;) {
    Vec3 x(u(rng), u(rng), u(rng));
    if (x.norm() < r) return x;
  }
}

HomogeneousRun run_hom(const ScenarioConfig& cfg, bool energies = true) {
  const RadialDistribution f = make_distribution(cfg.radial);
  const HomogeneousState st = constrained_initial_state(f, make_time_frame(cfg.tau0, cfg.T0));
  HomogeneousOptions opt;
  opt.Tend = cfg.Tend;
  opt.h = cfg.h;
  opt.output_every = cfg.homogeneous_output_every;
  opt.energies = energies;
  return evolve_homogeneous(st, opt);
}

double kinetic_tolerance(const ScenarioConfig& cfg) {
  const double dq = make_distribution(cfg.radial).dq();
  return std::max(1e-6, 5.0 * (std::pow(cfg.h, 4) + dq * dq));
}

std::vector<MonitorResult> homogeneous_monitors(const HomogeneousRun& run, const ScenarioConfig& cfg) {
  std::vector<MonitorResult> ms;
  const double Ta = run.rows.front().T, Tb = run.rows.back().T;
  const double tol = kinetic_tolerance(cfg);
  ms.push_back(below("constraint_propagation", run.max_constraint_gap, tol, Ta, Tb,
                     "|b_ode - b_constraint| <= max(1e-6, 5(h^4 + dq^2))"));
  ms.push_back(below("continuity_consistency", run.max_continuity_gap, tol, Ta, Tb,
                     "|rho_kinetic - rho_continuity| <= max(1e-6, 5(h^4 + dq^2))"));
  ms.push_back(monitor("lapse_bound", run.min_N > 0.0 && run.max_N <= 3.0,
                       run.max_N == 3.0 && run.min_N == 3.0 ? kInf : std::min(run.min_N, 3.0 - run.max_N) / 3.0, Ta,
                       Tb, "0 < N <= 3"));
  double worst = kInf;
  bool ok = true;
  for (const auto& r : run.rows) {
    const double s = std::abs(r.tau);
    const double rhs = 10.0 * (s * r.rho + s * s * s * r.eta_under);
    const double lhs = std::abs(r.N - 3.0);
    ok = ok && lhs <= rhs;
    if (rhs > 0.0) worst = std::min(worst, (rhs - lhs) / rhs);
  }
  ms.push_back(monitor("elliptic_lapse", ok, worst, Ta, Tb, "|N - 3| <= 10 (|Sigma|^2 + s rho + s^3 eta_under)"));
  return ms;
}

struct HomDecay {
  DecayFit fit_N, fit_tau2eta;
  double rho_drift = 0.0;
  bool vacuum = true;
};

HomDecay homogeneous_decay(const HomogeneousRun& run) {
  HomDecay d;
  const double Ta = run.rows.front().T, Tb = run.rows.back().T;
  const double Tmid = Ta + 0.5 * (Tb - Ta);
  std::vector<double> T, Nm3, te;
  for (const auto& r : run.rows) {
    T.push_back(r.T);
    Nm3.push_back(std::abs(r.N - 3.0));
    te.push_back(r.tau2_eta_under);
  }
  d.vacuum = std::all_of(Nm3.begin(), Nm3.end(), [](double v) { return v == 0.0; });
  if (d.vacuum) return d;
  d.fit_N = decay_fit(T, Nm3, Tmid, Tb);
  d.fit_tau2eta = decay_fit(T, te, Tmid, Tb);
  const auto it = std::find_if(run.rows.begin(), run.rows.end(), [&](const HomogeneousRow& r) { return r.T >= Tb - 1.0; });
  const double rho_end = run.rows.back().rho;
  d.rho_drift = rho_end > 0.0 ? std::abs(rho_end - it->rho) / rho_end : 0.0;
  return d;
}

std::vector<MonitorResult> decay_monitors(const HomDecay& d, double Ta, double Tb) {
  std::vector<MonitorResult> ms;
  if (d.vacuum) {
    ms.push_back(monitor("rate_lapse", true, kInf, Ta, Tb, "vacuum: N = 3 exactly"));
    ms.push_back(monitor("rate_tau2_eta_under", true, kInf, Ta, Tb, "vacuum"));
    ms.push_back(monitor("rho_drift", true, kInf, Ta, Tb, "vacuum"));
    return ms;
  }
  const double dN = std::abs(d.fit_N.rate - 1.0), dE = std::abs(d.fit_tau2eta.rate - 2.0);
  ms.push_back(monitor("rate_lapse", dN <= 0.1, (0.1 - dN) / 0.1, d.fit_N.Ta, d.fit_N.Tb, "|N-3| decay rate 1 +- 0.1"));
  ms.push_back(monitor("rate_tau2_eta_under", dE <= 0.1, (0.1 - dE) / 0.1, d.fit_tau2eta.Ta, d.fit_tau2eta.Tb,
                       "tau^2 eta_under decay rate 2 +- 0.1"));
  ms.push_back(monitor("rho_drift", d.rho_drift < 0.01, (0.01 - d.rho_drift) / 0.01, Tb - 1.0, Tb,
                       "relative rho change over the final e-fold < 1%"));
  return ms;
}

CsvTable homogeneous_table(const HomogeneousRun& run) {
  CsvTable t;
  t.header = {"T",   "tau",     "b_ode",          "b_constraint",   "N",          "rho",        "eta_under",
              "G",   "rho_continuity", "tau2_eta_under", "sasaki_2_3", "sasaki_2_4", "rho_energy"};
  for (const auto& r : run.rows)
    t.add({r.T, r.tau, r.b_ode, r.b_constraint, r.N, r.rho, r.eta_under, r.G, r.rho_continuity, r.tau2_eta_under,
           r.sasaki_2_3, r.sasaki_2_4, r.rho_energy});
  return t;
}

CsvTable moments_table(const HomogeneousRun& run) {
  CsvTable t;
  t.header = {"T", "rho", "eta_under", "tau2_eta_under", "trT_under", "S_scalar", "G"};
  for (const auto& r : run.rows) t.add({r.T, r.rho, r.eta_under, r.tau2_eta_under, r.trT, r.S_scalar, r.G});
  return t;
}

ModeSweepOptions sweep_options(const ScenarioConfig& cfg) {
  ModeSweepOptions o;
  o.integ.T0 = cfg.T0;
  o.integ.Tend = cfg.Tend;
  o.integ.h = cfg.modes.h;
  o.integ.tau0 = cfg.tau0;
  o.integ.forcing_amp = cfg.modes.forcing_amp;
  o.integ.forcing_rate = cfg.modes.forcing_rate;
  o.u0 = cfg.modes.u0;
  o.w0 = cfg.modes.w0;
  o.epsPrime = cfg.epsPrime;
  o.s = cfg.modes.order;
  return o;
}

ordered_json fit_json(const DecayFit& f) {
  return {{"rate", json_number(f.rate)},
          {"window", {json_number(f.Ta), json_number(f.Tb)}},
          {"residual", json_number(f.residual)},
          {"samples", f.samples}};
}

}  // namespace

// ---------------------------------------------------------------- shared pieces
bool ScenarioOutput::all_hold() const {
  return std::all_of(monitors.begin(), monitors.end(), [](const MonitorResult& m) { return m.holds; });
}

bool ScenarioOutput::strict_ok(double floor) const {
  return all_hold() && std::all_of(monitors.begin(), monitors.end(), [floor](const MonitorResult& m) {
           return std::isnan(m.margin) ? false : m.margin >= floor;
         });
}

ParticleEnsemble make_random_ensemble(int count, double xmax, double pmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> up(-pmax, pmax);
  ParticleEnsemble ens;
  ens.particles.reserve(count);
  for (int i = 0; i < count; ++i) {
    Particle pt;
    pt.state.x = random_in_ball(rng, xmax);
    pt.state.p = Vec3(up(rng), up(rng), up(rng));
    ens.particles.push_back(pt);
  }
  return ens;
}

RadialDistribution make_distribution(const RadialConfig& rc) {
  if (rc.profile == "top_hat") return RadialDistribution::top_hat(rc.f0, rc.Q, rc.cells, rc.extent);
  if (rc.profile == "bump") return RadialDistribution::bump(rc.f0, rc.Q, rc.cells, rc.extent);
  throw ConfigError("radial.profile: unknown profile '" + rc.profile + "'");
}

// ---------------------------------------------------------------- background
ScenarioOutput run_background_check(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.scenario = "background_check";
  const TimeFrame frame = make_time_frame(cfg.tau0, cfg.T0);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> up(-1.0, 1.0);
  BackgroundFields bg;

  CsvTable t;
  t.header = {"point_id", "x1", "x2", "x3", "ev_g", "ev_sigma", "hamiltonian", "momentum", "lapse",
              "lapse_printed", "gamma_star", "gamma_star_star", "transport_dp", "ricci", "continuity"};
  double worst = 0.0, printed_lapse = 0.0;
  for (int i = 0; i < 17; ++i) {
    const Vec3 x = i == 0 ? Vec3::Zero() : random_in_ball(rng, 3.0);
    const Vec3 p(up(rng), up(rng), up(rng));
    const LocalGeometry geom = background_geometry(x);
    const EinsteinInputs in = background_inputs(x);
    const SpacetimeChristoffels ch = rescaled_christoffels(geom, frame);
    const CharacteristicRhs cr = characteristic_rhs({x, p}, bg.sample(cfg.T0, x), frame, TransportMode::derived);
    ContinuitySample cs{geom, frame, Mat3::Zero(), std::nullopt};
    const RhoJ cont = continuity_rhs({}, cs);
    const std::vector<double> r{maxabs(ev_g_rhs(geom)),
                                maxabs(ev_sigma_rhs(in, frame)),
                                std::abs(hamiltonian_residual(in, frame)),
                                maxabs(momentum_residual(in, frame)),
                                std::abs(lapse_residual(in, frame)),
                                lapse_residual_printed(in, frame),
                                maxabs(ch.gamma_star),
                                maxabs(ch.gamma_star_star),
                                geodesic_free_dp(cr.dp, ch, p, kinetic_p0(geom, p, frame), frame.tau),
                                maxabs(Mat3(chart::ricci(x) + (2.0 / 9.0) * geom.g)),
                                std::abs(cont.rho) + maxabs(cont.j)};
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k == 5) {
        printed_lapse = std::max(printed_lapse, std::abs(r[k]));
        continue;
      }
      worst = std::max(worst, r[k]);
    }
    std::vector<double> row{double(i), x(0), x(1), x(2)};
    row.insert(row.end(), r.begin(), r.end());
    t.add(row);
  }
  const double lapse = solve_lapse_algebraic(0.0, 0.0);
  const double modes = std::abs(mode_rhs({1.0, 0.0, 0.0}).du) + std::abs(mode_rhs({1.0, 0.0, 0.0}).dw);

  // vacuum homogeneous run
  ScenarioConfig vc = cfg;
  vc.radial.f0 = 0.0;
  vc.Tend = cfg.T0 + 1.0;
  vc.h = 1e-2;
  const HomogeneousRun vr = run_hom(vc, false);
  double vac = 0.0;
  for (const auto& r : vr.rows) vac = std::max({vac, std::abs(r.b_ode - 1.0), std::abs(r.N - 3.0), r.rho});

  const double tol = cfg.monitors.background_tol;
  out.monitors.push_back(below("background_fixed_point", std::max(worst, modes), tol, cfg.T0, cfg.T0,
                               "all RHS, constraints, Gamma*, Gamma*_* vanish on (gamma, 0, 3, 0)"));
  out.monitors.push_back(monitor("algebraic_lapse", lapse == 3.0, lapse == 3.0 ? kInf : -kInf, cfg.T0, cfg.T0,
                                 "N(0, 0) = 3 exactly"));
  out.monitors.push_back(below("vacuum_homogeneous", vac, tol, cfg.T0, vc.Tend, "b = 1, N = 3, rho = 0 along vacuum run"));
  out.tables.emplace_back("background.csv", std::move(t));
  out.summary["max_residual"] = json_number(worst);
  out.summary["printed_lapse_residual"] = json_number(printed_lapse);
  out.summary["note"] = "printed lapse equation without the -1 source leaves residual -1 at the background";
  return out;
}

// ---------------------------------------------------------------- modes
ScenarioOutput run_modes(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.scenario = "modes";
  const ModeSweepOptions opt = sweep_options(cfg);
  const auto rows = sweep_modes(cfg.lambdaGrid, opt, Exec::parallel);
  CsvTable t;
  t.header = {"lambda", "alpha", "cE", "fitted_rate", "min_quadform_eig", "max_violation"};
  double viol = 0.0, rate_margin = kInf, eig = kInf;
  bool rates_ok = true;
  ordered_json windows = ordered_json::array();
  for (const auto& r : rows) {
    t.add({r.lambda, r.alpha, r.cE, r.fitted_rate, r.min_quadform_eig, r.max_violation});
    const CorrectionConstants cc = correction_constants(r.lambda, cfg.epsPrime);
    const double E0 = corrected_energy({{{r.lambda, opt.u0, opt.w0}, 1.0}}, cc, opt.s).Es;
    viol = std::max(viol, r.max_violation / std::max(1.0, E0));
    // sqrt(E_s) decays at alpha(lambda)
    const double dev = std::abs(0.5 * r.fitted_rate - r.alpha);
    rates_ok = rates_ok && dev <= 0.05;
    rate_margin = std::min(rate_margin, (0.05 - dev) / 0.05);
    eig = std::min(eig, r.min_quadform_eig);
    windows.push_back({json_number(r.window_a), json_number(r.window_b)});
  }
  const bool forced = cfg.modes.forcing_amp != 0.0;
  if (!forced)
    out.monitors.push_back(monitor("mode_decay_inequality", viol <= 1e-12, (1e-12 - std::max(viol, 0.0)) / 1e-12,
                                   cfg.T0, cfg.Tend, "dE/dT <= -2 alpha E pointwise (relative to E(T0))"));
  out.monitors.push_back(monitor("mode_rates", rates_ok, rate_margin, opt.integ.T0 + 0.5 * (cfg.Tend - cfg.T0),
                                 cfg.Tend, "fitted rate of sqrt(E_s) within 0.05 of alpha(lambda)"));
  out.monitors.push_back(monitor("coercivity", eig > 0.0, eig, cfg.T0, cfg.T0, "min eigenvalue of the quadratic form > 0"));
  out.tables.emplace_back("modes.csv", std::move(t));
  out.summary["fit_windows"] = windows;
  out.summary["forced"] = forced;
  return out;
}

// ---------------------------------------------------------------- homogeneous
ScenarioOutput run_homogeneous(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.scenario = "homogeneous";
  const HomogeneousRun run = run_hom(cfg);
  out.monitors = homogeneous_monitors(run, cfg);
  const HomDecay d = homogeneous_decay(run);
  for (auto& m : decay_monitors(d, cfg.T0, cfg.Tend)) out.monitors.push_back(m);
  out.tables.emplace_back("homogeneous.csv", homogeneous_table(run));
  out.tables.emplace_back("moments.csv", moments_table(run));
  out.summary["max_constraint_gap"] = json_number(run.max_constraint_gap);
  out.summary["max_continuity_gap"] = json_number(run.max_continuity_gap);
  out.summary["tolerance"] = json_number(kinetic_tolerance(cfg));
  if (!d.vacuum) {
    out.summary["fit_lapse"] = fit_json(d.fit_N);
    out.summary["fit_tau2_eta_under"] = fit_json(d.fit_tau2eta);
    out.summary["rho_drift"] = json_number(d.rho_drift);
  }
  return out;
}

// ---------------------------------------------------------------- characteristics
ScenarioOutput run_characteristics(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.scenario = "characteristics";
  const auto& pc = cfg.particles;
  auto fields = make_fields(pc.fields, pc.eps);
  ParticleEnsemble ens = make_random_ensemble(pc.count, pc.xmax, pc.pmax, cfg.seed);
  ens.project_to_massshell(*fields, make_time_frame(cfg.tau0, cfg.T0));
  TransportOptions opt;
  opt.mode = pc.mode == "paper_form" ? TransportMode::paper_form : TransportMode::derived;
  opt.h = cfg.h;
  opt.output_every = pc.output_every;
  opt.exec = Exec::parallel;
  const TransportRun run = integrate_characteristics(ens, *fields, cfg.tau0, cfg.T0, cfg.Tend, opt);

  CsvTable traj;
  traj.header = {"T", "particle_id", "x1", "x2", "x3", "p1", "p2", "p3", "p0", "massshell_residual", "G"};
  for (const auto& r : run.rows)
    if (r.id < static_cast<std::size_t>(pc.log_particles))
      traj.add({r.T, double(r.id), r.x(0), r.x(1), r.x(2), r.p(0), r.p(1), r.p(2), r.p0, r.residual, r.G});

  const double maxres = run.max_residual.empty() ? 0.0 : *std::max_element(run.max_residual.begin(), run.max_residual.end());
  out.monitors.push_back(below("massshell_conservation", maxres, cfg.monitors.massshell_tol, cfg.T0, cfg.Tend,
                               "|gbar(p~,p~) + 1| along characteristics"));
  out.monitors.push_back(monitor("no_flagged_particles", run.flagged.empty(), run.flagged.empty() ? kInf : -kInf,
                                 cfg.T0, cfg.Tend, "admissibility kept by every particle"));
  const double w0 = ens.total_weight(), w1 = run.final.total_weight();
  out.monitors.push_back(monitor("weight_conservation", w0 == w1, w0 == w1 ? kInf : -kInf, cfg.T0, cfg.Tend,
                                 "total ensemble weight unchanged"));

  CsvTable sup;
  sup.header = {"T", "calG", "bound", "max_residual"};
  if (pc.fields == "background") {
    double drift = 0.0;
    for (double g : run.calG)
      if (!run.calG.empty() && run.calG.front() > 0.0) drift = std::max(drift, std::abs(g / run.calG.front() - 1.0));
    out.monitors.push_back(below("support_constancy", drift, 1e-8, cfg.T0, cfg.Tend, "|calG(T)/calG(T0) - 1|"));
    for (std::size_t k = 0; k < run.T.size(); ++k) sup.add({run.T[k], run.calG[k], run.calG.front(), run.max_residual[k]});
  } else {
    const SupportBoundReport sb = support_bound_check(run, cfg.monitors.C_support);
    out.monitors.push_back(monitor("support_bound", sb.holds, sb.margin, cfg.T0, cfg.Tend,
                                   "calG below the Gronwall envelope"));
    for (std::size_t k = 0; k < run.T.size(); ++k) sup.add({run.T[k], run.calG[k], sb.bound[k], run.max_residual[k]});
  }
  out.tables.emplace_back("trajectories.csv", std::move(traj));
  out.tables.emplace_back("support.csv", std::move(sup));
  out.summary["particles"] = pc.count;
  out.summary["fields"] = pc.fields;
  out.summary["mode"] = pc.mode;
  out.summary["max_massshell_residual"] = json_number(maxres);
  return out;
}

// ---------------------------------------------------------------- composite
CompositeRun run_composite(const ScenarioConfig& cfg) {
  CompositeRun c;
  c.hom = run_hom(cfg);
  double lambda0 = cfg.lambdaGrid.front();
  for (double l : cfg.lambdaGrid) lambda0 = std::min(lambda0, l);
  c.cc = correction_constants(lambda0, cfg.epsPrime);

  ModeIntegration mi;
  mi.T0 = cfg.T0;
  mi.Tend = cfg.Tend;
  mi.h = cfg.h;
  mi.tau0 = cfg.tau0;
  mi.forcing_amp = cfg.modes.forcing_amp;
  mi.forcing_rate = cfg.modes.forcing_rate;
  std::vector<ModeTrajectory> traj(cfg.lambdaGrid.size());
  for_each_index(static_cast<long>(traj.size()), Exec::parallel, [&](long i) {
    traj[i] = integrate_mode({cfg.lambdaGrid[i], cfg.modes.u0, cfg.modes.w0}, mi);
  });
  const long nsteps = static_cast<long>(traj.front().T.size()) - 1;
  const double h = (cfg.Tend - cfg.T0) / nsteps;

  CompletenessSeries cs;
  cs.tau0 = cfg.tau0;
  for (const auto& r : c.hom.rows) {
    const long k = std::lround((r.T - cfg.T0) / h);
    std::vector<std::pair<ModeState, double>> states;
    double u2 = 0.0, w2 = 0.0;
    for (const auto& tr : traj) {
      states.emplace_back(tr.states[k], 1.0);
      u2 += sq(tr.states[k].u);
      w2 += sq(tr.states[k].w);
    }
    const double E6 = corrected_energy(states, c.cc, cfg.modes.order).Es;
    c.T.push_back(r.T);
    c.E6.push_back(E6);
    c.sasaki24.push_back(r.sasaki_2_4);
    c.Etot.push_back(total_energy(E6, sq(r.sasaki_2_4), r.T, cfg.deltaE, cfg.deltaEcal));
    c.g_modes.push_back(std::sqrt(u2));
    c.sigma_norm.push_back(std::sqrt(w2) / 6.0);
    c.Nm3.push_back(std::abs(r.N - 3.0));
    c.tau2eta.push_back(r.tau2_eta_under);
    c.rho.push_back(r.rho);
    cs.T.push_back(r.T);
    cs.N.push_back(r.N);
    cs.gmin.push_back(r.b_ode - std::sqrt(u2));
    cs.Xnorm.push_back(0.0);
    cs.gradN.push_back(0.0);
    cs.SigmaNorm.push_back(std::sqrt(w2) / 6.0);
  }
  const HomDecay d = homogeneous_decay(c.hom);
  c.fit_N = d.fit_N;
  c.fit_tau2eta = d.fit_tau2eta;
  c.rho_drift = d.rho_drift;
  const double Tmid = cfg.T0 + 0.5 * (cfg.Tend - cfg.T0);
  if (std::all_of(c.g_modes.begin(), c.g_modes.end(), [](double v) { return v > 0.0; }))
    c.fit_modes_g = decay_fit(c.T, c.g_modes, Tmid, cfg.Tend);
  c.completeness = completeness_monitor(cs, cfg.monitors.NM, cfg.monitors.gbound, cfg.monitors.Xbound);
  c.total_decay = total_decay_monitor(c.T, c.Etot, cfg.epsDecay, 4.0);
  return c;
}

ScenarioOutput run_full_report(const ScenarioConfig& cfg) {
  ScenarioOutput out;
  out.scenario = "full_report";
  const CompositeRun c = run_composite(cfg);
  const double T0 = cfg.T0, Tb = cfg.Tend;

  out.monitors = homogeneous_monitors(c.hom, cfg);
  HomDecay d;
  d.vacuum = std::all_of(c.Nm3.begin(), c.Nm3.end(), [](double v) { return v == 0.0; });
  d.fit_N = c.fit_N;
  d.fit_tau2eta = c.fit_tau2eta;
  d.rho_drift = c.rho_drift;
  for (auto& m : decay_monitors(d, T0, Tb)) out.monitors.push_back(m);

  const double floor_rate = 1.0 - cfg.deltaE - 0.05;
  if (c.fit_modes_g.samples > 0)
    out.monitors.push_back(monitor("rate_modes_g", c.fit_modes_g.rate >= floor_rate,
                                   (c.fit_modes_g.rate - floor_rate) / floor_rate, c.fit_modes_g.Ta, c.fit_modes_g.Tb,
                                   "mode-sector |g - gamma| decay rate >= 1 - deltaE - 0.05"));
  else
    out.monitors.push_back(monitor("rate_modes_g", true, kInf, T0, Tb, "no mode perturbation"));
  out.monitors.push_back(c.total_decay);
  for (const auto& m : c.completeness.conditions) out.monitors.push_back(m);

  const std::vector<double> small{c.Nm3.front(), c.g_modes.front(), c.sigma_norm.front(), std::sqrt(c.E6.front()),
                                  c.sasaki24.front()};
  out.monitors.push_back(smallness_monitor(T0, small, cfg.monitors.delta_small));
  std::vector<double> Q(c.T.size());
  for (std::size_t k = 0; k < Q.size(); ++k)
    Q[k] = c.Nm3[k] + c.sigma_norm[k] + c.g_modes[k] + std::sqrt(c.E6[k]) + c.sasaki24[k] * std::exp(-0.5 * cfg.deltaEcal * c.T[k]);
  out.monitors.push_back(continuation_monitor(c.T, Q, cfg.monitors.eps_loc));

  // per-mode corrected-energy inequality with the global constants
  if (cfg.modes.forcing_amp == 0.0) {
    double viol = 0.0;
    for (double l : cfg.lambdaGrid) {
      ModeIntegration mi;
      mi.T0 = T0;
      mi.Tend = Tb;
      mi.h = cfg.modes.h;
      const ModeTrajectory tr = integrate_mode({l, cfg.modes.u0, cfg.modes.w0}, mi);
      const double E0 = corrected_energy({{tr.states.front(), 1.0}}, c.cc, cfg.modes.order).Es;
      viol = std::max(viol, energy_decay_check(tr, c.cc, cfg.modes.order).max_violation / std::max(E0, 1e-300));
    }
    out.monitors.push_back(monitor("mode_decay_inequality", viol <= 1e-12, (1e-12 - std::max(viol, 0.0)) / 1e-12,
                                   T0, Tb, "dE/dT <= -2 alpha E with the global correction constants"));
  }

  CsvTable t;
  t.header = {"T", "N", "b", "rho", "tau2_eta_under", "g_minus_gamma_modes", "sigma_norm", "E6", "sasaki_2_4", "E_tot"};
  for (std::size_t k = 0; k < c.T.size(); ++k)
    t.add({c.T[k], c.hom.rows[k].N, c.hom.rows[k].b_ode, c.rho[k], c.tau2eta[k], c.g_modes[k], c.sigma_norm[k], c.E6[k],
           c.sasaki24[k], c.Etot[k]});
  out.tables.emplace_back("composite.csv", std::move(t));
  out.tables.emplace_back("homogeneous.csv", homogeneous_table(c.hom));
  out.tables.emplace_back("moments.csv", moments_table(c.hom));
  ScenarioOutput modes = run_modes(cfg);
  for (auto& tb : modes.tables) out.tables.push_back(std::move(tb));

  ordered_json rates;
  if (!d.vacuum) {
    rates["lapse"] = fit_json(c.fit_N);
    rates["tau2_eta_under"] = fit_json(c.fit_tau2eta);
  }
  if (c.fit_modes_g.samples > 0) rates["modes_g_minus_gamma"] = fit_json(c.fit_modes_g);
  rates["rho_drift_final_efold"] = json_number(c.rho_drift);
  out.summary["decay_rates"] = rates;
  out.summary["correction_constants"] = {{"lambda0", json_number(c.cc.lambda0)},
                                         {"alpha", json_number(c.cc.alpha)},
                                         {"cE", json_number(c.cc.cE)},
                                         {"deltaAlpha", json_number(c.cc.deltaAlpha)}};
  out.summary["tail_ratio_gradN"] = json_number(c.completeness.tail_ratio_gradN);
  out.summary["tail_ratio_Sigma"] = json_number(c.completeness.tail_ratio_Sigma);
  return out;
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg) {
  apply_thread_cap();
  if (cfg.scenario == "background_check") return run_background_check(cfg);
  if (cfg.scenario == "modes") return run_modes(cfg);
  if (cfg.scenario == "homogeneous") return run_homogeneous(cfg);
  if (cfg.scenario == "characteristics") return run_characteristics(cfg);
  if (cfg.scenario == "full_report") return run_full_report(cfg);
  throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

// ---------------------------------------------------------------- emission
ordered_json report_json(const ScenarioOutput& out, const ScenarioConfig& cfg) {
  ordered_json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["scenario"] = out.scenario;
  j["seed"] = cfg.seed;
  j["all_hold"] = out.all_hold();
  ordered_json ms = ordered_json::object();
  for (const auto& m : out.monitors)
    ms[m.name] = {{"holds", m.holds},
                  {"margin", json_number(m.margin)},
                  {"window", {json_number(m.Ta), json_number(m.Tb)}},
                  {"detail", m.detail}};
  j["monitors"] = ms;
  j["summary"] = out.summary;
  j["config"] = ordered_json::parse(config_to_json(cfg));
  return j;
}

void emit_outputs(const ScenarioOutput& out, const ScenarioConfig& cfg, const std::string& dir) {
  const std::filesystem::path root(dir);
  for (const auto& [name, table] : out.tables) write_text_file(root / name, table.to_string());
  write_text_file(root / "report.json", report_json(out, cfg).dump(2) + "\n");
}

}  // namespace milne
