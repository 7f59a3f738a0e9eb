#include "milne/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace milne {

double ParticleEnsemble::total_weight() const {
  double w = 0.0;
  for (const auto& pt : particles) w += pt.weight;
  return w;
}

void ParticleEnsemble::project_to_massshell(const FieldProvider& fields, const TimeFrame& frame) {
  for (auto& pt : particles) {
    const FieldSample s = fields.sample(frame.T, pt.state.x);
    pt.p0 = kinetic_p0(s.geom, pt.state.p, frame);
  }
}

double support_G(const FieldSample& fields, const Vec3& p) { return norm2(fields.geom.g, p); }

namespace {

// dp0/dT from the Gamma~^0 blocks, valid for any p0 (tracked or solved).
double p0_rate(const SpacetimeChristoffels& ch, const Vec3& p, double p0, double tau) {
  return 2.0 * p0 +
         tau * (ch.lapse_00 * p0 + 2.0 * ch.lapse_0a.dot(p) + p.dot(ch.lapse_ab * p) / p0);
}

}  // namespace

CharacteristicRhs characteristic_rhs_tracked(const CharacteristicState& state, double p0, const FieldSample& fields,
                                             const TimeFrame& frame, TransportMode mode) {
  const LocalGeometry& geom = fields.geom;
  require_admissible(geom, "characteristic_rhs");
  if (!(p0 > 0.0)) throw DomainError("characteristic_rhs: p0 must be positive");
  const double tau = frame.tau;
  const Vec3& p = state.p;
  const SpacetimeChristoffels ch = rescaled_christoffels(geom, frame, fields.rates);

  CharacteristicRhs r;
  r.dp0 = p0_rate(ch, p, p0, tau);
  if (mode == TransportMode::derived) {
    r.dx = -tau * p / p0;
    for (int a = 0; a < 3; ++a)
      r.dp(a) = 2.0 * p(a) + tau * (ch.time_time(a) * p0 + 2.0 * ch.time_space.row(a).dot(p) +
                                    p.dot(ch.spatial[a] * p) / p0);
    return r;
  }
  // Printed system, with p0 from the mass shell.
  const double q0 = kinetic_p0(geom, p, frame);
  const double N = geom.N;
  const double Kpp = p.dot(geom.K() * p);
  r.dx = -tau * p / q0;
  for (int a = 0; a < 3; ++a)
    r.dp(a) = (-tau * fields.rates.dTX(a) + ch.gamma_star(a) / tau) * q0 - 2.0 * p(a) +
              2.0 * ch.gamma_star_star.row(a).dot(p) +
              (Kpp * geom.X(a) / N + tau * p.dot(ch.spatial_g[a] * p)) / q0;
  return r;
}

CharacteristicRhs characteristic_rhs(const CharacteristicState& state, const FieldSample& fields,
                                     const TimeFrame& frame, TransportMode mode) {
  return characteristic_rhs_tracked(state, kinetic_p0(fields.geom, state.p, frame), fields, frame, mode);
}

namespace {

struct Y {
  Vec3 x, p;
  double p0;
};

Y axpy(const Y& y, double h, const CharacteristicRhs& k) { return {y.x + h * k.dx, y.p + h * k.dp, y.p0 + h * k.dp0}; }

// Derived RHS by direct contraction with p: the blocks of
// rescaled_christoffels are never formed.  Agrees with the reference to rounding.
CharacteristicRhs derived_rhs_fast(const Vec3& p, double p0, const FieldSample& fs, double tau) {
  const LocalGeometry& geom = fs.geom;
  if (!geom.d) throw ContractViolation("characteristic_rhs: spatial derivatives missing");
  require_admissible(geom, "characteristic_rhs");
  if (!(p0 > 0.0)) throw DomainError("characteristic_rhs: p0 must be positive");
  const SpatialDerivatives& d = *geom.d;
  const double N = geom.N;
  const Vec3& X = geom.X;
  const Mat3 gi = geom.g.inverse();
  const Mat3 K = geom.Sigma + geom.g / 3.0;
  // Gamma^a_bc u^b v^c
  auto gamma_uv = [&](const Vec3& u, const Vec3& v) {
    const Mat3 Mu = u(0) * d.dg[0] + u(1) * d.dg[1] + u(2) * d.dg[2];
    const Mat3 Mv = v(0) * d.dg[0] + v(1) * d.dg[1] + v(2) * d.dg[2];
    Vec3 low = 0.5 * (Mu * v + Mv * u);
    for (int k = 0; k < 3; ++k) low(k) -= 0.5 * u.dot(d.dg[k] * v);
    return Vec3(gi * low);
  };
  const bool still = (X.array() == 0.0).all() && (d.dX.array() == 0.0).all();
  const Vec3 Kp = K * p, KX = K * X;
  const double pKp = p.dot(Kp), KXX = X.dot(KX), XdN = X.dot(d.dN);
  const Vec3 Gpp = gamma_uv(p, p);
  const Vec3 nablaX_p = still ? Vec3::Zero() : Vec3(d.dX * p + gamma_uv(p, X));
  const Vec3 nablaX_X = still ? Vec3::Zero() : Vec3(d.dX * X + gamma_uv(X, X));

  const Vec3 gss_p = -N * (gi * (geom.Sigma * p)) + (1.0 - N / 3.0) * p + nablaX_p - X * (d.dN.dot(p) / N) +
                     X * (KX.dot(p) / N);
  const Vec3 gstar = -X - (2.0 / 3.0) * (N - 3.0) * X + nablaX_X - 2.0 * N * (gi * (geom.Sigma * X)) +
                     N * (gi * d.dN) + ((fs.rates.dTN - XdN + KXX) / N) * X;
  const Vec3 time_time = (-fs.rates.dTX + gstar) / (tau * tau);
  const Vec3 time_space_p = (gss_p - p) / tau;

  CharacteristicRhs r;
  r.dx = -tau * p / p0;
  r.dp = 2.0 * p + tau * (time_time * p0 + 2.0 * time_space_p + (Gpp + X * (pKp / N)) / p0);
  const double l00 = (-2.0 * N - fs.rates.dTN + XdN - KXX) / (N * tau);
  r.dp0 = 2.0 * p0 + tau * (l00 * p0 + 2.0 * (d.dN - KX).dot(p) / N - tau * pKp / (N * p0));
  return r;
}

CharacteristicRhs eval(const FieldProvider& fields, double tau0, double T, const Y& y, TransportMode mode) {
  const TimeFrame frame = make_time_frame(tau0, T);
  if (mode == TransportMode::derived) return derived_rhs_fast(y.p, y.p0, fields.sample(T, y.x), frame.tau);
  return characteristic_rhs_tracked({y.x, y.p}, y.p0, fields.sample(T, y.x), frame, mode);
}

Y rk4(const FieldProvider& fields, double tau0, double T, double h, const Y& y, TransportMode mode) {
  const CharacteristicRhs k1 = eval(fields, tau0, T, y, mode);
  const CharacteristicRhs k2 = eval(fields, tau0, T + 0.5 * h, axpy(y, 0.5 * h, k1), mode);
  const CharacteristicRhs k3 = eval(fields, tau0, T + 0.5 * h, axpy(y, 0.5 * h, k2), mode);
  const CharacteristicRhs k4 = eval(fields, tau0, T + h, axpy(y, h, k3), mode);
  Y out = y;
  out.x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.p += h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  out.p0 += h / 6.0 * (k1.dp0 + 2.0 * k2.dp0 + 2.0 * k3.dp0 + k4.dp0);
  return out;
}

double mixed_norm(const Mat3& g, const Mat3& A) {  // A^a_c
  return std::sqrt(std::max(0.0, (g * A * g.inverse() * A.transpose()).trace()));
}

NormSample local_norms(const FieldSample& s, const TimeFrame& frame) {
  const LocalGeometry& geom = s.geom;
  const Mat3 gi = geom.ginv();
  NormSample n;
  n.T = frame.T;
  double dX = 0.0, dN = 0.0;
  if (geom.d) {
    dX = mixed_norm(geom.g, geom.d->dX);
    dN = std::sqrt(norm2(gi, geom.d->dN));
  }
  n.X = std::sqrt(norm2(geom.g, geom.X)) + dX;
  n.Sigma = std::sqrt(tensor_norm2(gi, geom.Sigma));
  n.Nm3 = std::abs(geom.N - 3.0) + dN;
  n.dTX = std::sqrt(norm2(geom.g, s.rates.dTX));
  const SpacetimeChristoffels ch = rescaled_christoffels(geom, frame, s.rates);
  n.gstar = std::sqrt(norm2(geom.g, ch.gamma_star));
  n.gstarstar = mixed_norm(geom.g, ch.gamma_star_star);
  return n;
}

struct ParticleTrace {
  std::vector<TrajectoryRow> rows;
  std::vector<NormSample> norms;
  Particle last;
};

void trace_particle(const Particle& start, std::size_t id, const FieldProvider& fields, double tau0, double T0,
                    long nsteps, double h, const std::vector<long>& out_steps, const TransportOptions& opt,
                    ParticleTrace& tr) {
  tr.rows.assign(out_steps.size(), TrajectoryRow{});
  tr.norms.assign(out_steps.size(), NormSample{});
  tr.last = start;
  Y y{start.state.x, start.state.p, start.p0};
  std::size_t k = 0;
  auto record = [&](long step) {
    const double T = T0 + step * h;
    const TimeFrame frame = make_time_frame(tau0, T);
    TrajectoryRow& r = tr.rows[k];
    r.T = T;
    r.id = id;
    r.x = y.x;
    r.p = y.p;
    r.p0 = y.p0;
    if (tr.last.flagged) {
      r.residual = std::numeric_limits<double>::quiet_NaN();
      r.G = std::numeric_limits<double>::quiet_NaN();
      tr.norms[k].T = T;
    } else {
      const FieldSample s = fields.sample(T, y.x);
      r.residual = massshell_residual(s.geom, y.p, y.p0, frame);
      r.G = support_G(s, y.p);
      tr.norms[k] = local_norms(s, frame);
    }
    ++k;
  };
  for (long step = 0; step <= nsteps; ++step) {
    if (k < out_steps.size() && out_steps[k] == step) record(step);
    if (step == nsteps) break;
    if (tr.last.flagged) continue;  // frozen; later rows carry NaN residuals
    try {
      const Y next = rk4(fields, tau0, T0 + step * h, h, y, opt.mode);
      if (!(std::isfinite(next.p0) && next.x.allFinite() && next.p.allFinite()))
        throw DomainError("non-finite state");
      y = next;
    } catch (const std::exception&) {
      tr.last.flagged = true;
    }
  }
  tr.last.state = {y.x, y.p};
  tr.last.p0 = y.p0;
}

}  // namespace

TransportRun integrate_characteristics(const ParticleEnsemble& ensemble, const FieldProvider& fields, double tau0,
                                       double T0, double Tend, const TransportOptions& opt) {
  if (!(opt.h > 0.0)) throw DomainError("integrate_characteristics: h must be positive");
  if (!(Tend > T0)) throw DomainError("integrate_characteristics: need Tend > T0");
  const long nsteps = std::max<long>(1, std::lround(std::ceil((Tend - T0) / opt.h - 1e-9)));
  const double h = (Tend - T0) / nsteps;
  const long every = std::max(1, opt.output_every);
  std::vector<long> out_steps;
  for (long s = 0; s < nsteps; s += every) out_steps.push_back(s);
  out_steps.push_back(nsteps);

  TransportRun run;
  run.tau0 = tau0;
  for (long s : out_steps) run.T.push_back(T0 + s * h);

  const std::size_t n = ensemble.particles.size();
  std::vector<ParticleTrace> traces(n);
  if (opt.exec == Exec::parallel) {
    MILNE_OMP_DYNAMIC_LOOP
    for (long i = 0; i < static_cast<long>(n); ++i)
      trace_particle(ensemble.particles[i], i, fields, tau0, T0, nsteps, h, out_steps, opt, traces[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      trace_particle(ensemble.particles[i], i, fields, tau0, T0, nsteps, h, out_steps, opt, traces[i]);
  }

  // Serial, index-ordered reduction: identical for any thread count.
  const std::size_t nout = out_steps.size();
  run.calG.assign(nout, 0.0);
  run.max_residual.assign(nout, 0.0);
  run.norms.assign(nout, NormSample{});
  for (std::size_t k = 0; k < nout; ++k) run.norms[k].T = run.T[k];
  for (std::size_t i = 0; i < n; ++i) {
    const ParticleTrace& tr = traces[i];
    for (std::size_t k = 0; k < nout; ++k) {
      const TrajectoryRow& r = tr.rows[k];
      if (!std::isfinite(r.residual)) continue;
      if (ensemble.particles[i].weight > 0.0) run.calG[k] = std::max(run.calG[k], std::sqrt(r.G));
      run.max_residual[k] = std::max(run.max_residual[k], r.residual);
      NormSample& m = run.norms[k];
      const NormSample& q = tr.norms[k];
      m.X = std::max(m.X, q.X);
      m.Sigma = std::max(m.Sigma, q.Sigma);
      m.Nm3 = std::max(m.Nm3, q.Nm3);
      m.dTX = std::max(m.dTX, q.dTX);
      m.gstar = std::max(m.gstar, q.gstar);
      m.gstarstar = std::max(m.gstarstar, q.gstarstar);
    }
    run.final.particles.push_back(tr.last);
    if (tr.last.flagged) run.flagged.push_back(i);
  }
  if (opt.record_rows) {
    run.rows.reserve(n * nout);
    for (std::size_t k = 0; k < nout; ++k)
      for (std::size_t i = 0; i < n; ++i) run.rows.push_back(traces[i].rows[k]);
  }
  return run;
}

namespace {
// Cumulative trapezoid integral of v over T.
std::vector<double> cumtrapz(const std::vector<double>& T, const std::vector<double>& v) {
  std::vector<double> I(T.size(), 0.0);
  for (std::size_t k = 1; k < T.size(); ++k) I[k] = I[k - 1] + 0.5 * (T[k] - T[k - 1]) * (v[k] + v[k - 1]);
  return I;
}
}  // namespace

SupportBoundReport support_bound_check(const TransportRun& run, double C) {
  if (run.norms.size() != run.T.size() || run.calG.size() != run.T.size())
    throw ContractViolation("support_bound_check: norm series missing or misaligned");
  SupportBoundReport rep;
  rep.T = run.T;
  rep.measured = run.calG;
  const std::size_t n = run.T.size();
  if (n == 0) return rep;
  std::vector<double> pre(n), expo(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::abs(run.tau0) * std::exp(-run.T[k]);  // |tau(T)|; e^{-T} when tau0 = -1
    const NormSample& m = run.norms[k];
    pre[k] = s * m.dTX + m.gstar / s;
    expo[k] = m.X / s + m.Sigma + m.Nm3 + s * s * m.dTX + m.gstar + m.gstarstar;
  }
  const auto Ipre = cumtrapz(run.T, pre);
  const auto Iexp = cumtrapz(run.T, expo);
  rep.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double b = (run.calG[0] + C * Ipre[k]) * std::exp(C * Iexp[k]);
    rep.bound.push_back(b);
    // Relative margin; a tolerance covers the exact-equality background case.
    const double slack = b - run.calG[k] + 1e-12 * std::max(1.0, b);
    if (slack < 0.0) rep.holds = false;
    if (k > 0 && b > 0.0) rep.margin = std::min(rep.margin, (b - run.calG[k]) / b);  // k = 0 is equality
  }
  return rep;
}

}  // namespace milne
