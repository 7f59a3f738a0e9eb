#include "milne/matter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "milne/energies.hpp"
#include "milne/quadrature.hpp"

namespace milne {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr int kCellPoints = 4;   // GL points per radial cell
constexpr int kPolarPoints = 16;  // GL in cos(theta), anisotropic fallback
constexpr int kAzimuthPoints = 32;
}  // namespace

// ---------------------------------------------------------------- RadialDistribution
RadialDistribution::RadialDistribution(double dq, double qmax, std::vector<double> f)
    : dq_(dq), qmax_(qmax), f_(std::move(f)) {
  if (!(dq_ > 0.0)) throw DomainError("RadialDistribution: dq must be positive");
  if (f_.size() < 2) throw DomainError("RadialDistribution: need at least one cell");
  if (qmax_ < 0.0 || qmax_ > extent() * (1.0 + 1e-12)) throw DomainError("RadialDistribution: qmax outside grid");
  for (double& v : f_) {
    if (!std::isfinite(v)) throw DomainError("RadialDistribution: non-finite value");
    if (v < 0.0) throw DomainError("RadialDistribution: f must be nonnegative");
  }
  // compact support
  for (std::size_t i = 0; i < f_.size(); ++i)
    if (static_cast<double>(i) * dq_ > qmax_ * (1.0 + 1e-12)) f_[i] = 0.0;
  if (qmax_ > 0.0 && qmax_ < 3.0 * dq_) throw DomainError("RadialDistribution: support narrower than 3 cells");
}

RadialDistribution RadialDistribution::sample(const std::function<double(double)>& F, double qmax, int cells,
                                              double extent) {
  if (cells < 4) throw DomainError("RadialDistribution: too few cells");
  if (!(qmax > 0.0)) return RadialDistribution(1.0 / cells, 0.0, std::vector<double>(cells + 1, 0.0));
  if (extent < 1.0) throw DomainError("RadialDistribution: extent must be >= 1");
  const double dq = extent * qmax / cells;
  std::vector<double> f(cells + 1, 0.0);
  for (int i = 0; i <= cells; ++i) {
    const double q = i * dq;
    if (q <= qmax) f[i] = std::max(0.0, F(q));
  }
  return RadialDistribution(dq, qmax, std::move(f));
}

RadialDistribution RadialDistribution::top_hat(double f0, double Q, int cells, double extent) {
  return sample([f0](double) { return f0; }, Q, cells, extent);
}

RadialDistribution RadialDistribution::bump(double f0, double Q, int cells, double extent) {
  return sample([f0, Q](double q) { return f0 * std::pow(1.0 - sq(q / Q), 4); }, Q, cells, extent);
}

bool RadialDistribution::empty() const {
  return qmax_ <= 0.0 || std::all_of(f_.begin(), f_.end(), [](double v) { return v == 0.0; });
}

int RadialDistribution::stencil_start(double q) const {
  const int last = std::min(cells(), static_cast<int>(std::floor(qmax_ / dq_ + 1e-9)));
  int i = static_cast<int>(std::floor(q / dq_)) - 1;
  i = std::min(i, last - 3);
  return std::max(i, -1);
}

namespace {
struct Lagrange4 {
  double v[4], d[4], dd[4];
};
Lagrange4 lagrange4(double t) {
  Lagrange4 L;
  L.v[0] = -(t - 1) * (t - 2) * (t - 3) / 6.0;
  L.v[1] = t * (t - 2) * (t - 3) / 2.0;
  L.v[2] = -t * (t - 1) * (t - 3) / 2.0;
  L.v[3] = t * (t - 1) * (t - 2) / 6.0;
  L.d[0] = -(3 * t * t - 12 * t + 11) / 6.0;
  L.d[1] = (3 * t * t - 10 * t + 6) / 2.0;
  L.d[2] = -(3 * t * t - 8 * t + 3) / 2.0;
  L.d[3] = (3 * t * t - 6 * t + 2) / 6.0;
  L.dd[0] = -(t - 2);
  L.dd[1] = 3 * t - 5;
  L.dd[2] = -(3 * t - 4);
  L.dd[3] = t - 1;
  return L;
}
}  // namespace

#define MILNE_RADIAL_EVAL(FIELD, SCALE)                                       \
  if (q < 0.0) q = -q;                                                        \
  if (qmax_ <= 0.0 || q > qmax_) return 0.0;                                  \
  const int i0 = stencil_start(q);                                            \
  const Lagrange4 L = lagrange4(q / dq_ - i0);                                \
  double acc = 0.0;                                                           \
  for (int k = 0; k < 4; ++k) acc += L.FIELD[k] * f_[std::abs(i0 + k)];       \
  return acc * (SCALE);

double RadialDistribution::value(double q) const { MILNE_RADIAL_EVAL(v, 1.0) }

double RadialDistribution::derivative(double q) const {
  const double sign = q < 0.0 ? -1.0 : 1.0;
  return sign * [&]() -> double { MILNE_RADIAL_EVAL(d, 1.0 / dq_) }();
}

double RadialDistribution::second_derivative(double q) const { MILNE_RADIAL_EVAL(dd, 1.0 / (dq_ * dq_)) }

#undef MILNE_RADIAL_EVAL

double RadialDistribution::integrate(const std::function<double(double, double)>& w) const {
  if (qmax_ <= 0.0) return 0.0;
  const QuadratureRule& r = gauss_legendre(kCellPoints);
  double sum = 0.0;
  for (int k = 0; k * dq_ < qmax_; ++k) {
    const double a = k * dq_, b = std::min((k + 1) * dq_, qmax_);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double cell = 0.0;
    for (int i = 0; i < kCellPoints; ++i) {
      const double q = c + h * r.x[i];
      cell += r.w[i] * w(q, value(q)) * q * q;
    }
    sum += h * cell;
  }
  return kFourPi * sum;
}

RadialDistribution RadialDistribution::dilated(double dA) const {
  const double qnew = qmax_ * std::exp(dA);
  int cells_new = cells();
  while (cells_new * dq_ < qnew) ++cells_new;
  std::vector<double> f(cells_new + 1, 0.0);
  const double shrink = std::exp(-dA);
  for (int i = 0; i <= cells_new; ++i) {
    const double q = i * dq_;
    if (q <= qnew) f[i] = std::max(0.0, value(std::min(q * shrink, qmax_)));
  }
  return RadialDistribution(dq_, qnew, std::move(f));
}

// ---------------------------------------------------------------- moments
namespace {

// Accumulates the kernels of one momentum with measure weight w
// (w = f sqrt(g) d^3p, or a particle weight).
struct MomentAccumulator {
  double rho = 0, eta = 0;
  Vec3 j = Vec3::Zero();
  Mat3 T = Mat3::Zero();
  Mat3 Sv = Mat3::Zero();  // int v_l v_l^T / pund (lower)

  void add(const LocalGeometry& geom, const TimeFrame& frame, const Vec3& p, double w) {
    const double p0 = kinetic_p0(geom, p, frame);
    const double pund = geom.N * p0;
    const Vec3 v = p + (p0 / frame.tau) * geom.X;
    const Vec3 vl = geom.g * v;
    rho += w * pund;
    j += w * p;
    eta += w * v.dot(vl) / pund;
    T += (w / pund) * p * p.transpose();
    Sv += (w / pund) * vl * vl.transpose();
  }
  void merge(const MomentAccumulator& o) {
    rho += o.rho;
    eta += o.eta;
    j += o.j;
    T += o.T;
    Sv += o.Sv;
  }
};

MatterMoments finish(const MomentAccumulator& a, const LocalGeometry& geom, const TimeFrame& frame) {
  const double tau2 = sq(frame.tau);
  MatterMoments m;
  m.rho = a.rho;
  m.j = a.j;
  m.etaUnder = a.eta;
  m.Tunder = a.T;
  m.S = tau2 * a.Sv + 0.5 * geom.g * (m.rho - tau2 * m.etaUnder);
  m.eta = m.rho + tau2 * m.etaUnder;
  m.trT = (geom.g * m.Tunder).trace();
  return m;
}

// E with E^T g E = 1: maps orthonormal components to coordinate momenta.
Mat3 orthonormal_frame(const Mat3& g) {
  const Eigen::LLT<Mat3> llt(g);
  if (llt.info() != Eigen::Success) throw DomainError("moments: metric not positive definite");
  return Mat3(llt.matrixL()).transpose().inverse();
}

// Product rule over momentum space: radial cells x GL(cos theta) x trapezoid(phi).
template <class Fn>
void for_each_momentum(const RadialDistribution& f, const Mat3& E, Fn&& fn) {
  if (f.qmax() <= 0.0) return;
  const QuadratureRule& rr = gauss_legendre(kCellPoints);
  const QuadratureRule& rc = gauss_legendre(kPolarPoints);
  const double dphi = 2.0 * std::numbers::pi / kAzimuthPoints;
  for (int k = 0; k * f.dq() < f.qmax(); ++k) {
    const double a = k * f.dq(), b = std::min((k + 1) * f.dq(), f.qmax());
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < kCellPoints; ++i) {
      const double q = c + h * rr.x[i];
      const double Fq = f.value(q);
      if (Fq == 0.0) continue;
      const double wr = h * rr.w[i] * q * q * Fq;
      for (int ic = 0; ic < kPolarPoints; ++ic) {
        const double ct = rc.x[ic], st = std::sqrt(1.0 - ct * ct);
        for (int ip = 0; ip < kAzimuthPoints; ++ip) {
          const double ph = ip * dphi;
          const Vec3 n(st * std::cos(ph), st * std::sin(ph), ct);
          fn(Vec3(E * (q * n)), wr * rc.w[ic] * dphi);
        }
      }
    }
  }
}

}  // namespace

MatterMoments moments_from_distribution(const RadialDistribution& f, const LocalGeometry& geom,
                                        const TimeFrame& frame) {
  require_admissible(geom, "moments_from_distribution");
  if (geom.X.isZero(0.0)) {
    // p0 depends on q only; angular integrals done by hand.
    const double tau2 = sq(frame.tau);
    MatterMoments m;
    m.rho = f.integrate([&](double q, double F) { return F * std::sqrt(1.0 + tau2 * q * q); });
    m.etaUnder = f.integrate([&](double q, double F) { return F * q * q / std::sqrt(1.0 + tau2 * q * q); });
    const Mat3 ginv = geom.ginv();
    m.Tunder = (m.etaUnder / 3.0) * ginv;
    m.S = geom.g * (tau2 * m.etaUnder / 3.0 + 0.5 * (m.rho - tau2 * m.etaUnder));
    m.eta = m.rho + tau2 * m.etaUnder;
    m.trT = m.etaUnder;
    return m;
  }
  MomentAccumulator acc;
  for_each_momentum(f, orthonormal_frame(geom.g), [&](const Vec3& p, double w) { acc.add(geom, frame, p, w); });
  return finish(acc, geom, frame);
}

MatterMoments moments_from_ensemble(const ParticleEnsemble& ens, const LocalGeometry& geom, const TimeFrame& frame,
                                    Exec exec) {
  require_admissible(geom, "moments_from_ensemble");
  const long n = static_cast<long>(ens.particles.size());
  std::vector<MomentAccumulator> parts(n);
  auto one = [&](long i) {
    const Particle& pt = ens.particles[i];
    if (!pt.flagged) parts[i].add(geom, frame, pt.state.p, pt.weight);
  };
  for_each_index(n, exec, one);
  MomentAccumulator total;
  for (const auto& a : parts) total.merge(a);
  return finish(total, geom, frame);
}

double eta_direct(const RadialDistribution& f, const LocalGeometry& geom, const TimeFrame& frame) {
  require_admissible(geom, "eta_direct");
  // Unrescaled: rho~ = N~^2 int f (p~^0)^2 mu~, g~^ab T~_ab = int f g~^ab p~_a p~_b mu~,
  // mu~ = N~ sqrt(g~) d^3p~ / |p~_0|; with p~ = tau^2 (p0, p) and d^3p~ sqrt(g~)
  // = |tau|^3 sqrt(g) d^3p.
  const Eigen::Matrix4d G = spacetime_metric(geom, frame);
  const double tau = frame.tau, s = frame.s, tau2 = tau * tau;
  const double Nt = geom.N / tau2;
  const Mat3 gtinv = tau2 * geom.ginv();
  auto kernel = [&](const Vec3& p) {
    Eigen::Vector4d pt;
    pt << kinetic_p0(geom, p, frame), p;
    pt *= tau2;
    const Eigen::Vector4d pl = G * pt;
    const double mu = Nt * s * s * s / std::abs(pl(0));
    const Vec3 ps = pl.tail<3>();
    return (Nt * Nt * pt(0) * pt(0) + ps.dot(gtinv * ps)) * mu;
  };
  const Mat3 E = orthonormal_frame(geom.g);
  double total = 0.0;
  if (geom.X.isZero(0.0)) {
    // isotropic integrand: one direction carries the whole sphere
    const Vec3 e = E.col(0);
    total = f.integrate([&](double q, double F) { return F * kernel(q * e); });
  } else {
    for_each_momentum(f, E, [&](const Vec3& p, double w) { total += w * kernel(p); });
  }
  return total / (s * s * s);
}

EinsteinSources einstein_sources(const MatterMoments& m, const LocalGeometry& geom) {
  EinsteinSources src;
  src.rho = conversion::rho_coupling * m.rho;
  src.eta = conversion::eta_coupling * m.eta;
  src.j = conversion::j_coupling * (geom.g * m.j);
  src.S = conversion::S_coupling * m.S;
  return src;
}

// ---------------------------------------------------------------- continuity
RhoJ continuity_rhs(const RhoJ& y, const ContinuitySample& smp) {
  const LocalGeometry& g = smp.geom;
  const double tau = smp.frame.tau, s = smp.frame.s, tau2 = tau * tau, N = g.N;
  ContinuityGradients grad;
  if (smp.grad) {
    grad = *smp.grad;
  } else {
    const bool flat = !g.d || (g.d->dN.isZero(0.0) && g.d->dX.isZero(0.0));
    if (!g.X.isZero(0.0) || !flat)
      throw ContractViolation("continuity_rhs: inhomogeneous sample without gradient data");
  }
  const Mat3& T = smp.Tunder;
  const double gT = (g.g * T).trace();
  const double sT = (g.Sigma * T).trace();
  const Mat3 Sig_up = g.ginv() * g.Sigma;  // Sigma^a_b
  RhoJ r;
  r.rho = (3.0 - N) * y.rho - g.X.dot(grad.grad_rho) + tau / N * grad.div_N2j - tau2 * (N / 3.0) * gT -
          tau2 * N * sT;
  r.j = (5.0 / 3.0) * (3.0 - N) * y.j - grad.nabla_j * g.X - grad.nablaX_up * y.j + tau * grad.div_NT -
        2.0 * N * Sig_up * y.j - (y.rho / s) * grad.gradN_up;
  return r;
}

RhoJ continuity_step(const RhoJ& y, const std::array<ContinuitySample, 3>& smp, double h) {
  auto axpy = [](const RhoJ& a, double c, const RhoJ& k) { return RhoJ{a.rho + c * k.rho, a.j + c * k.j}; };
  const RhoJ k1 = continuity_rhs(y, smp[0]);
  const RhoJ k2 = continuity_rhs(axpy(y, 0.5 * h, k1), smp[1]);
  const RhoJ k3 = continuity_rhs(axpy(y, 0.5 * h, k2), smp[1]);
  const RhoJ k4 = continuity_rhs(axpy(y, h, k3), smp[2]);
  return RhoJ{y.rho + h / 6.0 * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho),
              y.j + h / 6.0 * (k1.j + 2 * k2.j + 2 * k3.j + k4.j)};
}

// ---------------------------------------------------------------- bounds
double cauchy_schwarz_constant(double mu) {
  if (!(mu > 1.5)) throw DomainError("cauchy_schwarz_constant: needs mu > 3/2");
  // 4 pi int q^2 (1+q^2)^-mu dq = 2 pi B(3/2, mu - 3/2)
  const double beta = std::tgamma(1.5) * std::tgamma(mu - 1.5) / std::tgamma(mu);
  return std::sqrt(2.0 * std::numbers::pi * beta);
}

MomentBoundReport moment_bound_check(const RadialDistribution& f, const LocalGeometry& geom, const TimeFrame& frame,
                                     int ell, double vol_gamma) {
  MomentBoundReport r;
  r.outside_lemma = ell < 4;
  const int ell_eff = std::min(ell, kMaxSasakiOrder);
  // g = b gamma(x)
  const double b = std::cbrt(geom.g.determinant() / chart::metric(geom.x).determinant());
  const double vol = std::pow(b, 1.5) * vol_gamma;
  const double Cp = cauchy_schwarz_constant(2.0);
  r.C_printed = Cp * std::sqrt(vol);
  r.C_used = Cp;

  const MatterMoments m = moments_from_distribution(f, geom, frame);
  const double E3 = sasaki_energy(f, b, ell_eff, 3.0, SasakiBasis::g, vol_gamma);
  const double E4 = sasaki_energy(f, b, ell_eff, 4.0, SasakiBasis::g, vol_gamma);
  const double sv = std::sqrt(vol);
  const double lead = std::max(1.0, frame.s);  // N p0 <= max(1,|tau|) pbar

  r.rho_lhs = std::abs(m.rho) * sv;
  r.rho_rhs = lead * Cp * E3;
  r.j_lhs = std::sqrt(std::max(0.0, norm2(geom.g, m.j))) * sv;
  r.j_rhs = Cp * E3;
  r.eta_lhs = std::abs(m.etaUnder) * sv;
  r.eta_rhs = Cp * E4;
  const Mat3 gl = geom.g;
  r.T_lhs = std::sqrt(std::max(0.0, (gl * m.Tunder * gl * m.Tunder).trace())) * sv;
  r.T_rhs = Cp * E4;
  const double CS = std::max(std::sqrt(3.0) / 2.0, (1.0 + std::sqrt(3.0) / 2.0) * Cp);
  r.S_lhs = std::sqrt(std::max(0.0, tensor_norm2(geom.ginv(), m.S))) * sv;
  r.S_rhs = CS * (rho_energy(m.rho, b, ell_eff, vol_gamma) + sq(frame.tau) * E4);

  const double tol = 1e-12;
  auto ok = [tol](double l, double rr) { return l <= rr * (1.0 + tol) + tol; };
  r.holds = ok(r.rho_lhs, r.rho_rhs) && ok(r.j_lhs, r.j_rhs) && ok(r.eta_lhs, r.eta_rhs) && ok(r.T_lhs, r.T_rhs) &&
            ok(r.S_lhs, r.S_rhs);
  return r;
}

// ---------------------------------------------------------------- pressure rate
PressureRate pressure_time_derivative_reduced(const RadialDistribution& f, const LocalGeometry& geom,
                                              const TimeFrame& frame, const FieldRates& rates) {
  if (!geom.X.isZero(0.0) || !rates.dTX.isZero(0.0))
    throw UnsupportedMode("pressure_time_derivative_reduced: only X = 0 is supported");
  require_admissible(geom, "pressure_time_derivative_reduced");
  const double tau2 = sq(frame.tau), N = geom.N;
  const double c = (geom.ginv() * rates.dTg).trace() / 3.0;
  const double I2 = f.integrate([&](double q, double F) { return F * q * q / std::sqrt(1.0 + tau2 * q * q); });
  const double I4 = f.integrate([&](double q, double F) { return F * std::pow(q, 4) / std::pow(1.0 + tau2 * q * q, 1.5); });
  const double k = 1.0 - N / 3.0;
  // Terms surviving X = 0 (isotropic f kills the Sigma contractions).
  const double t_gdot = c * I2;                        // |v|^2_gdot / phat
  const double t_trace = 6.0 * k * I2;                 // 2 Gamma^e_e
  const double t_vert = 2.0 * k * (2.0 * I2 - tau2 * I4);  // 2 Gamma^e_u p^u B_e
  const double t_tau = 2.0 * tau2 * I4;                // explicit tau^2 |p|^2 bracket
  const double t_phat = -(1.0 + 0.5 * c) * tau2 * I4;  // d_T phat
  const double t_vol = 3.0 * c * I2;                   // g^ab gdot_ab
  PressureRate r;
  r.printed = t_gdot + t_trace + t_vert + t_tau + t_phat + t_vol;
  // d sqrt(g) = (1/2) g^ab gdot_ab sqrt(g)
  r.transport_consistent = r.printed - 0.5 * t_vol;
  return r;
}

}  // namespace milne
