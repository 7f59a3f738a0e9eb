#include "milne/energies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace milne {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_zero(const std::vector<double>& v, double ref = 0.0) {
  return std::all_of(v.begin(), v.end(), [ref](double x) { return x == ref; });
}
}  // namespace

// ---------------------------------------------------------------- Sasaki
double sasaki_energy(const RadialDistribution& f, double b, int ell, double mu, SasakiBasis basis, double vol_gamma) {
  if (ell < 0 || ell > kMaxSasakiOrder)
    throw UnsupportedMode("sasaki_energy: ell must lie in [0, 2] for isotropic grids");
  if (!(b > 0.0)) throw DomainError("sasaki_energy: b must be positive");
  // r = |p| in the chosen basis; q = |p|_g = sqrt(b) |p|_gamma.
  const bool gb = basis == SasakiBasis::g;
  const double r_per_q = gb ? 1.0 : 1.0 / std::sqrt(b);
  const double dF = gb ? 1.0 : std::sqrt(b);      // d/dr = dF * d/dq
  const double measure = gb ? 1.0 : std::pow(b, -1.5);  // r^2 dr = measure * q^2 dq
  const double vol = gb ? std::pow(b, 1.5) * vol_gamma : vol_gamma;

  const double sum = f.integrate([&](double q, double F) {
    const double r = q * r_per_q;
    const double pb2 = 1.0 + r * r;
    double acc = F * F * std::pow(pb2, mu + 2.0 * ell);
    if (ell >= 1) {
      const double F1 = dF * f.derivative(q);
      acc += std::pow(pb2, mu + 2.0 * (ell - 1)) * pb2 * F1 * F1;
      if (ell >= 2) {
        const double F2 = dF * dF * f.second_derivative(q);
        acc += std::pow(pb2, mu) * pb2 * pb2 * (F2 * F2 + 2.0 * sq(F1 / r));
      }
    }
    return acc;
  });
  return std::sqrt(std::max(0.0, vol * measure * sum));
}

double rho_energy(double rho, double b, int ell, double vol_gamma) {
  if (ell < 0) throw DomainError("rho_energy: ell must be nonnegative");
  if (!(b > 0.0)) throw DomainError("rho_energy: b must be positive");
  return std::abs(rho) * std::sqrt(std::pow(b, 1.5) * vol_gamma);
}

void validate_energy_weights(double deltaE, double deltaEcal) {
  if (!(deltaE > 0.0)) throw ConfigError("deltaE > 0 violated");
  if (!(deltaEcal > 0.0)) throw ConfigError("deltaEcal > 0 violated");
  if (!(deltaE < 0.5)) throw ConfigError("deltaE < 1/2 violated");
  if (!(deltaEcal > 0.5)) throw ConfigError("deltaEcal > 1/2 violated");
  if (!(deltaE + deltaEcal < 1.0)) throw ConfigError("deltaE + deltaEcal < 1 violated");
}

double total_energy(double E6, double sasaki54sq, double T, double deltaE, double deltaEcal) {
  validate_energy_weights(deltaE, deltaEcal);
  return std::exp((1.0 + deltaE) * T) * E6 + std::exp(-deltaEcal * T) * sasaki54sq;
}

// ---------------------------------------------------------------- fits
DecayFit decay_fit(const std::vector<double>& T, const std::vector<double>& v, double Ta, double Tb) {
  if (T.size() != v.size()) throw ContractViolation("decay_fit: series length mismatch");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (T[i] < Ta || T[i] > Tb) continue;
    if (!(v[i] > 0.0)) throw DomainError("decay_fit: nonpositive value in window");
    const double y = std::log(v[i]);
    pts.emplace_back(T[i], y);
    n += 1;
    sx += T[i];
    sy += y;
  }
  if (pts.size() < 8) throw DomainError("decay_fit: fewer than 8 samples in window");
  const double mx = sx / n, my = sy / n;
  for (const auto& [x, y] : pts) {
    sxx += sq(x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss = 0.0;
  for (const auto& [x, y] : pts) ss += sq(y - (my + slope * (x - mx)));
  DecayFit fit;
  fit.rate = -slope;
  fit.Ta = pts.front().first;
  fit.Tb = pts.back().first;
  fit.residual = std::sqrt(ss / n);
  fit.samples = static_cast<int>(pts.size());
  return fit;
}

// ---------------------------------------------------------------- monitors
MonitorResult total_decay_monitor(const std::vector<double>& T, const std::vector<double>& Etot, double epsDecay,
                                  double factor) {
  if (T.empty() || T.size() != Etot.size()) throw ContractViolation("total_decay_monitor: missing series");
  MonitorResult m;
  m.name = "totalDecay";
  m.Ta = T.front();
  m.Tb = T.back();
  m.margin = kInf;
  for (std::size_t i = 0; i < T.size(); ++i) {
    const double env = factor * Etot.front() * std::exp(-(1.0 - epsDecay) * (T[i] - T.front()));
    if (env == 0.0) {
      if (Etot[i] != 0.0) m.margin = -kInf;
      continue;
    }
    m.margin = std::min(m.margin, (env - Etot[i]) / env);
  }
  m.holds = m.margin >= 0.0;
  m.detail = "E_tot <= 4 E_tot(T0) exp(-(1-eps_decay)(T-T0))";
  return m;
}

MonitorResult smallness_monitor(double T0, const std::vector<double>& norms, double delta) {
  MonitorResult m;
  m.name = "smallness";
  m.Ta = m.Tb = T0;
  const double worst = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
  m.margin = worst == 0.0 ? kInf : (delta - worst) / delta;
  m.holds = worst < delta;
  m.detail = "representable norms at T0 below delta";
  return m;
}

MonitorResult continuation_monitor(const std::vector<double>& T, const std::vector<double>& Q, double epsLoc) {
  if (T.empty() || T.size() != Q.size()) throw ContractViolation("continuation_monitor: missing series");
  MonitorResult m;
  m.name = "continuation";
  m.Ta = T.front();
  m.Tb = T.back();
  const double worst = *std::max_element(Q.begin(), Q.end());
  m.margin = worst == 0.0 ? kInf : (epsLoc - worst) / epsLoc;
  m.holds = worst < epsLoc;
  m.detail = "Q_cont < eps_loc";
  return m;
}

double tail_ratio(const std::vector<double>& T, const std::vector<double>& y) {
  if (T.size() < 2 || T.size() != y.size()) throw ContractViolation("tail_ratio: missing series");
  const double Te = T.back();
  if (T.front() > Te / 4.0 + 1e-12) throw ContractViolation("tail_ratio: series must start before Tend/4");
  // trapezoid integral of y over [a, b] with linear interpolation at the ends
  auto interp = [&](double x) {
    auto it = std::upper_bound(T.begin(), T.end(), x);
    if (it == T.begin()) return y.front();
    if (it == T.end()) return y.back();
    const std::size_t i = it - T.begin();
    const double w = (x - T[i - 1]) / (T[i] - T[i - 1]);
    return (1 - w) * y[i - 1] + w * y[i];
  };
  auto integral = [&](double a, double b) {
    double acc = 0.0, xp = a, yp = interp(a);
    for (std::size_t i = 0; i < T.size(); ++i) {
      if (T[i] <= a || T[i] >= b) continue;
      acc += 0.5 * (T[i] - xp) * (y[i] + yp);
      xp = T[i];
      yp = y[i];
    }
    return acc + 0.5 * (b - xp) * (interp(b) + yp);
  };
  const double early = integral(Te / 4.0, Te / 2.0), late = integral(Te / 2.0, Te);
  if (late == 0.0) return 0.0;
  if (early == 0.0) return kInf;
  return late / early;
}

bool CompletenessReport::holds() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const MonitorResult& m) { return m.holds; });
}

CompletenessReport completeness_monitor(const CompletenessSeries& s, double NM, double c, double Xbound) {
  const std::size_t n = s.T.size();
  if (n < 2 || s.N.size() != n || s.gmin.size() != n || s.Xnorm.size() != n || s.gradN.size() != n ||
      s.SigmaNorm.size() != n)
    throw ContractViolation("completeness_monitor: missing series");
  CompletenessReport r;
  auto base = [&](const char* name, const char* detail) {
    MonitorResult m;
    m.name = name;
    m.detail = detail;
    m.Ta = s.T.front();
    m.Tb = s.T.back();
    return m;
  };
  const double t0 = 1.0 / std::abs(s.tau0) * std::exp(s.T.front());

  MonitorResult m1 = base("completeness_i", "0 < N_icmc <= N_M");
  m1.margin = kInf;
  for (double N : s.N) {
    m1.holds = m1.holds && N > 0.0 && N <= NM;
    if (!all_zero(s.N, 3.0)) m1.margin = std::min(m1.margin, std::min(N, NM - N) / NM);
  }
  r.conditions.push_back(m1);

  MonitorResult m2 = base("completeness_ii", "g~ >= c t0^2 gamma");
  m2.margin = kInf;
  const bool flat = all_zero(s.gmin, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::exp(s.T[i]) / std::abs(s.tau0);
    const double v = s.gmin[i] * sq(t / t0);
    m2.holds = m2.holds && v >= c;
    if (!flat) m2.margin = std::min(m2.margin, (v - c) / c);
  }
  r.conditions.push_back(m2);

  MonitorResult m3 = base("completeness_iii", "|X_icmc| t bounded");
  m3.margin = kInf;
  if (!all_zero(s.Xnorm)) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, s.Xnorm[i] * std::exp(s.T[i]) / std::abs(s.tau0));
    m3.margin = (Xbound - worst) / Xbound;
    m3.holds = worst <= Xbound;
  }
  r.conditions.push_back(m3);

  auto integrable = [&](const char* name, const char* detail, const std::vector<double>& y, double& ratio) {
    MonitorResult m = base(name, detail);
    ratio = tail_ratio(s.T, y);
    m.margin = all_zero(y) ? kInf : (0.5 - ratio) / 0.5;
    m.holds = ratio < 0.5;
    return m;
  };
  r.conditions.push_back(
      integrable("completeness_iv", "int |grad N_icmc| dt < inf (tail ratio)", s.gradN, r.tail_ratio_gradN));
  r.conditions.push_back(
      integrable("completeness_v", "int |Sigma~| dt < inf (tail ratio)", s.SigmaNorm, r.tail_ratio_Sigma));
  return r;
}

}  // namespace milne
