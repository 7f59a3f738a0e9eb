#include "milne/fields.hpp"

#include <cmath>

namespace milne {

FieldSample BackgroundFields::sample(double /*T*/, const Vec3& x) const {
  FieldSample s;
  s.geom = background_geometry(x);
  return s;
}

FieldSample LapsePerturbationFields::sample(double T, const Vec3& x) const {
  const double a = eps_ * std::exp(-T);
  const double arg = k_.dot(x) + phase_;
  const double phi = std::sin(arg);
  const Vec3 dphi = std::cos(arg) * k_;

  const double c = std::exp(-2.0 / 3.0 * a * phi);  // conformal factor on gamma
  const Mat3 gam = chart::metric(x);
  const T3 dgam = chart::metric_derivative(x);

  FieldSample s;
  LocalGeometry& geom = s.geom;
  geom.x = x;
  geom.g = c * gam;
  geom.N = 3.0 + a * phi;
  SpatialDerivatives d;
  for (int i = 0; i < 3; ++i) d.dg[i] = c * dgam[i] - (2.0 / 3.0) * a * dphi(i) * geom.g;
  d.dN = a * dphi;
  geom.d = d;

  s.rates.dTN = -a * phi;
  s.rates.dTg = 2.0 * geom.Nhat() * geom.g;
  return s;
}

std::unique_ptr<FieldProvider> make_fields(const std::string& kind, double eps) {
  if (kind == "background") return std::make_unique<BackgroundFields>();
  if (kind == "lapse_perturbation")
    return std::make_unique<LapsePerturbationFields>(eps, Vec3(0.7, -0.4, 0.5), 0.3);
  throw UnsupportedMode("make_fields: unknown field kind '" + kind + "'");
}

}  // namespace milne
