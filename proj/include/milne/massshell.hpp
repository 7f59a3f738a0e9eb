#pragma once
// Rescaled mass shell: p0 as a function of p, the helper p-hat, pointwise
// estimates, momentum and time derivatives.
//
// Two normalizations exist.  The root of gbar(p~,p~) = -1 gives p~^0 directly;
// the printed closed form equals p~^0 / tau^2.  Kinetic code (transport,
// moments) uses the closed-form normalization, called the kinetic p0 here.

#include "milne/geometry.hpp"

namespace milne {

enum class P0Method { first_principles, paper_primary, paper_alternative };

void require_admissible(const LocalGeometry& geom, const char* who);

double compute_p0(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame, P0Method method);
// p0 in the kinetic normalization (= paper_primary).
double kinetic_p0(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);
double phat(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

struct MomentumPoint {
  Vec3 p = Vec3::Zero();
  double p0 = 0.0;
  double phat = 0.0;
  double pbar = 1.0;
  double pund = 0.0;  // N p0
};
MomentumPoint make_momentum_point(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

// |gbar(p~,p~) + 1| with p~^0 = tau^2 p0, p~^a = tau^2 p^a (kinetic p0).
double massshell_residual(const LocalGeometry& geom, const Vec3& p, double p0, const TimeFrame& frame);

struct NormalizationReport {
  double first_principles = 0.0;
  double paper_primary = 0.0;
  double ratio = 0.0;  // first_principles / paper_primary
  double tau2 = 0.0;   // the ratio it should be
};
NormalizationReport normalization_report(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

struct EstimateReport {
  double lhs1 = 0, rhs1 = 0, lhs2 = 0, rhs2 = 0;
  bool holds1 = true, holds2 = true;
  bool holds() const { return holds1 && holds2; }
};
EstimateReport pointwise_estimates_check(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

// |p + tau^-1 p0 X|_g^2 / phat, the pressure integrand kernel.
double pressure_kernel(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

struct VerticalDerivatives {
  Vec3 dp0 = Vec3::Zero();               // B_e p0
  Vec3 dphat = Vec3::Zero();             // B_e phat
  Vec3 dkernel = Vec3::Zero();           // B_e pressure_kernel (product rule)
  Vec3 dkernel_printed = Vec3::Zero();   // printed closed form, diagnostic
};
VerticalDerivatives vertical_derivatives(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame);

struct MomentumTimeDerivatives {
  double dphat_fixed_p = 0, dp0_fixed_p = 0;
  double dphat_fixed_ptilde = 0, dp0_fixed_ptilde = 0;
  double dphat_printed = 0, dp0_printed = 0;
};
// d/dT along a path of (g, N, X, tau) with rates given; p held fixed, or
// p~ = tau^2 p held fixed.  Printed values are returned for comparison.
MomentumTimeDerivatives time_derivatives(const LocalGeometry& geom, const Vec3& p, const TimeFrame& frame,
                                         const FieldRates& rates);

}  // namespace milne
