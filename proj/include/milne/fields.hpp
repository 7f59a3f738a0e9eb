#pragma once
// Closed-form field providers: (T, x) -> LocalGeometry + time derivatives.

#include <memory>
#include <string>

#include "milne/geometry.hpp"

namespace milne {

struct FieldSample {
  LocalGeometry geom;
  FieldRates rates;
};

class FieldProvider {
 public:
  virtual ~FieldProvider() = default;
  virtual FieldSample sample(double T, const Vec3& x) const = 0;
  virtual std::string name() const = 0;
};

// Milne fixed point (gamma, 0, 3, 0).
class BackgroundFields final : public FieldProvider {
 public:
  FieldSample sample(double T, const Vec3& x) const override;
  std::string name() const override { return "background"; }
};

// N = 3 + eps e^{-T} phi(x), X = 0, Sigma = 0, and the CMC-consistent
// conformal metric g = exp(-(2/3) eps e^{-T} phi) gamma, so that
// d_T g = 2(N/3 - 1) g holds exactly.  phi(x) = sin(k.x + phase).
class LapsePerturbationFields final : public FieldProvider {
 public:
  LapsePerturbationFields(double eps, const Vec3& k, double phase) : eps_(eps), k_(k), phase_(phase) {}
  FieldSample sample(double T, const Vec3& x) const override;
  std::string name() const override { return "lapse_perturbation"; }
  double eps() const { return eps_; }

 private:
  double eps_;
  Vec3 k_;
  double phase_;
};

std::unique_ptr<FieldProvider> make_fields(const std::string& kind, double eps);

}  // namespace milne
