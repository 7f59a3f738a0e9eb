#pragma once
// Shared small types: 3-vectors, 3x3 matrices, index-3 arrays, error classes.

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>

namespace milne {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// T3[a](b,c): one upper index a, two lower indices b,c (Christoffels),
// or dg[c](a,b) = d_c g_ab depending on context.
using T3 = std::array<Mat3, 3>;

inline T3 zero_t3() { return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()}; }

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
// Raised when an input lacks data an operation needs (e.g. derivatives).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};
// |Xhat|_g >= 1: mass-shell denominators vanish.
struct SingularDenominator : DomainError {
  using DomainError::DomainError;
};
// s*rho >= 1/6 in the Hamiltonian constraint.
struct ConstraintSingular : DomainError {
  using DomainError::DomainError;
};
struct UnsupportedMode : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double sq(double x) { return x * x; }

// g(u,v) for a metric matrix.
inline double dot(const Mat3& g, const Vec3& u, const Vec3& v) { return u.dot(g * v); }
inline double norm2(const Mat3& g, const Vec3& u) { return u.dot(g * u); }

// |A|_g^2 = g^ac g^bd A_ab A_cd for a covariant 2-tensor.
inline double tensor_norm2(const Mat3& ginv, const Mat3& A) {
  return (ginv * A * ginv * A.transpose()).trace();
}

}  // namespace milne
