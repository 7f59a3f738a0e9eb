#pragma once
// Gauss-Legendre rules and small helpers for 1D integration.

#include <vector>

namespace milne {

struct QuadratureRule {
  std::vector<double> x, w;  // on [-1, 1]
};

// n-point Gauss-Legendre rule (Newton on P_n); cached per n.
const QuadratureRule& gauss_legendre(int n);

// Composite n-point rule of f over [a, b] split into m equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 1, int n = 8) {
  const QuadratureRule& r = gauss_legendre(n);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double c = a + (k + 0.5) * h;
    for (int i = 0; i < n; ++i) sum += r.w[i] * f(c + 0.5 * h * r.x[i]);
  }
  return 0.5 * h * sum;
}

}  // namespace milne
