#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dco/multiindex.hpp"

namespace dco {

/// Orthonormal (probabilists') Hermite polynomial H_m(x) = He_m(x)/sqrt(m!),
/// so that E[H_m(Z) H_n(Z)] = delta_mn for standard normal Z.
double hermite(unsigned m, double x);

/// H_0(x), ..., H_max(x) by the three-term recurrence.
std::vector<double> hermite_table(unsigned max_order, double x);

/// Fourier-Hermite polynomial prod_i H_{a_i}(xi_i). `xi` must cover a.size() slots.
double fourier_hermite(const MultiIndex& a, std::span<const double> xi);

/// Standard normal density and upper tail.
double normal_pdf(double x);
double normal_sf(double x);

/// Gauss quadrature for the standard normal weight; weights sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) total += weights[i] * f(nodes[i]);
    return total;
  }
};

/// Order-q rule, exact for polynomials of degree <= 2q - 1. Nodes come from the
/// symmetric tridiagonal Jacobi matrix, then get a Newton polish on H_q.
/// Throws std::invalid_argument for order 0.
QuadratureRule gauss_hermite_rule(std::size_t order);

/// Same rule, memoized per order (thread-safe).
const QuadratureRule& cached_gauss_hermite_rule(std::size_t order);

/// Integral of H_m(x) phi(x) over [K, inf). Closed form:
/// 1 - Phi(K) for m = 0, phi(K) H_{m-1}(K) / sqrt(m) otherwise.
double hermite_indicator_integral(unsigned m, double strike);

}  // namespace dco
