#pragma once

#include <cstddef>
#include <vector>

#include "dco/chaos.hpp"

namespace dco {

/// One (ell, m) summand of the discrete-time Clark-Ocone formula:
/// integrand(Delta W_1..Delta W_{ell-1}) * H_m(Delta W_ell / sqrt(T/N)).
///
/// `integrand` holds sum_a c_{(a,m)} H_a, which equals
/// (T/N)^{m/2} / sqrt(m!) * E[D^m_{Delta W_ell} F | Delta W_1..Delta W_{ell-1}].
struct ClarkOconeTerm {
  std::size_t ell = 1;
  unsigned order = 1;
  ChaosExpansion integrand;

  /// E[D^m_{Delta W_ell} F | F_{ell-1}] = integrand * sqrt(m!) / (T/N)^{m/2}.
  ChaosExpansion conditional_derivative() const;
};

struct ClarkOconeDecomposition {
  GridSpec grid;
  double mean = 0.0;
  /// Sorted by (ell, order).
  std::vector<ClarkOconeTerm> terms;
};

/// Groups every non-constant coefficient by (slot of its last nonzero entry, that entry).
ClarkOconeDecomposition decompose(const ChaosExpansion& f);

/// mean + sum of integrand (x) H_m in slot ell. Throws std::invalid_argument on
/// duplicate (ell, m) terms, integrands reaching slot ell, or m = 0.
ChaosExpansion reconstruct(const ClarkOconeDecomposition& d);

/// Keeps mean + the terms with order <= n, i.e. the n-th order discretization.
ClarkOconeDecomposition truncate(const ClarkOconeDecomposition& d, unsigned n);

/// Err_n(F): coefficients whose last nonzero entry exceeds n.
ChaosExpansion err_tail(const ChaosExpansion& f, unsigned n);

/// S(a, n, N1): squared mass of H_a landing on fine keys with last entry > n
/// after refining by N1. Throws std::invalid_argument for the zero index or N1 = 0.
double tail_mass(const MultiIndex& a, unsigned n, std::size_t n1);

/// (|a|^n / (n! N1^n))^r. Throws std::invalid_argument for r outside [0, 1].
double tail_mass_bound(const MultiIndex& a, unsigned n, std::size_t n1, double r);

/// P[Binomial(trials, p) > threshold], summed from whichever side is accurate.
double binomial_upper_tail(unsigned trials, double p, unsigned threshold);

/// ||Err_n^{(N0 N1)}(F)||_{2,s} for F living on N0, computed on the coarse grid.
double err_norm_refined(const ChaosExpansion& f, unsigned n, std::size_t n1, double s);

/// ||F||_{2,s+rn} / (n! N1^n)^{r/2}.
double error_bound(const ChaosExpansion& f, unsigned n, std::size_t n1, double s, double r);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  /// rhs - lhs
  double slack = 0.0;
};

inline constexpr double kBoundRelativeSlack = 1e-12;

BoundCheck verify_bound(const ChaosExpansion& f, unsigned n, std::size_t n1, double s, double r);

/// sum_i integral over slot i of ||D_t^{n+1} F||^2 dt, evaluated by applying the
/// coefficient-shift derivative n+1 times per increment.
double derivative_energy(const ChaosExpansion& f, unsigned order);

/// (T zeta(n+1) int_0^T ||D_t^{n+1} F||^2 dt)^{1/2} / N^{1/2} on the expansion's own grid.
double first_order_error_zeta_bound(const ChaosExpansion& f, unsigned n);

}  // namespace dco
