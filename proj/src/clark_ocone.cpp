#include "dco/clark_ocone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace dco {

ChaosExpansion ClarkOconeTerm::conditional_derivative() const {
  const double step = integrand.grid().step_variance();
  const double scale = std::exp(0.5 * std::lgamma(order + 1.0) - 0.5 * order * std::log(step));
  ChaosExpansion::Coefficients out;
  for (const auto& [a, c] : integrand.coefficients()) out.emplace_hint(out.end(), a, c * scale);
  return ChaosExpansion(integrand.grid(), std::move(out));
}

ClarkOconeDecomposition decompose(const ChaosExpansion& f) {
  std::map<std::pair<std::size_t, unsigned>, ChaosExpansion::Coefficients> groups;
  for (const auto& [a, c] : f.coefficients()) {
    auto last = a.last_nonzero();
    if (!last) continue;
    groups[{last->slot, last->value}].emplace(a.with_slot(last->slot, 0), c);
  }
  ClarkOconeDecomposition d{f.grid(), f.mean(), {}};
  d.terms.reserve(groups.size());
  for (auto& [key, coefficients] : groups)
    d.terms.push_back({key.first, key.second, ChaosExpansion(f.grid(), std::move(coefficients))});
  return d;
}

ChaosExpansion reconstruct(const ClarkOconeDecomposition& d) {
  ChaosExpansion::Coefficients out;
  if (d.mean != 0.0) out.emplace(MultiIndex{}, d.mean);
  std::map<std::pair<std::size_t, unsigned>, bool> seen;
  for (const auto& term : d.terms) {
    if (term.order == 0) throw std::invalid_argument("reconstruct: term of order 0");
    if (term.ell == 0 || term.ell > d.grid.steps) throw std::invalid_argument("reconstruct: slot out of range");
    if (!seen.emplace(std::pair{term.ell, term.order}, true).second)
      throw std::invalid_argument("reconstruct: duplicate term (ell=" + std::to_string(term.ell) +
                                  ", m=" + std::to_string(term.order) + ")");
    for (const auto& [a, c] : term.integrand.coefficients()) {
      if (a.size() >= term.ell)
        throw std::invalid_argument("reconstruct: integrand key " + a.to_string() + " reaches slot " +
                                    std::to_string(term.ell));
      if (!out.emplace(a.with_slot(term.ell, term.order), c).second)
        throw std::invalid_argument("reconstruct: overlapping keys");
    }
  }
  return ChaosExpansion(d.grid, std::move(out));
}

ClarkOconeDecomposition truncate(const ClarkOconeDecomposition& d, unsigned n) {
  ClarkOconeDecomposition out{d.grid, d.mean, {}};
  std::copy_if(d.terms.begin(), d.terms.end(), std::back_inserter(out.terms),
               [n](const ClarkOconeTerm& t) { return t.order <= n; });
  return out;
}

ChaosExpansion err_tail(const ChaosExpansion& f, unsigned n) {
  ChaosExpansion::Coefficients kept;
  for (const auto& [a, c] : f.coefficients()) {
    auto last = a.last_nonzero();
    if (last && last->value > n) kept.emplace_hint(kept.end(), a, c);
  }
  return ChaosExpansion(f.grid(), std::move(kept));
}

double binomial_upper_tail(unsigned trials, double p, unsigned threshold) {
  if (threshold >= trials || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double t = trials;
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  auto log_pmf = [&](double k) {
    return std::lgamma(t + 1.0) - std::lgamma(k + 1.0) - std::lgamma(t - k + 1.0) + k * log_p + (t - k) * log_q;
  };

  double lower = 0.0;
  for (unsigned k = 0; k <= threshold; ++k) lower += std::exp(log_pmf(k));
  if (lower < 0.5) return 1.0 - lower;

  // Upper tail is the small side: sum it directly, pmf ratio recurrence.
  const double ratio = p / (1.0 - p);
  double term = std::exp(log_pmf(threshold + 1.0));
  double upper = 0.0;
  for (unsigned k = threshold + 1; k <= trials; ++k) {
    upper += term;
    term *= (t - k) / (k + 1.0) * ratio;
    if (term < 1e-18 * upper && (k + 1.0) > (t + 1.0) * p) break;
  }
  return upper;
}

double tail_mass(const MultiIndex& a, unsigned n, std::size_t n1) {
  if (n1 == 0) throw std::invalid_argument("tail_mass: N1 must be positive");
  auto last = a.last_nonzero();
  if (!last) throw std::invalid_argument("tail_mass: zero multi-index");
  const unsigned top = last->value;
  if (top <= n) return 0.0;

  // Blocks before the last nonzero one contribute a factor 1 (multinomial
  // theorem). Within the last block, summing over the position l'' of the
  // last nonzero fine slot:
  //   sum_{k>n} C(top,k) (l''-1)^{top-k} / N1^top = (l''/N1)^top P[Bin(top, 1/l'') > n].
  double total = 0.0;
  const double width = static_cast<double>(n1);
  for (std::size_t l = 1; l <= n1; ++l) {
    const double weight = std::pow(static_cast<double>(l) / width, top);
    if (weight == 0.0) continue;
    total += weight * binomial_upper_tail(top, 1.0 / static_cast<double>(l), n);
  }
  return total;
}

double tail_mass_bound(const MultiIndex& a, unsigned n, std::size_t n1, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("tail_mass_bound: r must lie in [0, 1]");
  if (a.is_zero()) throw std::invalid_argument("tail_mass_bound: zero multi-index");
  if (n1 == 0) throw std::invalid_argument("tail_mass_bound: N1 must be positive");
  const double log_ratio = n * std::log(static_cast<double>(a.degree())) - std::lgamma(n + 1.0) -
                           n * std::log(static_cast<double>(n1));
  return std::exp(r * log_ratio);
}

double err_norm_refined(const ChaosExpansion& f, unsigned n, std::size_t n1, double s) {
  std::map<unsigned, double> mass_by_last;  // S depends on a only through its last entry
  double total = 0.0;
  for (const auto& [a, c] : f.coefficients()) {
    auto last = a.last_nonzero();
    if (!last) continue;
    auto [it, fresh] = mass_by_last.try_emplace(last->value, 0.0);
    if (fresh) it->second = tail_mass(a, n, n1);
    total += std::pow(1.0 + static_cast<double>(a.degree()), s) * c * c * it->second;
  }
  return std::sqrt(total);
}

double error_bound(const ChaosExpansion& f, unsigned n, std::size_t n1, double s, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("error_bound: r must lie in [0, 1]");
  if (n1 == 0) throw std::invalid_argument("error_bound: N1 must be positive");
  const double log_denominator = std::lgamma(n + 1.0) + n * std::log(static_cast<double>(n1));
  return sobolev_norm(f, s + r * n) * std::exp(-0.5 * r * log_denominator);
}

BoundCheck verify_bound(const ChaosExpansion& f, unsigned n, std::size_t n1, double s, double r) {
  BoundCheck check;
  check.lhs = err_norm_refined(f, n, n1, s);
  check.rhs = error_bound(f, n, n1, s, r);
  check.holds = check.lhs <= check.rhs * (1.0 + kBoundRelativeSlack);
  check.slack = check.rhs - check.lhs;
  return check;
}

double derivative_energy(const ChaosExpansion& f, unsigned order) {
  const double step = f.grid().step_variance();
  double total = 0.0;
  for (std::size_t i = 1; i <= f.grid().steps; ++i) {
    const double norm = sobolev_norm(gateaux_derivative(f, i, order), 0.0);
    total += norm * norm;
  }
  // D_t = (T/N)^{-1/2} D_{h_i} on slot i, integrated over a slot of length T/N.
  return total * std::pow(step, 1.0 - static_cast<double>(order));
}

double first_order_error_zeta_bound(const ChaosExpansion& f, unsigned n) {
  if (n == 0) throw std::invalid_argument("first_order_error_zeta_bound: n must be >= 1");
  const double energy = derivative_energy(f, n + 1);
  const double zeta = std::riemann_zeta(static_cast<double>(n + 1));
  return std::sqrt(f.grid().horizon * zeta * energy / static_cast<double>(f.grid().steps));
}

}  // namespace dco
