#include "dco/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dco {

double hermite(unsigned m, double x) {
  if (m == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (unsigned k = 1; k < m; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_table(unsigned max_order, double x) {
  std::vector<double> h(max_order + 1);
  h[0] = 1.0;
  if (max_order >= 1) h[1] = x;
  for (unsigned k = 1; k < max_order; ++k)
    h[k + 1] = (x * h[k] - std::sqrt(static_cast<double>(k)) * h[k - 1]) / std::sqrt(k + 1.0);
  return h;
}

double fourier_hermite(const MultiIndex& a, std::span<const double> xi) {
  if (xi.size() < a.size())
    throw std::invalid_argument("fourier_hermite: need " + std::to_string(a.size()) + " inputs, got " +
                                std::to_string(xi.size()));
  double value = 1.0;
  for (std::size_t i = 1; i <= a.size(); ++i) value *= hermite(a.slot(i), xi[i - 1]);
  return value;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

QuadratureRule gauss_hermite_rule(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_hermite_rule: order must be >= 1");
  const auto q = static_cast<Eigen::Index>(order);

  // Jacobi matrix of the monic recurrence He_{k+1} = x He_k - k He_{k-1}.
  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd off_diagonal(std::max<Eigen::Index>(q - 1, 0));
  for (Eigen::Index k = 1; k < q; ++k) off_diagonal(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diagonal, off_diagonal, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("gauss_hermite_rule: eigensolver failed");

  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const auto qd = static_cast<double>(order);
  for (std::size_t i = 0; i < order; ++i) {
    double x = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    // Newton on H_q, using H_q' = sqrt(q) H_{q-1}.
    for (int it = 0; it < 8; ++it) {
      const auto h = hermite_table(static_cast<unsigned>(order), x);
      const double step = h[order] / (std::sqrt(qd) * h[order - 1]);
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    const double hq1 = hermite(static_cast<unsigned>(order - 1), x);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / (qd * hq1 * hq1);
  }
  // Symmetrize: the exact rule is odd-symmetric in nodes and even in weights.
  for (std::size_t i = 0, j = order - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;

  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

const QuadratureRule& cached_gauss_hermite_rule(std::size_t order) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_hermite_rule(order));
  return *slot;
}

double hermite_indicator_integral(unsigned m, double strike) {
  if (std::isinf(strike)) {
    if (strike > 0) return 0.0;
    return m == 0 ? 1.0 : 0.0;
  }
  if (m == 0) return normal_sf(strike);
  return normal_pdf(strike) * hermite(m - 1, strike) / std::sqrt(static_cast<double>(m));
}

}  // namespace dco
