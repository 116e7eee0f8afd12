#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dco/chaos.hpp"
#include "dco/errors.hpp"
#include "dco/payoff.hpp"

namespace dco {

/// d_k = E[f(sqrt(T) Z) H_k(Z)], k = 0..max_degree, by Gauss-Hermite quadrature.
/// Default order is max_degree + 8. Throws NumericalError on non-finite output.
std::vector<double> hermite_expand_terminal(const std::function<double(double)>& f, double horizon,
                                            unsigned max_degree, std::optional<std::size_t> order = std::nullopt);

/// Terminal payoffs: polynomials are expanded exactly (degree capped at the
/// polynomial's own), digitals use the closed-form half-line integrals with
/// threshold K/sqrt(T), smooth payoffs go through quadrature.
std::vector<double> hermite_expand_terminal(const Payoff& payoff, double horizon, unsigned max_degree);

/// Chaos expansion of a terminal payoff on `grid`: the one-step expansion refined to N slots.
ChaosExpansion coeffs_terminal(const Payoff& payoff, const GridSpec& grid, unsigned max_degree);

/// Chaos expansion of sum_i 1_{[0,inf)}(W_{t_i}) T/N, truncated at max_degree.
ChaosExpansion coeffs_occupation_time(const GridSpec& grid, unsigned max_degree);

/// ||Err_n^{(N)}(F^{(N)})||_{2,s} for the truncated occupation time without
/// materializing its coefficients (sums over degree and last slot only).
double occupation_time_err_norm(const GridSpec& grid, unsigned n, unsigned max_degree, double s = 0.0);

/// Standardized increments for `samples` paths, row-major samples x N.
/// Sample k draws from its own stream keyed by (seed, k).
struct PathBatch {
  GridSpec grid;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> increments;

  std::span<const double> path(std::size_t k) const {
    return {increments.data() + k * grid.steps, grid.steps};
  }
};

/// Throws std::invalid_argument for samples = 0.
PathBatch sample_paths(const GridSpec& grid, std::size_t samples, std::uint64_t seed, unsigned workers = 1);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Root-mean-square of per-path values with a delta-method standard error.
/// `value(k)` is called once per sample; partial sums are combined in block order.
McEstimate mc_l2_norm(std::size_t samples, unsigned workers, const std::function<double(std::size_t)>& value);

/// ||Err_n(F)||_2 estimated on `batch`. Throws std::invalid_argument on grid mismatch.
McEstimate mc_err_norm(const ChaosExpansion& f, unsigned n, const PathBatch& batch, unsigned workers = 1);

/// First-order tracking error F - E[F] - sum_ell E[dF/dW_ell | F_{ell-1}] Delta W_ell,
/// with deltas from the heat-kernel smoothed payoff.
McEstimate tracking_error_hedge(const Payoff& payoff, const PathBatch& batch, unsigned workers = 1);

/// Expansions for randomized checks: N0 in {1,2,3}, degree in {1..6}, every index
/// up to that degree carries a coefficient uniform in [-1, 1].
ChaosExpansion random_expansion(std::uint64_t seed, std::size_t case_index, double horizon = 1.0);

}  // namespace dco
