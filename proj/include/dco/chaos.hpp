#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "dco/multiindex.hpp"

namespace dco {

/// Uniform partition of [0, T] into N steps; increments have variance T/N.
struct GridSpec {
  double horizon = 1.0;
  std::size_t steps = 1;

  double step_variance() const { return horizon / static_cast<double>(steps); }
  /// Throws std::invalid_argument unless T > 0 and N >= 1.
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Finitely supported Wiener chaos expansion F = sum_a c_a H_a(h^(N)) over a grid.
///
/// Coefficients with |c| below kPruneThreshold are dropped on construction, and
/// every key must fit in grid.steps slots. Iteration order is graded lex, which
/// keeps all reductions (norms, CSV output) bit-stable.
class ChaosExpansion {
 public:
  using Coefficients = std::map<MultiIndex, double>;
  static constexpr double kPruneThreshold = 1e-14;

  explicit ChaosExpansion(GridSpec grid);
  ChaosExpansion(GridSpec grid, Coefficients coefficients);

  static ChaosExpansion constant(GridSpec grid, double value);

  const GridSpec& grid() const { return grid_; }
  const Coefficients& coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }

  double coefficient(const MultiIndex& a) const;
  /// Coefficient of the zero index, i.e. E[F].
  double mean() const { return coefficient(MultiIndex{}); }
  std::uint64_t max_degree() const;
  /// Largest single entry over all keys.
  MultiIndex::value_type max_entry() const;

 private:
  GridSpec grid_;
  Coefficients coefficients_;
};

/// ||F||_{2,s} = sqrt(sum_a (1+|a|)^s c_a^2).
double sobolev_norm(const ChaosExpansion& f, double s);

/// E[F | Delta W_1..Delta W_ell]: keeps keys supported in the first ell slots.
ChaosExpansion conditional_expectation(const ChaosExpansion& f, std::size_t ell);

/// Pathwise value at standardized increments xi_i = Delta W_i / sqrt(T/N).
/// `xi` must have exactly grid.steps entries.
double evaluate(const ChaosExpansion& f, std::span<const double> xi);

/// Gateaux derivative D_{h_slot}^order F via D_h H_a = sum_i <h,h_i> sqrt(a_i) H_{a - e_i}.
ChaosExpansion gateaux_derivative(const ChaosExpansion& f, std::size_t slot, unsigned order = 1);

/// Gram matrix g_ij = <h_i, h'_j> between two orthonormal systems.
/// Rows index h (the `a` side), columns index h' (the `a2` side).
class GramMatrix {
 public:
  /// Throws std::invalid_argument if a row or column has Euclidean norm > 1.
  explicit GramMatrix(Eigen::MatrixXd values);

  static GramMatrix identity(std::size_t n);
  /// <h_i^(N0), h_j^(N0 N1)> = 1/sqrt(N1) on the i-th block of N1 fine slots, else 0.
  static GramMatrix coarse_fine(std::size_t n0, std::size_t n1);

  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  /// 1-based access, matching the slot convention of MultiIndex.
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
  }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

inline constexpr unsigned kBruteForceMaxDegree = 8;

/// Hilbert-Schmidt inner product <h_a, h'_a2>_HS by the explicit double sum over
/// S_m x S_m. Returns 0 when |a| != |a2|; throws for m > kBruteForceMaxDegree.
double hs_bruteforce(const MultiIndex& a, const MultiIndex& a2, const GramMatrix& gram);

/// E[H_a(h) H_a2(h')] through the contingency-table sum
/// sqrt(a! a2!) sum_{k: rows a, cols a2} prod g_ij^k_ij / k_ij!.
double pairing_combinatorial(const MultiIndex& a, const MultiIndex& a2, const GramMatrix& gram);

/// Closed form for the coarse/fine pair: sqrt(a!/a2!) N1^{-m/2} if a2 matches a, else 0.
double coarse_fine_hs(const MultiIndex& a, const MultiIndex& a2, std::size_t n0, std::size_t n1);

/// Re-expresses F on the N0*N1 grid: c'_{a'} = c_{coarsen(a')} sqrt(a!/a'!) N1^{-|a|/2}.
ChaosExpansion refine(const ChaosExpansion& f, std::size_t n1);

/// CSV with header "multiindex,coefficient", preceded by a "# grid T=<T> N=<N>" comment.
void write_expansion_csv(std::ostream& out, const ChaosExpansion& f);
/// Reads the format above. The grid comes from the "# grid" line when present,
/// otherwise from `grid`; throws std::invalid_argument if neither is available.
ChaosExpansion read_expansion_csv(std::istream& in, std::optional<GridSpec> grid = std::nullopt);

}  // namespace dco
