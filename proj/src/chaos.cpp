#include "dco/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dco/csv.hpp"
#include "dco/hermite.hpp"

namespace dco {

void GridSpec::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("grid horizon T must be positive and finite");
  if (steps == 0) throw std::invalid_argument("grid step count N must be >= 1");
}

ChaosExpansion::ChaosExpansion(GridSpec grid) : grid_(grid) { grid_.validate(); }

ChaosExpansion::ChaosExpansion(GridSpec grid, Coefficients coefficients) : grid_(grid) {
  grid_.validate();
  for (auto& [a, c] : coefficients) {
    if (a.size() > grid_.steps)
      throw std::invalid_argument("coefficient key " + a.to_string() + " exceeds grid with N=" +
                                  std::to_string(grid_.steps));
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite coefficient at " + a.to_string());
  }
  std::erase_if(coefficients, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  coefficients_ = std::move(coefficients);
}

ChaosExpansion ChaosExpansion::constant(GridSpec grid, double value) {
  return ChaosExpansion(grid, {{MultiIndex{}, value}});
}

double ChaosExpansion::coefficient(const MultiIndex& a) const {
  auto it = coefficients_.find(a);
  return it == coefficients_.end() ? 0.0 : it->second;
}

std::uint64_t ChaosExpansion::max_degree() const {
  // graded order: the last key has the largest degree
  return coefficients_.empty() ? 0 : coefficients_.rbegin()->first.degree();
}

MultiIndex::value_type ChaosExpansion::max_entry() const {
  MultiIndex::value_type best = 0;
  for (const auto& [a, c] : coefficients_)
    for (auto e : a.entries()) best = std::max(best, e);
  return best;
}

double sobolev_norm(const ChaosExpansion& f, double s) {
  double total = 0.0;
  for (const auto& [a, c] : f.coefficients())
    total += std::pow(1.0 + static_cast<double>(a.degree()), s) * c * c;
  return std::sqrt(total);
}

ChaosExpansion conditional_expectation(const ChaosExpansion& f, std::size_t ell) {
  if (ell > f.grid().steps) throw std::invalid_argument("conditional_expectation: ell exceeds grid size");
  ChaosExpansion::Coefficients kept;
  for (const auto& [a, c] : f.coefficients())
    if (a.size() <= ell) kept.emplace_hint(kept.end(), a, c);
  return ChaosExpansion(f.grid(), std::move(kept));
}

double evaluate(const ChaosExpansion& f, std::span<const double> xi) {
  if (xi.size() != f.grid().steps)
    throw std::invalid_argument("evaluate: expected " + std::to_string(f.grid().steps) + " increments, got " +
                                std::to_string(xi.size()));
  std::vector<unsigned> top(xi.size(), 0);
  for (const auto& [a, c] : f.coefficients())
    for (std::size_t i = 1; i <= a.size(); ++i) top[i - 1] = std::max<unsigned>(top[i - 1], a.slot(i));
  std::vector<std::vector<double>> table(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) table[i] = hermite_table(top[i], xi[i]);

  double total = 0.0;
  for (const auto& [a, c] : f.coefficients()) {
    double term = c;
    for (std::size_t i = 1; i <= a.size(); ++i) term *= table[i - 1][a.slot(i)];
    total += term;
  }
  return total;
}

ChaosExpansion gateaux_derivative(const ChaosExpansion& f, std::size_t slot, unsigned order) {
  if (slot == 0 || slot > f.grid().steps) throw std::invalid_argument("gateaux_derivative: slot out of range");
  ChaosExpansion::Coefficients out;
  for (const auto& [a, c] : f.coefficients()) {
    const auto ai = a.slot(slot);
    if (ai < order) continue;
    // sqrt(ai!/(ai-order)!)
    double scale = 1.0;
    for (unsigned k = 0; k < order; ++k) scale *= std::sqrt(static_cast<double>(ai - k));
    out[a.with_slot(slot, ai - order)] += c * scale;
  }
  return ChaosExpansion(f.grid(), std::move(out));
}

GramMatrix::GramMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  constexpr double kSlack = 1e-12;
  for (Eigen::Index i = 0; i < values_.rows(); ++i)
    if (values_.row(i).norm() > 1.0 + kSlack)
      throw std::invalid_argument("GramMatrix: row " + std::to_string(i + 1) + " has norm > 1");
  for (Eigen::Index j = 0; j < values_.cols(); ++j)
    if (values_.col(j).norm() > 1.0 + kSlack)
      throw std::invalid_argument("GramMatrix: column " + std::to_string(j + 1) + " has norm > 1");
}

GramMatrix GramMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return GramMatrix(Eigen::MatrixXd::Identity(k, k));
}

GramMatrix GramMatrix::coarse_fine(std::size_t n0, std::size_t n1) {
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("coarse_fine gram: N0 and N1 must be positive");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n0), static_cast<Eigen::Index>(n0 * n1));
  const double v = 1.0 / std::sqrt(static_cast<double>(n1));
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = i * n1; j < (i + 1) * n1; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  return GramMatrix(std::move(g));
}

namespace {

// eta_a: slot of the n-th ball when a_1 balls labelled 1, a_2 labelled 2, ... are lined up.
std::vector<std::size_t> ball_labels(const MultiIndex& a) {
  std::vector<std::size_t> labels;
  for (std::size_t i = 1; i <= a.size(); ++i) labels.insert(labels.end(), a.slot(i), i);
  return labels;
}

void check_fits(const MultiIndex& a, const MultiIndex& a2, const GramMatrix& gram) {
  if (a.size() > gram.rows() || a2.size() > gram.cols())
    throw std::invalid_argument("multi-index exceeds Gram matrix dimensions");
}

}  // namespace

double hs_bruteforce(const MultiIndex& a, const MultiIndex& a2, const GramMatrix& gram) {
  check_fits(a, a2, gram);
  const auto m = a.degree();
  if (m != a2.degree()) return 0.0;
  if (m > kBruteForceMaxDegree)
    throw std::invalid_argument("hs_bruteforce: degree " + std::to_string(m) + " exceeds the cap of " +
                                std::to_string(kBruteForceMaxDegree));
  const auto rows = ball_labels(a);
  const auto cols = ball_labels(a2);
  std::vector<std::size_t> sigma(m), sigma2(m);

  double total = 0.0;
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    std::iota(sigma2.begin(), sigma2.end(), 0);
    do {
      double prod = 1.0;
      for (std::size_t n = 0; n < m; ++n) prod *= gram(rows[sigma[n]], cols[sigma2[n]]);
      total += prod;
    } while (std::next_permutation(sigma2.begin(), sigma2.end()));
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  const double log_norm = 0.5 * (a.log_factorial() + a2.log_factorial()) + std::lgamma(static_cast<double>(m) + 1.0);
  return total * std::exp(-log_norm);
}

double pairing_combinatorial(const MultiIndex& a, const MultiIndex& a2, const GramMatrix& gram) {
  check_fits(a, a2, gram);
  if (a.degree() != a2.degree()) return 0.0;
  if (a.is_zero()) return 1.0;

  const std::size_t rows = a.size();
  const std::size_t cols = a2.size();
  std::vector<MultiIndex::value_type> col_left(a2.entries());

  // Fill the table row by row; within a row, column by column, never exceeding
  // the remaining column sum. The last column of each row takes what is left.
  std::function<double(std::size_t, std::size_t, MultiIndex::value_type)> fill =
      [&](std::size_t i, std::size_t j, MultiIndex::value_type row_left) -> double {
    if (i == rows) return 1.0;  // all row sums placed, column sums then exhausted too
    if (j == cols - 1) {
      if (row_left > col_left[j]) return 0.0;
      const double g = gram(i + 1, j + 1);
      if (row_left > 0 && g == 0.0) return 0.0;
      const double factor = std::pow(g, row_left) / std::tgamma(row_left + 1.0);
      col_left[j] -= row_left;
      const double rest = (i + 1 == rows) ? 1.0 : fill(i + 1, 0, a.slot(i + 2));
      col_left[j] += row_left;
      return factor * rest;
    }
    double total = 0.0;
    const double g = gram(i + 1, j + 1);
    const auto kmax = std::min(row_left, col_left[j]);
    for (MultiIndex::value_type k = 0; k <= kmax; ++k) {
      if (k > 0 && g == 0.0) break;
      const double factor = std::pow(g, k) / std::tgamma(k + 1.0);
      col_left[j] -= k;
      total += factor * fill(i, j + 1, row_left - k);
      col_left[j] += k;
    }
    return total;
  };

  const double sum = fill(0, 0, a.slot(1));
  return sum * std::exp(0.5 * (a.log_factorial() + a2.log_factorial()));
}

double coarse_fine_hs(const MultiIndex& a, const MultiIndex& a2, std::size_t n0, std::size_t n1) {
  if (a.degree() != a2.degree() || !matches(a2, a, n0, n1)) return 0.0;
  const double m = static_cast<double>(a.degree());
  return std::exp(0.5 * (a.log_factorial() - a2.log_factorial()) - 0.5 * m * std::log(static_cast<double>(n1)));
}

ChaosExpansion refine(const ChaosExpansion& f, std::size_t n1) {
  if (n1 == 0) throw std::invalid_argument("refine: N1 must be positive");
  const std::size_t n0 = f.grid().steps;
  const GridSpec fine_grid{f.grid().horizon, n0 * n1};
  if (n1 == 1) return ChaosExpansion(fine_grid, f.coefficients());

  const double log_n1 = std::log(static_cast<double>(n1));
  ChaosExpansion::Coefficients out;
  for (const auto& [a, c] : f.coefficients()) {
    const double base = 0.5 * a.log_factorial() - 0.5 * static_cast<double>(a.degree()) * log_n1;
    for_each_matching(a, n0, n1, [&](const MultiIndex& fine) {
      out.emplace(fine, c * std::exp(base - 0.5 * fine.log_factorial()));
    });
  }
  return ChaosExpansion(fine_grid, std::move(out));
}

void write_expansion_csv(std::ostream& out, const ChaosExpansion& f) {
  out << "# grid T=" << csv::format_real(f.grid().horizon) << " N=" << f.grid().steps << '\n';
  out << "multiindex,coefficient\n";
  for (const auto& [a, c] : f.coefficients()) out << csv::quote(a.to_string()) << ',' << csv::format_real(c) << '\n';
}

ChaosExpansion read_expansion_csv(std::istream& in, std::optional<GridSpec> grid) {
  ChaosExpansion::Coefficients coefficients;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream comment(line.substr(1));
      std::string word;
      comment >> word;
      if (word != "grid") continue;
      GridSpec parsed;
      while (comment >> word) {
        if (word.starts_with("T=")) parsed.horizon = csv::parse_real(word.substr(2));
        else if (word.starts_with("N=")) parsed.steps = std::stoul(word.substr(2));
      }
      grid = parsed;
      continue;
    }
    if (!header_seen) {
      if (line != "multiindex,coefficient") throw std::invalid_argument("expansion csv: bad header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = csv::split(line);
    if (fields.size() != 2) throw std::invalid_argument("expansion csv: expected 2 fields in '" + line + "'");
    auto [it, inserted] = coefficients.emplace(MultiIndex::parse(fields[0]), csv::parse_real(fields[1]));
    if (!inserted) throw std::invalid_argument("expansion csv: duplicate key " + it->first.to_string());
  }
  if (!header_seen) throw std::invalid_argument("expansion csv: missing header");
  if (!grid) throw std::invalid_argument("expansion csv: no grid given");
  return ChaosExpansion(*grid, std::move(coefficients));
}

}  // namespace dco
