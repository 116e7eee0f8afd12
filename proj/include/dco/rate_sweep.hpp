#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <ostream>
#include <vector>

#include "dco/payoff.hpp"

namespace dco {

struct RateRow {
  std::size_t n1 = 0;
  double error_norm = 0.0;
  std::optional<double> bound;  // absent for the occupation time
  std::optional<bool> holds;
};

struct RateReport {
  std::string payoff_id;
  unsigned n = 1;
  double s = 0.0;
  double r = 0.0;
  std::size_t n0 = 1;
  std::vector<RateRow> rows;
  std::optional<double> fitted_slope;  // absent when fewer than two nonzero rows
  std::vector<std::size_t> excluded_from_fit;
};

/// Ordinary least squares slope of log y against log x, skipping points with y <= 0.
/// Returns nullopt when fewer than two points remain. `excluded` receives the skipped x.
std::optional<double> fit_log_log_slope(const std::vector<double>& x, const std::vector<double>& y,
                                        std::vector<std::size_t>* excluded = nullptr);

/// Exact first-order error norms after refining by each N1 in `n1_list`.
/// Terminal payoffs: coarse expansion on N0 steps, error and bound per N1.
/// Occupation time: the truncated functional on N0*N1 steps, no bound.
/// Throws std::invalid_argument if n1_list is empty, not strictly increasing, or contains 0.
RateReport rate_sweep(const Payoff& payoff, unsigned n, double s, double r, const std::vector<std::size_t>& n1_list,
                      std::size_t n0, double horizon, unsigned max_degree);

/// "N1,error_norm,bound,holds" rows then "slope=<value>" ("slope=nan" without a fit).
void write_rate_report_csv(std::ostream& out, const RateReport& report);

}  // namespace dco
