#include "dco/rate_sweep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dco/clark_ocone.hpp"
#include "dco/csv.hpp"
#include "dco/montecarlo.hpp"

namespace dco {

std::optional<double> fit_log_log_slope(const std::vector<double>& x, const std::vector<double>& y,
                                        std::vector<std::size_t>* excluded) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_log_log_slope: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] > 0.0 && x[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    } else if (excluded) {
      excluded->push_back(static_cast<std::size_t>(x[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

RateReport rate_sweep(const Payoff& payoff, unsigned n, double s, double r, const std::vector<std::size_t>& n1_list,
                      std::size_t n0, double horizon, unsigned max_degree) {
  if (n1_list.empty()) throw std::invalid_argument("rate_sweep: N1 list is empty");
  for (std::size_t i = 0; i < n1_list.size(); ++i) {
    if (n1_list[i] == 0) throw std::invalid_argument("rate_sweep: N1 must be >= 1");
    if (i && n1_list[i] <= n1_list[i - 1]) throw std::invalid_argument("rate_sweep: N1 list must be increasing");
  }
  if (r < 0.0 || r > 1.0) throw std::invalid_argument("rate_sweep: r must lie in [0, 1]");
  const GridSpec coarse{horizon, n0};
  coarse.validate();

  RateReport report{payoff.id(), n, s, r, n0, {}, std::nullopt, {}};
  if (payoff.is_terminal()) {
    const ChaosExpansion f = coeffs_terminal(payoff, coarse, max_degree);
    for (std::size_t n1 : n1_list) {
      const BoundCheck check = verify_bound(f, n, n1, s, r);
      report.rows.push_back({n1, check.lhs, check.rhs, check.holds});
    }
  } else {
    for (std::size_t n1 : n1_list)
      report.rows.push_back({n1, occupation_time_err_norm(GridSpec{horizon, n0 * n1}, n, max_degree, s), {}, {}});
  }

  std::vector<double> x, y;
  for (const auto& row : report.rows) {
    x.push_back(static_cast<double>(row.n1));
    y.push_back(row.error_norm);
  }
  report.fitted_slope = fit_log_log_slope(x, y, &report.excluded_from_fit);
  return report;
}

void write_rate_report_csv(std::ostream& out, const RateReport& report) {
  out << "N1,error_norm,bound,holds\n";
  for (const auto& row : report.rows) {
    out << row.n1 << ',' << csv::format_real(row.error_norm) << ','
        << csv::format_real(row.bound.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
        << (row.holds ? (*row.holds ? "true" : "false") : "n/a") << '\n';
  }
  out << "slope=" << csv::format_real(report.fitted_slope.value_or(std::numeric_limits<double>::quiet_NaN())) << '\n';
}

}  // namespace dco
