// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unistd.h>

#include "dco/chaos.hpp"
#include "dco/clark_ocone.hpp"
#include "dco/hermite.hpp"
#include "dco/montecarlo.hpp"
#include "dco/rate_sweep.hpp"

using namespace dco;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

std::string fmt(const char* f, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, f, args...);
  return buffer;
}

void criterion(int id, const char* title, double time_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (time_limit > 0.0 && seconds > time_limit) {
    out.pass = false;
    out.detail += fmt("; over the %.0f s limit", time_limit);
  }
  if (!out.pass) ++failures;
  std::printf("%s %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), seconds);
  std::fflush(stdout);
}

std::vector<std::size_t> powers_of_two(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> out;
  for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
  return out;
}

double single_slope(const ChaosExpansion& f, unsigned n, std::size_t lo, std::size_t hi) {
  std::vector<double> x, y;
  for (std::size_t n1 : powers_of_two(lo, hi)) {
    x.push_back(double(n1));
    y.push_back(err_norm_refined(f, n, n1, 0.0));
  }
  return fit_log_log_slope(x, y).value_or(NAN);
}

// Rows of a Haar-random orthogonal matrix.
Eigen::MatrixXd random_rotation_rows(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(cols, cols);
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ();
  return q.topRows(static_cast<Eigen::Index>(rows));
}

// E[H_a(G xi) H_b(xi)] for all a (coarse) and b (fine) at once, by tensor Gauss-Hermite
// quadrature in the fine coordinates; W(h_i) = sum_j g_ij xi_j.
Eigen::MatrixXd quadrature_pairings(const Eigen::MatrixXd& g, const std::vector<MultiIndex>& coarse,
                                    const std::vector<MultiIndex>& fine, std::size_t order) {
  const auto rows = static_cast<std::size_t>(g.rows()), cols = static_cast<std::size_t>(g.cols());
  const auto& rule = cached_gauss_hermite_rule(order);
  std::size_t points = 1;
  for (std::size_t j = 0; j < cols; ++j) points *= order;
  Eigen::MatrixXd v(points, coarse.size()), u(points, fine.size());
  Eigen::VectorXd w(points);
  std::vector<double> xi(cols), x(rows);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    double weight = 1.0;
    for (std::size_t j = 0; j < cols; ++j) {
      xi[j] = rule.nodes[rest % order];
      weight *= rule.weights[rest % order];
      rest /= order;
    }
    for (std::size_t i = 0; i < rows; ++i) {
      x[i] = 0.0;
      for (std::size_t j = 0; j < cols; ++j) x[i] += g(i, j) * xi[j];
    }
    w(p) = weight;
    for (std::size_t k = 0; k < coarse.size(); ++k) v(p, k) = fourier_hermite(coarse[k], x);
    for (std::size_t k = 0; k < fine.size(); ++k) u(p, k) = fourier_hermite(fine[k], xi);
  }
  return v.transpose() * w.asDiagonal() * u;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

int main() {
  criterion(1, "Hermite orthonormality, m,n <= 12, order-30 rule", 1.0, [] {
    const auto& rule = cached_gauss_hermite_rule(30);
    double worst = 0.0;
    for (unsigned m = 0; m <= 12; ++m)
      for (unsigned n = 0; n <= 12; ++n) {
        const double got = rule.integrate([&](double x) { return hermite(m, x) * hermite(n, x); });
        worst = std::max(worst, std::abs(got - (m == n ? 1.0 : 0.0)));
      }
    return Outcome{worst < 1e-12, fmt("max |E[H_m H_n] - delta| = %.2e, tolerance 1e-12", worst)};
  });

  criterion(2, "pairing oracles agree (brute force, tables, tensor quadrature)", 30.0, [] {
    std::mt19937_64 rng(314159);
    double worst_table = 0.0, worst_quad = 0.0;
    std::size_t pairs = 0, grams = 0;
    for (std::size_t n0 = 1; n0 <= 2; ++n0)
      for (std::size_t n1 = 1; n1 <= 3; ++n1) {
        const std::size_t cols = n0 * n1;
        const auto coarse = enumerate_upto(n0, 4);
        const auto fine = enumerate_upto(cols, 4);
        std::vector<Eigen::MatrixXd> matrices{GramMatrix::coarse_fine(n0, n1).values()};
        for (int k = 0; k < 20; ++k) matrices.push_back(random_rotation_rows(n0, cols, rng));
        for (const auto& g : matrices) {
          ++grams;
          const GramMatrix gram(g);
          const Eigen::MatrixXd quad = quadrature_pairings(g, coarse, fine, 5);
          for (std::size_t i = 0; i < coarse.size(); ++i)
            for (std::size_t j = 0; j < fine.size(); ++j) {
              if (coarse[i].degree() != fine[j].degree()) continue;
              ++pairs;
              const double brute = hs_bruteforce(coarse[i], fine[j], gram);
              const double table = pairing_combinatorial(coarse[i], fine[j], gram);
              worst_table = std::max(worst_table, std::abs(brute - table));
              worst_quad = std::max({worst_quad, std::abs(brute - quad(i, j)), std::abs(table - quad(i, j))});
            }
        }
      }
    return Outcome{worst_table <= 1e-10 && worst_quad <= 1e-8,
                   fmt("%zu pairs over %zu Gram matrices; tables vs brute %.2e (tol 1e-10), vs quadrature %.2e (tol 1e-8)",
                       pairs, grams, worst_table, worst_quad)};
  });

  criterion(3, "coarse/fine closed form equals brute force", 0.0, [] {
    double worst = 0.0;
    std::size_t pairs = 0, nonzero_mismatch = 0;
    for (std::size_t n0 = 1; n0 <= 2; ++n0)
      for (std::size_t n1 = 1; n1 <= 3; ++n1) {
        const auto gram = GramMatrix::coarse_fine(n0, n1);
        for (std::size_t m = 0; m <= 4; ++m)
          for (const auto& a : enumerate_degree(n0, m))
            for (const auto& b : enumerate_degree(n0 * n1, m)) {
              ++pairs;
              const double closed = coarse_fine_hs(a, b, n0, n1);
              worst = std::max(worst, std::abs(closed - hs_bruteforce(a, b, gram)));
              if (!matches(b, a, n0, n1) && closed != 0.0) ++nonzero_mismatch;
            }
      }
    return Outcome{worst <= 1e-12 && nonzero_mismatch == 0,
                   fmt("%zu pairs, max deviation %.2e (tol 1e-12), non-matching nonzero: %zu", pairs, worst,
                       nonzero_mismatch)};
  });

  criterion(4, "matching mass sums to one; tail mass under its bound", 0.0, [] {
    double worst_sum = 0.0;
    std::size_t cases = 0, violations = 0;
    for (std::size_t n0 = 1; n0 <= 2; ++n0)
      for (std::size_t n1 = 1; n1 <= 4; ++n1)
        for (const auto& a : enumerate_upto(n0, 6)) {
          double mass = 0.0;
          for (const auto& f : enumerate_matching(a, n0, n1))
            mass += std::exp(a.log_factorial() - f.log_factorial() - double(a.degree()) * std::log(double(n1)));
          worst_sum = std::max(worst_sum, std::abs(mass - 1.0));
          if (a.is_zero()) continue;
          for (unsigned n = 1; n <= 6; ++n)
            for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
              ++cases;
              if (tail_mass(a, n, n1) > tail_mass_bound(a, n, n1, r)) ++violations;
            }
        }
    return Outcome{worst_sum <= 1e-12 && violations == 0,
                   fmt("max |sum - 1| = %.2e (tol 1e-12); bound violations %zu of %zu", worst_sum, violations, cases)};
  });

  criterion(5, "tail mass closed form equals enumeration", 0.0, [] {
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t n0 = 1; n0 <= 2; ++n0)
      for (std::size_t n1 = 1; n1 <= 4; ++n1)
        for (const auto& a : enumerate_upto(n0, 6)) {
          if (a.is_zero()) continue;
          for (unsigned n = 1; n <= 6; ++n) {
            double enumerated = 0.0;
            for (const auto& f : enumerate_matching(a, a.size(), n1))
              if (f.last_nonzero()->value > n)
                enumerated += std::exp(a.log_factorial() - f.log_factorial() - double(a.degree()) * std::log(double(n1)));
            worst = std::max(worst, std::abs(tail_mass(a, n, n1) - enumerated));
            ++cases;
          }
        }
    return Outcome{worst <= 1e-12, fmt("%zu cases, max deviation %.2e (tol 1e-12)", cases, worst)};
  });

  criterion(6, "refined error bound on random expansions, plus full-rate slopes", 60.0, [] {
    std::size_t checks = 0, failed = 0;
    double tightest = INFINITY;
    for (std::size_t k = 0; k < 100; ++k) {
      const auto f = random_expansion(20240101, k);
      for (unsigned n = 1; n <= 3; ++n)
        for (std::size_t n1 : {1u, 2u, 4u, 8u})
          for (double s : {-1.0, 0.0, 1.0})
            for (double r : {0.0, 0.5, 1.0}) {
              const auto check = verify_bound(f, n, n1, s, r);
              ++checks;
              if (!check.holds) ++failed;
              if (check.rhs > 0.0) tightest = std::min(tightest, check.slack / check.rhs);
            }
    }
    std::string slopes;
    bool slopes_ok = true;
    for (unsigned m = 3; m <= 5; ++m)
      for (unsigned n = 1; n < m; ++n) {
        const double slope = single_slope(ChaosExpansion(GridSpec{1.0, 1}, {{MultiIndex{m}, 1.0}}), n, 4, 256);
        slopes_ok = slopes_ok && std::abs(slope + 0.5 * n) <= 0.1;
        slopes += fmt(" (m=%u,n=%u)%.3f", m, n, slope);
      }
    return Outcome{failed == 0 && slopes_ok,
                   fmt("%zu checks, %zu violations, min relative slack %.2e; slopes vs -n/2 +- 0.1:", checks, failed,
                       tightest) + slopes};
  });

  criterion(7, "decompose/reconstruct identity on 1000 random expansions", 0.0, [] {
    double worst = 0.0;
    std::size_t mismatched_support = 0;
    for (std::size_t k = 0; k < 1000; ++k) {
      const auto f = random_expansion(777, k);
      const auto back = reconstruct(decompose(f));
      if (back.size() != f.size()) ++mismatched_support;
      for (const auto& [a, c] : f.coefficients()) worst = std::max(worst, std::abs(back.coefficient(a) - c));
    }
    return Outcome{worst <= 1e-14 && mismatched_support == 0,
                   fmt("max coefficient deviation %.2e (tol 1e-14), support mismatches %zu", worst, mismatched_support)};
  });

  criterion(8, "tracking error of W_T^2, T=1, N=4, 1e5 paths", 0.0, [] {
    const auto batch = sample_paths(GridSpec{1.0, 4}, 100000, 8, 1);
    const auto e = tracking_error_hedge(Payoff::polynomial({0.0, 0.0, 1.0}), batch, 1);
    const double exact = std::sqrt(0.5);
    return Outcome{std::abs(e.estimate - exact) <= 3.0 * e.std_error,
                   fmt("estimate %.5f +- %.5f vs sqrt(2)/2 = %.5f (%.2f standard errors)", e.estimate, e.std_error, exact,
                       std::abs(e.estimate - exact) / e.std_error)};
  });

  criterion(9, "digital first-order rate, degree 20, slope in [-0.35, -0.15]", 60.0, [] {
    const auto report = rate_sweep(Payoff::digital(0.0), 1, 0.0, 1.0, powers_of_two(4, 256), 1, 1.0, 20);
    const double slope = report.fitted_slope.value_or(NAN);
    return Outcome{slope >= -0.35 && slope <= -0.15,
                   fmt("fitted slope %.4f over N1 = 4..256 (errors %.4f -> %.4f)", slope, report.rows.front().error_norm,
                       report.rows.back().error_norm)};
  });
  {
    // Not a criterion: the same computation with a deeper truncation, for context on 9.
    const auto deep = rate_sweep(Payoff::digital(0.0), 1, 0.0, 1.0, powers_of_two(4, 256), 1, 1.0, 1000);
    std::printf("INFO  9 digital with truncation degree 1000: fitted slope %.4f\n", deep.fitted_slope.value_or(NAN));
  }

  criterion(10, "occupation-time first-order rate, N = 4..64, slope in [-0.65, -0.35]", 0.0, [] {
    std::vector<double> x, y;
    for (std::size_t n : powers_of_two(4, 64)) {
      x.push_back(double(n));
      y.push_back(occupation_time_err_norm(GridSpec{1.0, n}, 1, 20));
    }
    // cross-check the closed form against materialized coefficients on the smallest grid
    const double materialized = sobolev_norm(err_tail(coeffs_occupation_time(GridSpec{1.0, 4}, 20), 1), 0.0);
    const double slope = fit_log_log_slope(x, y).value_or(NAN);
    const bool consistent = std::abs(materialized - y.front()) <= 1e-12 * y.front();
    return Outcome{slope >= -0.65 && slope <= -0.35 && consistent,
                   fmt("fitted slope %.4f at truncation degree 20 (N=4 closed form vs materialized: %.2e)", slope,
                       std::abs(materialized - y.front()))};
  });

  criterion(11, "full decomposition is a perfect control variate for polynomials", 0.0, [] {
    const GridSpec grid{1.0, 4};
    const auto batch = sample_paths(grid, 10000, 11, 1);
    const std::vector<std::vector<double>> polynomials{
        {0.5, 1.0}, {0.0, 0.0, 1.0}, {1.0, -2.0, 0.5, 1.0}, {0.0, 1.0, 0.0, -0.5, 0.25}, {2.0, 0.0, 0.0, 0.0, 0.0, 0.1}};
    double worst = 0.0, worst_variance = 0.0;
    for (const auto& c : polynomials) {
      const auto payoff = Payoff::polynomial(c);
      const auto degree = static_cast<unsigned>(*payoff.polynomial_degree());
      const auto d = truncate(decompose(coeffs_terminal(payoff, grid, degree)), degree);
      double sum = 0.0, squares = 0.0;
      for (std::size_t k = 0; k < batch.samples; ++k) {
        const auto xi = batch.path(k);
        double control = d.mean;
        for (const auto& t : d.terms) control += evaluate(t.integrand, xi) * hermite(t.order, xi[t.ell - 1]);
        const double residual = payoff.path_value(xi, grid) - control;
        worst = std::max(worst, std::abs(residual));
        sum += residual;
        squares += residual * residual;
      }
      const double n = double(batch.samples);
      worst_variance = std::max(worst_variance, squares / n - (sum / n) * (sum / n));
    }
    return Outcome{worst <= 1e-12 && worst_variance <= 1e-12,
                   fmt("degrees 1..5 on 1e4 paths: max |F - control| = %.2e, max variance %.2e (tol 1e-12)", worst,
                       worst_variance)};
  });

  criterion(12, "CLI output is byte-identical across runs and worker counts {1, 4}", 0.0, [] {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / ("dco_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> configs{
        "simulate-hedge --payoff digital:0 --samples 20000 --seed 5",
        "simulate-hedge --payoff occupation --samples 5000 --N1-list 4,8,16 --seed 6",
        "rate-sweep --payoff digital:0",
        "verify-bound --random-cases 20 --N1-list 1,2,4 --seed 7",
        "expand --payoff exp:0.5 --N1-list 3 --max-degree 6",
        "decompose --payoff poly:1,0,1,1 --N1-list 2",
    };
    std::size_t identical = 0, runs_failed = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::vector<std::string> outputs;
      for (const char* workers : {"1", "4", "1", "4"}) {
        const auto out = dir / ("run" + std::to_string(outputs.size()) + ".csv");
        const std::string command =
            std::string(DCO_CLI_PATH) + " " + configs[i] + " --workers " + workers + " --out " + out.string() + " 2>/dev/null";
        if (std::system(command.c_str()) != 0) ++runs_failed;
        outputs.push_back(read_file(out));
      }
      if (!outputs[0].empty() && std::all_of(outputs.begin(), outputs.end(), [&](const auto& o) { return o == outputs[0]; }))
        ++identical;
    }
    fs::remove_all(dir);
    return Outcome{identical == configs.size() && runs_failed == 0,
                   fmt("%zu of %zu configurations identical over 4 runs each, %zu failed runs", identical, configs.size(),
                       runs_failed)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
