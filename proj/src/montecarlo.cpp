#include "dco/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "dco/clark_ocone.hpp"
#include "dco/hermite.hpp"
#include "dco/parallel.hpp"

namespace dco {

namespace {

constexpr std::size_t kBlockSize = 1024;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// SplitMix64 stream; one per sample, keyed by (seed, sample index).
class SampleStream {
 public:
  using result_type = std::uint64_t;
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(mix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^ (index * 0xd1b54a32d192ed03ull + 0x632be59bd9b4e019ull))) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return mix64(state_ += 0x9e3779b97f4a7c15ull); }

 private:
  std::uint64_t state_;
};

void check_finite(const std::vector<double>& values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw NumericalError(std::string(what) + ": non-finite coefficient");
}

}  // namespace

std::vector<double> hermite_expand_terminal(const std::function<double(double)>& f, double horizon,
                                            unsigned max_degree, std::optional<std::size_t> order) {
  if (!(horizon > 0.0)) throw std::invalid_argument("hermite_expand_terminal: T must be positive");
  const auto& rule = cached_gauss_hermite_rule(order.value_or(max_degree + 8));
  const double scale = std::sqrt(horizon);
  std::vector<double> d(max_degree + 1, 0.0);
  for (std::size_t q = 0; q < rule.order(); ++q) {
    const double fx = f(scale * rule.nodes[q]);
    const auto h = hermite_table(max_degree, rule.nodes[q]);
    for (unsigned k = 0; k <= max_degree; ++k) d[k] += rule.weights[q] * fx * h[k];
  }
  check_finite(d, "hermite_expand_terminal");
  return d;
}

std::vector<double> hermite_expand_terminal(const Payoff& payoff, double horizon, unsigned max_degree) {
  if (!(horizon > 0.0)) throw std::invalid_argument("hermite_expand_terminal: T must be positive");
  switch (payoff.kind()) {
    case Payoff::Kind::polynomial: {
      // Horner in the He basis for p(sqrt(T) z), using z He_k = He_{k+1} + k He_{k-1}.
      auto c = payoff.polynomial_coefficients();
      for (std::size_t j = 1; j < c.size(); ++j) c[j] *= std::pow(horizon, 0.5 * static_cast<double>(j));
      std::vector<double> he{c.back()};
      for (std::size_t j = c.size() - 1; j-- > 0;) {
        std::vector<double> next(he.size() + 1, 0.0);
        for (std::size_t k = 0; k < he.size(); ++k) {
          next[k + 1] += he[k];
          if (k) next[k - 1] += static_cast<double>(k) * he[k];
        }
        next[0] += c[j];
        he = std::move(next);
      }
      std::vector<double> d(max_degree + 1, 0.0);
      double root_factorial = 1.0;
      for (std::size_t k = 0; k < he.size() && k <= max_degree; ++k) {
        if (k) root_factorial *= std::sqrt(static_cast<double>(k));
        d[k] = he[k] * root_factorial;
      }
      check_finite(d, "hermite_expand_terminal");
      return d;
    }
    case Payoff::Kind::smooth:
      return hermite_expand_terminal([&](double x) { return payoff.terminal_value(x); }, horizon, max_degree);
    case Payoff::Kind::digital: {
      const double threshold = payoff.strike() / std::sqrt(horizon);
      std::vector<double> d(max_degree + 1);
      for (unsigned k = 0; k <= max_degree; ++k) d[k] = hermite_indicator_integral(k, threshold);
      check_finite(d, "hermite_expand_terminal");
      return d;
    }
    case Payoff::Kind::occupation_time:
      break;
  }
  throw std::invalid_argument("hermite_expand_terminal: payoff '" + payoff.id() + "' is not terminal");
}

ChaosExpansion coeffs_terminal(const Payoff& payoff, const GridSpec& grid, unsigned max_degree) {
  grid.validate();
  const auto d = hermite_expand_terminal(payoff, grid.horizon, max_degree);
  ChaosExpansion::Coefficients one_step;
  for (unsigned k = 0; k <= max_degree; ++k) one_step.emplace(MultiIndex{k}, d[k]);
  return refine(ChaosExpansion(GridSpec{grid.horizon, 1}, std::move(one_step)), grid.steps);
}

ChaosExpansion coeffs_occupation_time(const GridSpec& grid, unsigned max_degree) {
  grid.validate();
  const double dt = grid.step_variance();
  // The threshold is 0, so the one-step digital coefficients do not depend on t_i.
  ChaosExpansion::Coefficients one_step;
  for (unsigned k = 0; k <= max_degree; ++k) one_step.emplace(MultiIndex{k}, hermite_indicator_integral(k, 0.0));

  ChaosExpansion::Coefficients total;
  for (std::size_t i = 1; i <= grid.steps; ++i) {
    const ChaosExpansion summand = refine(ChaosExpansion(GridSpec{dt * static_cast<double>(i), 1}, one_step), i);
    for (const auto& [a, c] : summand.coefficients()) total[a] += dt * c;
  }
  return ChaosExpansion(grid, std::move(total));
}

double occupation_time_err_norm(const GridSpec& grid, unsigned n, unsigned max_degree, double s) {
  grid.validate();
  const std::size_t steps = grid.steps;
  const double dt = grid.step_variance();
  double total = 0.0;
  for (unsigned m = n + 1; m <= max_degree; ++m) {
    const double dm = hermite_indicator_integral(m, 0.0);
    if (dm == 0.0) continue;
    const double half_m = 0.5 * m;
    double per_degree = 0.0;
    // keys whose last nonzero slot is ell: only summands i >= ell contribute,
    // sum_{a'} m!/a'! over those keys is ell^m P[Bin(m, 1/ell) > n]
    for (std::size_t ell = 1; ell <= steps; ++ell) {
      double reach = 0.0;
      for (std::size_t i = ell; i <= steps; ++i)
        reach += std::pow(static_cast<double>(ell) / static_cast<double>(i), half_m);
      per_degree += reach * reach * binomial_upper_tail(m, 1.0 / static_cast<double>(ell), n);
    }
    total += std::pow(1.0 + m, s) * dm * dm * per_degree;
  }
  return dt * std::sqrt(total);
}

PathBatch sample_paths(const GridSpec& grid, std::size_t samples, std::uint64_t seed, unsigned workers) {
  grid.validate();
  if (samples == 0) throw std::invalid_argument("sample_paths: n_samples must be >= 1");
  PathBatch batch{grid, samples, seed, std::vector<double>(samples * grid.steps)};
  const std::size_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  parallel_blocks(blocks, workers, [&](std::size_t b) {
    const std::size_t end = std::min(samples, (b + 1) * kBlockSize);
    for (std::size_t k = b * kBlockSize; k < end; ++k) {
      SampleStream stream(seed, k);
      std::normal_distribution<double> normal;
      double* row = batch.increments.data() + k * grid.steps;
      for (std::size_t i = 0; i < grid.steps; ++i) row[i] = normal(stream);
    }
  });
  return batch;
}

McEstimate mc_l2_norm(std::size_t samples, unsigned workers, const std::function<double(std::size_t)>& value) {
  if (samples == 0) throw std::invalid_argument("mc_l2_norm: no samples");
  struct Moments {
    double count = 0.0, mean = 0.0, m2 = 0.0;
  };
  const std::size_t blocks = (samples + kBlockSize - 1) / kBlockSize;
  std::vector<Moments> partial(blocks);
  parallel_blocks(blocks, workers, [&](std::size_t b) {
    Moments acc;
    const std::size_t end = std::min(samples, (b + 1) * kBlockSize);
    for (std::size_t k = b * kBlockSize; k < end; ++k) {
      const double v = value(k);
      const double y = v * v;
      acc.count += 1.0;
      const double delta = y - acc.mean;
      acc.mean += delta / acc.count;
      acc.m2 += delta * (y - acc.mean);
    }
    partial[b] = acc;
  });

  Moments total;
  for (const auto& p : partial) {  // fixed block order
    const double count = total.count + p.count;
    const double delta = p.mean - total.mean;
    total.mean += delta * p.count / count;
    total.m2 += p.m2 + delta * delta * total.count * p.count / count;
    total.count = count;
  }
  if (!std::isfinite(total.mean)) throw NumericalError("mc_l2_norm: non-finite sample");

  McEstimate out;
  out.estimate = std::sqrt(total.mean);
  if (out.estimate > 0.0 && total.count > 1.0) {
    const double se_mean_square = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
    out.std_error = se_mean_square / (2.0 * out.estimate);
  }
  return out;
}

McEstimate mc_err_norm(const ChaosExpansion& f, unsigned n, const PathBatch& batch, unsigned workers) {
  if (!(batch.grid == f.grid())) throw std::invalid_argument("mc_err_norm: path grid does not match expansion grid");
  const ChaosExpansion tail = err_tail(f, n);
  if (tail.size() == 0) return {};
  return mc_l2_norm(batch.samples, workers, [&](std::size_t k) { return evaluate(tail, batch.path(k)); });
}

McEstimate tracking_error_hedge(const Payoff& payoff, const PathBatch& batch, unsigned workers) {
  const GridSpec& grid = batch.grid;
  const double dt = grid.step_variance();
  const double scale = std::sqrt(dt);
  const std::size_t steps = grid.steps;
  const bool occupation = payoff.kind() == Payoff::Kind::occupation_time;
  const double mean = occupation ? 0.5 * grid.horizon : payoff.smoothed_value(0.0, grid.horizon);

  std::vector<double> lag_sd(steps + 1, 0.0);  // sqrt(j dt)
  for (std::size_t j = 1; j <= steps; ++j) lag_sd[j] = std::sqrt(static_cast<double>(j) * dt);

  return mc_l2_norm(batch.samples, workers, [&](std::size_t k) {
    const auto xi = batch.path(k);
    double w = 0.0;
    double hedge = 0.0;
    for (std::size_t ell = 1; ell <= steps; ++ell) {
      double delta;
      if (occupation) {
        // E[d/dW_ell sum_{i>=ell} 1(W_{t_i} >= 0) dt | W_{t_{ell-1}} = w]
        delta = 0.0;
        for (std::size_t i = ell; i <= steps; ++i) {
          const double sd = lag_sd[i - ell + 1];
          delta += normal_pdf(w / sd) / sd;
        }
        delta *= dt;
      } else {
        delta = payoff.smoothed_delta(w, grid.horizon - static_cast<double>(ell - 1) * dt);
      }
      const double dw = scale * xi[ell - 1];
      hedge += delta * dw;
      w += dw;
    }
    return payoff.path_value(xi, grid) - mean - hedge;
  });
}

ChaosExpansion random_expansion(std::uint64_t seed, std::size_t case_index, double horizon) {
  SampleStream key(seed, case_index);
  std::mt19937_64 rng(key());
  std::uniform_int_distribution<std::size_t> steps_dist(1, 3);
  std::uniform_int_distribution<std::size_t> degree_dist(1, 6);
  std::uniform_real_distribution<double> coefficient(-1.0, 1.0);
  const std::size_t steps = steps_dist(rng);
  const std::size_t degree = degree_dist(rng);
  ChaosExpansion::Coefficients coefficients;
  for (const auto& a : enumerate_upto(steps, degree)) coefficients.emplace(a, coefficient(rng));
  return ChaosExpansion(GridSpec{horizon, steps}, std::move(coefficients));
}

}  // namespace dco
