#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dco/chaos.hpp"

namespace dco {

/// Wiener functionals used in the experiments. Terminal kinds depend on W_T only;
/// the occupation time sum_i 1_{[0,inf)}(W_{t_i}) T/N depends on the whole path.
class Payoff {
 public:
  enum class Kind { polynomial, smooth, digital, occupation_time };

  /// f(x) = sum_k coefficients[k] x^k.
  static Payoff polynomial(std::vector<double> coefficients);
  static Payoff constant(double value) { return polynomial({value}); }
  /// Smooth terminal f with derivative; `id` names it in reports.
  static Payoff smooth(std::string id, std::function<double(double)> value, std::function<double(double)> derivative);
  /// f(x) = exp(rate * x).
  static Payoff exponential(double rate);
  /// f(x) = 1_{[K, inf)}(x).
  static Payoff digital(double strike);
  static Payoff occupation_time();

  /// "poly:c0,c1,...", "const:v", "exp:rate", "digital:K" or "occupation".
  /// Throws std::invalid_argument on anything else.
  static Payoff parse(std::string_view spec);

  Kind kind() const;
  bool is_terminal() const { return kind() != Kind::occupation_time; }
  const std::string& id() const { return id_; }

  /// Polynomial coefficients; empty for other kinds.
  std::vector<double> polynomial_coefficients() const;
  std::optional<std::size_t> polynomial_degree() const;
  double strike() const;

  /// f(w) for terminal kinds.
  double terminal_value(double w) const;
  /// E[f(w + sqrt(tau) Z)].
  double smoothed_value(double w, double tau) const;
  /// E[f'(w + sqrt(tau) Z)]; for the digital this is the density phi((K-w)/sqrt(tau))/sqrt(tau).
  double smoothed_delta(double w, double tau) const;

  /// F evaluated on one path of standardized increments over `grid`.
  double path_value(std::span<const double> xi, const GridSpec& grid) const;

 private:
  struct Polynomial {
    std::vector<double> coefficients;
  };
  struct Smooth {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
  };
  struct Digital {
    double strike;
  };
  struct OccupationTime {};

  Payoff(std::string id, std::variant<Polynomial, Smooth, Digital, OccupationTime> shape)
      : id_(std::move(id)), shape_(std::move(shape)) {}

  std::string id_;
  std::variant<Polynomial, Smooth, Digital, OccupationTime> shape_;
};

/// Gauss-Hermite order used for conditional expectations of smooth terminal payoffs.
inline constexpr std::size_t kSmoothingQuadratureOrder = 48;

}  // namespace dco
