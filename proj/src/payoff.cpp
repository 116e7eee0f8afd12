#include "dco/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dco/csv.hpp"
#include "dco/hermite.hpp"

namespace dco {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double horner(const std::vector<double>& c, double x) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> parse_list(std::string_view text) {
  // ';' is accepted too, so report ids like "poly:1;0;1" parse back
  std::string joined(text);
  std::replace(joined.begin(), joined.end(), ';', ',');
  std::vector<double> out;
  for (const auto& field : csv::split(joined)) out.push_back(csv::parse_real(field));
  return out;
}

}  // namespace

Payoff Payoff::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  for (double c : coefficients)
    if (!std::isfinite(c)) throw std::invalid_argument("polynomial payoff: non-finite coefficient");
  while (coefficients.size() > 1 && coefficients.back() == 0.0) coefficients.pop_back();
  std::string id = coefficients.size() == 1 ? "const:" : "poly:";
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    if (k) id += ';';
    id += csv::format_real(coefficients[k]);
  }
  return Payoff(std::move(id), Polynomial{std::move(coefficients)});
}

Payoff Payoff::smooth(std::string id, std::function<double(double)> value, std::function<double(double)> derivative) {
  if (!value || !derivative) throw std::invalid_argument("smooth payoff: value and derivative are required");
  return Payoff(std::move(id), Smooth{std::move(value), std::move(derivative)});
}

Payoff Payoff::exponential(double rate) {
  if (!std::isfinite(rate)) throw std::invalid_argument("exp payoff: rate must be finite");
  return smooth("exp:" + csv::format_real(rate), [rate](double x) { return std::exp(rate * x); },
                [rate](double x) { return rate * std::exp(rate * x); });
}

Payoff Payoff::digital(double strike) {
  if (!std::isfinite(strike)) throw std::invalid_argument("digital payoff: strike must be finite");
  return Payoff("digital:" + csv::format_real(strike), Digital{strike});
}

Payoff Payoff::occupation_time() { return Payoff("occupation", OccupationTime{}); }

Payoff Payoff::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  const auto args = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  auto require_single = [&](std::string_view what) {
    auto values = parse_list(args);
    if (values.size() != 1) throw std::invalid_argument(std::string(what) + " payoff takes one parameter");
    return values.front();
  };
  if (name == "poly") return polynomial(parse_list(args));
  if (name == "const") return constant(require_single("const"));
  if (name == "exp") return exponential(require_single("exp"));
  if (name == "digital") return digital(args.empty() ? 0.0 : require_single("digital"));
  if (name == "occupation" && args.empty()) return occupation_time();
  throw std::invalid_argument("unknown payoff '" + std::string(spec) +
                              "' (expected poly:c0,c1,..|const:v|exp:rate|digital:K|occupation)");
}

Payoff::Kind Payoff::kind() const {
  return std::visit(overloaded{[](const Polynomial&) { return Kind::polynomial; },
                               [](const Smooth&) { return Kind::smooth; },
                               [](const Digital&) { return Kind::digital; },
                               [](const OccupationTime&) { return Kind::occupation_time; }},
                    shape_);
}

std::vector<double> Payoff::polynomial_coefficients() const {
  if (auto p = std::get_if<Polynomial>(&shape_)) return p->coefficients;
  return {};
}

std::optional<std::size_t> Payoff::polynomial_degree() const {
  if (auto p = std::get_if<Polynomial>(&shape_)) return p->coefficients.size() - 1;
  return std::nullopt;
}

double Payoff::strike() const {
  if (auto d = std::get_if<Digital>(&shape_)) return d->strike;
  throw std::logic_error("strike() on a non-digital payoff");
}

double Payoff::terminal_value(double w) const {
  return std::visit(overloaded{[&](const Polynomial& p) { return horner(p.coefficients, w); },
                               [&](const Smooth& s) { return s.value(w); },
                               [&](const Digital& d) { return w >= d.strike ? 1.0 : 0.0; },
                               [](const OccupationTime&) -> double {
                                 throw std::logic_error("occupation time is not a terminal payoff");
                               }},
                    shape_);
}

double Payoff::smoothed_value(double w, double tau) const {
  if (tau < 0.0) throw std::invalid_argument("smoothed_value: negative residual variance");
  const double sd = std::sqrt(tau);
  return std::visit(
      overloaded{[&](const Polynomial& p) {
                   const auto& rule = cached_gauss_hermite_rule(p.coefficients.size() / 2 + 1);
                   return rule.integrate([&](double z) { return horner(p.coefficients, w + sd * z); });
                 },
                 [&](const Smooth& s) {
                   const auto& rule = cached_gauss_hermite_rule(kSmoothingQuadratureOrder);
                   return rule.integrate([&](double z) { return s.value(w + sd * z); });
                 },
                 [&](const Digital& d) {
                   if (tau == 0.0) return w >= d.strike ? 1.0 : 0.0;
                   return normal_sf((d.strike - w) / sd);
                 },
                 [](const OccupationTime&) -> double {
                   throw std::logic_error("occupation time is not a terminal payoff");
                 }},
      shape_);
}

double Payoff::smoothed_delta(double w, double tau) const {
  if (!(tau > 0.0)) throw std::invalid_argument("smoothed_delta: residual variance must be positive");
  const double sd = std::sqrt(tau);
  return std::visit(
      overloaded{[&](const Polynomial& p) {
                   std::vector<double> dp;
                   for (std::size_t k = 1; k < p.coefficients.size(); ++k)
                     dp.push_back(static_cast<double>(k) * p.coefficients[k]);
                   const auto& rule = cached_gauss_hermite_rule(p.coefficients.size() / 2 + 1);
                   return rule.integrate([&](double z) { return horner(dp, w + sd * z); });
                 },
                 [&](const Smooth& s) {
                   const auto& rule = cached_gauss_hermite_rule(kSmoothingQuadratureOrder);
                   return rule.integrate([&](double z) { return s.derivative(w + sd * z); });
                 },
                 [&](const Digital& d) { return normal_pdf((d.strike - w) / sd) / sd; },
                 [](const OccupationTime&) -> double {
                   throw std::logic_error("occupation time has no terminal delta");
                 }},
      shape_);
}

double Payoff::path_value(std::span<const double> xi, const GridSpec& grid) const {
  if (xi.size() != grid.steps) throw std::invalid_argument("path_value: path length does not match grid");
  const double scale = std::sqrt(grid.step_variance());
  if (kind() == Kind::occupation_time) {
    double w = 0.0;
    std::size_t hits = 0;
    for (double z : xi) {
      w += scale * z;
      if (w >= 0.0) ++hits;
    }
    return static_cast<double>(hits) * grid.step_variance();
  }
  double sum = 0.0;
  for (double z : xi) sum += z;
  return terminal_value(scale * sum);
}

}  // namespace dco
