#include "cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "dco/chaos.hpp"
#include "dco/clark_ocone.hpp"
#include "dco/csv.hpp"
#include "dco/montecarlo.hpp"
#include "dco/payoff.hpp"
#include "dco/rate_sweep.hpp"

namespace dco::cli {

namespace {

constexpr long long kMaxDegreeLimit = 100000;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& field : csv::split(text)) {
    std::size_t v = 0;
    const char* end = field.data() + field.size();
    auto [p, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || p != end) throw std::invalid_argument("--N1-list: '" + field + "' is not a count");
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + std::to_string(values[i]);
  return s;
}

std::vector<std::size_t> default_n1_list(const std::string& command) {
  if (command == "rate-sweep") return {4, 8, 16, 32, 64, 128, 256};
  if (command == "simulate-hedge") return {4, 8, 16, 32, 64};
  return {1};
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  };
  require(std::isfinite(c.horizon) && c.horizon > 0.0, "--T must be a positive finite number");
  require(c.n0 >= 1, "--N0 must be >= 1");
  require(!c.n1_list.empty(), "--N1-list is empty");
  for (std::size_t i = 0; i < c.n1_list.size(); ++i) {
    require(c.n1_list[i] >= 1, "--N1-list entries must be >= 1");
    require(i == 0 || c.n1_list[i] > c.n1_list[i - 1], "--N1-list must be strictly increasing");
  }
  require(c.max_degree >= 0 && c.max_degree <= kMaxDegreeLimit, "--max-degree must lie in [0, 100000]");
  require(c.order_n >= 1 && c.order_n <= kMaxDegreeLimit, "--order-n must be >= 1");
  require(std::isfinite(c.sobolev_s), "--sobolev-s must be finite");
  require(c.interp_r >= 0.0 && c.interp_r <= 1.0, "--interp-r must lie in [0, 1]");
  require(c.samples >= 1, "--samples must be >= 1");
  require(c.workers >= 1, "--workers must be >= 1");
  if (c.command == "expand" || c.command == "decompose")
    require(c.n1_list.size() == 1, "expand and decompose take a single --N1-list value");
  Payoff::parse(c.payoff);
}

ChaosExpansion expansion_for(const Payoff& payoff, const GridSpec& grid, unsigned max_degree) {
  return payoff.is_terminal() ? coeffs_terminal(payoff, grid, max_degree) : coeffs_occupation_time(grid, max_degree);
}

std::string cmd_expand(const RunConfig& c) {
  const Payoff payoff = Payoff::parse(c.payoff);
  const GridSpec grid{c.horizon, c.n0 * c.n1_list.front()};
  const auto max_degree = static_cast<unsigned>(c.max_degree);
  const ChaosExpansion f = expansion_for(payoff, grid, max_degree);
  std::ostringstream out;
  if (!payoff.is_terminal()) {
    write_expansion_csv(out, f);
    return out.str();
  }
  // Terminal payoffs list the refinement of every d_k, k <= degree, zeros included.
  const auto degree = payoff.polynomial_degree();
  const unsigned listed = degree ? std::min<unsigned>(max_degree, static_cast<unsigned>(*degree)) : max_degree;
  std::vector<MultiIndex> keys;
  for (unsigned k = 0; k <= listed; ++k)
    for (auto& a : enumerate_matching(MultiIndex{k}, 1, grid.steps)) keys.push_back(std::move(a));
  std::sort(keys.begin(), keys.end());
  out << "# grid T=" << csv::format_real(grid.horizon) << " N=" << grid.steps << '\n';
  out << "multiindex,coefficient\n";
  for (const auto& a : keys) out << csv::quote(a.to_string()) << ',' << csv::format_real(f.coefficient(a)) << '\n';
  return out.str();
}

std::string cmd_decompose(const RunConfig& c) {
  const Payoff payoff = Payoff::parse(c.payoff);
  const GridSpec grid{c.horizon, c.n0 * c.n1_list.front()};
  const auto d = decompose(expansion_for(payoff, grid, static_cast<unsigned>(c.max_degree)));
  std::ostringstream out;
  out << "# mean=" << csv::format_real(d.mean) << '\n';
  out << "ell,m,multiindex,coefficient\n";
  for (const auto& term : d.terms)
    for (const auto& [a, coefficient] : term.integrand.coefficients())
      out << term.ell << ',' << term.order << ',' << csv::quote(a.with_slot(term.ell, term.order).to_string()) << ','
          << csv::format_real(coefficient) << '\n';
  return out.str();
}

std::string cmd_verify_bound(const RunConfig& c, bool& all_hold) {
  const auto n = static_cast<unsigned>(c.order_n);
  std::vector<std::pair<std::string, ChaosExpansion>> cases;
  if (c.random_cases > 0) {
    for (std::size_t i = 0; i < c.random_cases; ++i)
      cases.emplace_back("random:" + std::to_string(i), random_expansion(c.seed, i, c.horizon));
  } else {
    const Payoff payoff = Payoff::parse(c.payoff);
    cases.emplace_back(payoff.id(),
                       expansion_for(payoff, GridSpec{c.horizon, c.n0}, static_cast<unsigned>(c.max_degree)));
  }
  std::ostringstream out;
  out << "payoff,n,N1,s,r,lhs,rhs,holds,slack\n";
  all_hold = true;
  for (const auto& [id, f] : cases) {
    for (std::size_t n1 : c.n1_list) {
      const BoundCheck check = verify_bound(f, n, n1, c.sobolev_s, c.interp_r);
      all_hold = all_hold && check.holds;
      out << csv::quote(id) << ',' << n << ',' << n1 << ',' << csv::format_real(c.sobolev_s) << ','
          << csv::format_real(c.interp_r) << ',' << csv::format_real(check.lhs) << ','
          << csv::format_real(check.rhs) << ',' << (check.holds ? "true" : "false") << ','
          << csv::format_real(check.slack) << '\n';
    }
  }
  return out.str();
}

std::string cmd_rate_sweep(const RunConfig& c, std::ostream& err) {
  const RateReport report = rate_sweep(Payoff::parse(c.payoff), static_cast<unsigned>(c.order_n), c.sobolev_s,
                                       c.interp_r, c.n1_list, c.n0, c.horizon, static_cast<unsigned>(c.max_degree));
  for (std::size_t n1 : report.excluded_from_fit) err << "rate-sweep: N1=" << n1 << " has zero error, not fitted\n";
  std::ostringstream out;
  write_rate_report_csv(out, report);
  return out.str();
}

std::string cmd_simulate_hedge(const RunConfig& c) {
  const Payoff payoff = Payoff::parse(c.payoff);
  std::vector<double> steps, estimates;
  std::ostringstream out;
  out << "N,l2_estimate,std_error\n";
  for (std::size_t n1 : c.n1_list) {
    const GridSpec grid{c.horizon, c.n0 * n1};
    const PathBatch batch = sample_paths(grid, c.samples, c.seed, c.workers);
    const McEstimate e = tracking_error_hedge(payoff, batch, c.workers);
    out << grid.steps << ',' << csv::format_real(e.estimate) << ',' << csv::format_real(e.std_error) << '\n';
    steps.push_back(static_cast<double>(grid.steps));
    estimates.push_back(e.estimate);
  }
  const auto slope = fit_log_log_slope(steps, estimates);
  out << "slope=" << csv::format_real(slope.value_or(std::numeric_limits<double>::quiet_NaN())) << '\n';
  return out.str();
}

void emit(const RunConfig& c, const std::string& body, std::ostream& out) {
  const std::string text = config_header(c) + body;
  if (c.out.empty() || c.out == "-") {
    out << text;
    return;
  }
  const std::filesystem::path target(c.out);
  std::filesystem::path staging = target;
  staging += ".partial";
  {
    std::ofstream file(staging, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) {
      std::error_code ignored;
      std::filesystem::remove(staging, ignored);
      throw Failure("cannot write " + staging.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(staging, target, ec);
  if (ec) {
    std::filesystem::remove(staging, ec);
    throw Failure("cannot move output into place at " + target.string());
  }
}

}  // namespace

std::string config_header(const RunConfig& c) {
  std::ostringstream h;
  h << "# command=" << c.command << '\n'
    << "# payoff=" << c.payoff << '\n'
    << "# T=" << csv::format_real(c.horizon) << '\n'
    << "# N0=" << c.n0 << '\n'
    << "# N1-list=" << join(c.n1_list) << '\n'
    << "# max-degree=" << c.max_degree << '\n'
    << "# order-n=" << c.order_n << '\n'
    << "# sobolev-s=" << csv::format_real(c.sobolev_s) << '\n'
    << "# interp-r=" << csv::format_real(c.interp_r) << '\n'
    << "# seed=" << c.seed << '\n'
    << "# samples=" << c.samples << '\n'
    << "# random-cases=" << c.random_cases << '\n';
  return h.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string n1_text;

  CLI::App app{"Discrete Clark-Ocone expansions, error bounds, rate sweeps and hedging simulations", "dco"};
  app.set_config("--config", "", "TOML/INI file with option=value lines; flags given on the command line win");
  app.require_subcommand(1);
  app.add_option("--payoff", c.payoff, "poly:c0,c1,..|const:v|exp:rate|digital:K|occupation")
      ->envname("DCO_PAYOFF")
      ->capture_default_str();
  app.add_option("--T", c.horizon, "Time horizon")->envname("DCO_T")->capture_default_str();
  app.add_option("--N0", c.n0, "Coarse grid steps")->envname("DCO_N0")->capture_default_str();
  app.add_option("--N1-list", n1_text, "Comma-separated refinement factors (grid N = N0*N1)")
      ->envname("DCO_N1_LIST");
  app.add_option("--max-degree", c.max_degree, "Chaos truncation degree")
      ->envname("DCO_MAX_DEGREE")
      ->capture_default_str();
  app.add_option("--order-n", c.order_n, "Decomposition order n")->envname("DCO_ORDER_N")->capture_default_str();
  app.add_option("--sobolev-s", c.sobolev_s, "Sobolev index s")->envname("DCO_SOBOLEV_S")->capture_default_str();
  app.add_option("--interp-r", c.interp_r, "Interpolation exponent r in [0, 1]")
      ->envname("DCO_INTERP_R")
      ->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed")->envname("DCO_SEED")->capture_default_str();
  app.add_option("--samples", c.samples, "Monte Carlo paths")->envname("DCO_SAMPLES")->capture_default_str();
  app.add_option("--random-cases", c.random_cases, "verify-bound: check this many random expansions instead")
      ->envname("DCO_RANDOM_CASES")
      ->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads")->envname("DCO_WORKERS")->capture_default_str();
  app.add_option("--out", c.out, "Output CSV path, '-' for stdout")->envname("DCO_OUT")->capture_default_str();

  for (const char* name : {"expand", "decompose", "verify-bound", "rate-sweep", "simulate-hedge"}) {
    app.add_subcommand(name)->fallthrough()->callback([&c, name] { c.command = name; });
  }
  app.get_subcommand("expand")->description("Chaos expansion CSV of a payoff on the grid N0*N1");
  app.get_subcommand("decompose")->description("Clark-Ocone integrand coefficients by slot and order");
  app.get_subcommand("verify-bound")->description("First-order error against its bound for each N1");
  app.get_subcommand("rate-sweep")->description("Exact error norms over N1 with a log-log slope");
  app.get_subcommand("simulate-hedge")->description("Monte Carlo first-order tracking error over N = N0*N1");

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dco: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    c.n1_list = n1_text.empty() ? default_n1_list(c.command) : parse_size_list(n1_text);
    validate(c);
  } catch (const std::exception& e) {
    err << "dco: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    bool all_hold = true;
    std::string body;
    if (c.command == "expand") body = cmd_expand(c);
    else if (c.command == "decompose") body = cmd_decompose(c);
    else if (c.command == "verify-bound") body = cmd_verify_bound(c, all_hold);
    else if (c.command == "rate-sweep") body = cmd_rate_sweep(c, err);
    else body = cmd_simulate_hedge(c);
    emit(c, body, out);
    if (!all_hold) {
      err << "dco: bound violated in at least one row\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "dco: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "dco: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace dco::cli
