#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dco::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitInvalid = 2;

/// Fully resolved parameters of one run.
struct RunConfig {
  std::string command;
  std::string payoff = "digital:0";
  double horizon = 1.0;
  std::size_t n0 = 1;
  std::vector<std::size_t> n1_list;
  long long max_degree = 20;
  long long order_n = 1;
  double sobolev_s = 0.0;
  double interp_r = 1.0;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  std::size_t random_cases = 0;
  unsigned workers = 1;
  std::string out = "-";
};

/// "# key=value" lines for every parameter that affects results.
/// Worker count and output path are left out so outputs compare byte for byte.
std::string config_header(const RunConfig& config);

/// Parses `args` (program name first) and runs the subcommand.
/// CSV goes to --out, or to `out` when --out is "-"; diagnostics go to `err`.
/// Flags override the --config file, which overrides DCO_* environment variables.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dco::cli
