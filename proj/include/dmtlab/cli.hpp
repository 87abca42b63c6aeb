#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dmtlab {

struct RunConfig {
  std::string command;
  std::string net;
  std::string protocol;
  std::uint64_t seed = 42;
  std::uint64_t trials = 100000;
  std::vector<double> rho_db{10, 15, 20, 25, 30, 35};
  double r_grid = 0.01;
  std::vector<double> r{0.5};
  std::string out_dir;
  int relays = 1;
  int cycles = 1;
  /// Antennas at source, relay, destination (mimo-naf).
  std::vector<int> antennas{1, 1, 1};
  /// Slots per path for fd-linear; empty means T = inf.
  std::optional<int> slots;
  /// Fractions, or empty with optimize_fractions set.
  std::vector<std::string> fractions;
  bool optimize_fractions = false;
  std::string direct_curve;
  std::vector<std::string> relay_curves;
  std::string product_curve;
  bool colored = false;
  double rank_threshold = 1e-9;
  int gen_naf_resolution = 50;
  int gen_naf_refinements = 3;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInfeasible = 3;

/// Parses arguments and runs one subcommand. Reports go to `out`, errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dmtlab
