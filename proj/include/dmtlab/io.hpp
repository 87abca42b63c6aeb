#pragma once

// JSON and CSV formats for networks, curves, protocol outputs and
// simulation results.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmtlab/det_lift.hpp"
#include "dmtlab/dmt_curve.hpp"
#include "dmtlab/extreme_points.hpp"
#include "dmtlab/monte_carlo.hpp"
#include "dmtlab/network.hpp"
#include "dmtlab/protocols.hpp"

namespace dmtlab {

using Json = nlohmann::ordered_json;

NetworkGraph network_from_json(const Json& j);
NetworkGraph load_network(const std::string& path);
Json to_json(const NetworkGraph& net);

/// 12 significant digits, shortest form.
std::string format_number(double x);

Json to_json(const DmtCurve<Rational>& c);
Json to_json(const DmtCurve<double>& c);
/// Accepts [[r, d], ...] or {"breakpoints": [{"r": .., "d": ..}, ...]};
/// numbers or "p/q" strings.
DmtCurve<double> curve_from_json(const Json& j);
DmtCurve<Rational> exact_curve_from_json(const Json& j);
DmtCurve<double> load_curve(const std::string& path);

/// "# seed N" header, then "r,d" rows over the export grid.
template <typename Scalar>
std::string curve_csv(const DmtCurve<Scalar>& c, double step, std::uint64_t seed) {
  std::string out = "# seed " + std::to_string(seed) + "\nr,d\n";
  for (const auto& [r, d] : sample_curve(c, step)) out += format_number(r) + "," + format_number(d) + "\n";
  return out;
}

Json to_json(const Polynomial& p, const std::vector<std::string>& names);
Json to_json(const PolyMatrix& m, const std::vector<std::string>& names);
Json to_json(const Schedule& s);
Json to_json(const InducedChannel& ic, const std::vector<std::string>& names);
Json to_json(const DetNetwork& d);
Json to_json(const MmgReport& r, const NetworkGraph& net);
Json to_json(const DetRankReport& r, const NetworkGraph& net);
Json to_json(const LiftReport& r, const NetworkGraph& net);
Json to_json(const OutageEstimate& e);

std::string outage_csv(const OutageEstimate& e);
/// Gnuplot script plotting the CSV written next to it on log-log axes.
std::string outage_gnuplot(const std::string& csv_name, const OutageEstimate& e);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace dmtlab
