#include "dmtlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dmtlab/error.hpp"

namespace dmtlab {

Rational parse_rational(const std::string& text) {
  auto fail = [&]() -> Rational { throw InputError("not a rational number: '" + text + "'"); };
  if (text.empty()) return fail();
  auto parse_int = [&](const std::string& s) -> std::int64_t {
    if (s.empty()) fail();
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) fail();
    for (std::size_t k = i; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') fail();
    try {
      return std::stoll(s);
    } catch (const std::out_of_range&) {
      fail();
    }
    return 0;
  };
  if (auto slash = text.find('/'); slash != std::string::npos) {
    std::int64_t den = parse_int(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + text + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15) return fail();
    bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    for (char c : frac)
      if (c < '0' || c > '9') return fail();
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational r(parse_int(whole));
    Rational f(std::stoll(frac), scale);
    return negative ? r - f : r + f;
  }
  return Rational(parse_int(text));
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

namespace {

Role parse_role(const std::string& s) {
  if (s == "source") return Role::Source;
  if (s == "relay") return Role::Relay;
  if (s == "sink") return Role::Sink;
  throw InputError("network: unknown role '" + s + "'");
}

Duplex parse_duplex(const std::string& s) {
  if (s == "full") return Duplex::Full;
  if (s == "half") return Duplex::Half;
  throw InputError("network: unknown duplex mode '" + s + "'");
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Source: return "source";
    case Role::Sink: return "sink";
    default: return "relay";
  }
}

Json cut_members(const Cut& c, const NetworkGraph& net) {
  Json j = Json::array();
  for (NodeIndex v : c.source_nodes()) j.push_back(net.node(v).id);
  return j;
}

}  // namespace

NetworkGraph network_from_json(const Json& j) {
  try {
    std::vector<SuperNode> nodes;
    for (const auto& n : j.at("nodes")) {
      SuperNode s;
      s.id = n.at("id").get<std::string>();
      s.antennas = n.value("antennas", 1);
      s.role = parse_role(n.value("role", std::string("relay")));
      s.duplex = parse_duplex(n.value("duplex", std::string("full")));
      nodes.push_back(std::move(s));
    }
    auto index = [&](const std::string& id) -> NodeIndex {
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<NodeIndex>(i);
      throw InputError("network: edge refers to unknown node '" + id + "'");
    };
    auto ref = [&](const Json& e) {
      if (e.is_string()) return AntennaRef{index(e.get<std::string>()), 0};
      return AntennaRef{index(e.at(0).get<std::string>()), e.at(1).get<int>()};
    };
    std::vector<EdgeSpec> edges;
    if (j.contains("edges"))
      for (const auto& e : j.at("edges")) {
        EdgeSpec spec{ref(e.at("from")), ref(e.at("to")), e.value("label", std::string())};
        edges.push_back(spec);
        if (e.value("bidirectional", false)) {
          EdgeSpec back{spec.to, spec.from, spec.label.empty() ? "" : spec.label + "'"};
          edges.push_back(back);
        }
      }
    return NetworkGraph(std::move(nodes), edges);
  } catch (const Json::exception& ex) {
    throw InputError(std::string("network: malformed JSON: ") + ex.what());
  }
}

NetworkGraph load_network(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& ex) {
    throw InputError("'" + path + "': " + ex.what());
  }
  return network_from_json(j);
}

Json to_json(const NetworkGraph& net) {
  Json j;
  j["nodes"] = Json::array();
  for (const auto& n : net.nodes())
    j["nodes"].push_back({{"id", n.id},
                          {"antennas", n.antennas},
                          {"role", role_name(n.role)},
                          {"duplex", n.duplex == Duplex::Full ? "full" : "half"}});
  j["edges"] = Json::array();
  for (const auto& e : net.edges())
    j["edges"].push_back({{"id", e.id},
                          {"from", {net.node(e.from.node).id, e.from.antenna}},
                          {"to", {net.node(e.to.node).id, e.to.antenna}},
                          {"label", e.label}});
  return j;
}

Json to_json(const DmtCurve<Rational>& c) {
  Json pts = Json::array();
  for (const auto& p : c.breakpoints())
    pts.push_back({{"r", to_double(p.r)}, {"d", to_double(p.d)}, {"r_exact", to_string(p.r)}, {"d_exact", to_string(p.d)}});
  return Json{{"breakpoints", pts}};
}

Json to_json(const DmtCurve<double>& c) {
  Json pts = Json::array();
  for (const auto& p : c.breakpoints()) pts.push_back({{"r", p.r}, {"d", p.d}});
  return Json{{"breakpoints", pts}};
}

namespace {

template <typename Scalar, typename Conv>
DmtCurve<Scalar> curve_from(const Json& j, Conv conv) {
  try {
    const Json& list = j.is_object() ? j.at("breakpoints") : j;
    if (!list.is_array()) throw InputError("curve: expected a list of breakpoints");
    std::vector<Breakpoint<Scalar>> pts;
    for (const auto& p : list) {
      if (p.is_array()) pts.push_back({conv(p.at(0)), conv(p.at(1))});
      else pts.push_back({conv(p.at("r")), conv(p.at("d"))});
    }
    return DmtCurve<Scalar>(std::move(pts));
  } catch (const Json::exception& ex) {
    throw InputError(std::string("curve: malformed JSON: ") + ex.what());
  }
}

}  // namespace

DmtCurve<double> curve_from_json(const Json& j) {
  return curve_from<double>(j, [](const Json& v) {
    if (v.is_string()) return to_double(parse_rational(v.get<std::string>()));
    return v.get<double>();
  });
}

DmtCurve<Rational> exact_curve_from_json(const Json& j) {
  return curve_from<Rational>(j, [](const Json& v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    return parse_rational(v.dump());
  });
}

DmtCurve<double> load_curve(const std::string& path) {
  try {
    return curve_from_json(Json::parse(read_file(path)));
  } catch (const Json::parse_error& ex) {
    throw InputError("'" + path + "': " + ex.what());
  }
}

Json to_json(const Polynomial& p, const std::vector<std::string>& names) {
  Json monos = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json vars = Json::array();
    for (const auto& [v, e] : m.powers())
      vars.push_back({{"var", v < names.size() ? names[v] : "x" + std::to_string(v)}, {"id", v}, {"exp", e}});
    monos.push_back({{"coef", c}, {"vars", vars}});
  }
  return monos;
}

Json to_json(const PolyMatrix& m, const std::vector<std::string>& names) {
  Json entries = Json::array();
  for (const auto& [rc, p] : m.entries())
    entries.push_back(
        {{"row", rc.first}, {"col", rc.second}, {"text", p.to_string(names)}, {"monomials", to_json(p, names)}});
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Json to_json(const Schedule& s) {
  Json slots = Json::array();
  for (int i = 0; i < s.total_slots(); ++i) {
    const Slot& slot = s.slots[static_cast<std::size_t>(i)];
    Json routes = Json::array();
    for (const auto& r : slot.routes)
      routes.push_back({{"node", r.node}, {"tx_antenna", r.tx_antenna}, {"rx_antenna", r.rx_antenna}});
    slots.push_back({{"slot", i + 1}, {"live", slot.live}, {"source_fresh", slot.source_fresh}, {"routes", routes}});
  }
  return Json{{"total_slots", s.total_slots()}, {"slots", slots}};
}

Json to_json(const InducedChannel& ic, const std::vector<std::string>& names) {
  Json rows = Json::array(), cols = Json::array(), noise = Json::array();
  for (const auto& o : ic.rows) rows.push_back({{"slot", o.slot + 1}, {"antenna", o.antenna}});
  for (const auto& e : ic.cols) cols.push_back({{"slot", e.slot + 1}, {"antenna", e.antenna}});
  for (std::size_t i = 0; i < ic.noise_transfers.size(); ++i)
    noise.push_back({{"relay", ic.noise_relays[i]}, {"matrix", to_json(ic.noise_transfers[i], names)}});
  return Json{{"total_slots", ic.total_slots},
              {"data_slots", ic.data_slots()},
              {"rows", rows},
              {"cols", cols},
              {"signal", to_json(ic.signal, names)},
              {"noise_transfers", noise}};
}

Json to_json(const DetNetwork& d) {
  Json xi = Json::object();
  for (std::size_t i = 0; i < d.xi.size(); ++i) xi[std::to_string(i)] = d.xi[i];
  return Json{{"p", d.p}, {"q", d.q}, {"xi", xi}};
}

Json to_json(const MmgReport& r, const NetworkGraph& net) {
  Json cuts = Json::array();
  for (const auto& c : r.cuts)
    cuts.push_back({{"source_side", cut_members(c.cut, net)},
                    {"crossing_edges", c.cut.crossing_edges},
                    {"pattern_rows", c.pattern.matrix.rows()},
                    {"pattern_cols", c.pattern.matrix.cols()},
                    {"rank", c.rank.rank}});
  return Json{{"mmg", r.mmg}, {"failure_bound", r.failure_bound}, {"cuts", cuts}};
}

Json to_json(const DetRankReport& r, const NetworkGraph& net) {
  Json cuts = Json::array();
  for (const auto& c : r.cuts) cuts.push_back({{"source_side", cut_members(c.cut, net)}, {"rank", c.rank}});
  return Json{{"min_cut_rank", r.min_cut_rank}, {"cuts", cuts}};
}

Json to_json(const LiftReport& r, const NetworkGraph& net) {
  Json assignment = Json::array();
  for (Eigen::Index i = 0; i < r.assignment.size(); ++i) assignment.push_back(r.assignment(i).real());
  Json cuts = Json::array();
  for (const auto& c : r.cuts)
    cuts.push_back({{"source_side", cut_members(c.cut, net)},
                    {"field_rank", c.field_rank},
                    {"numeric_rank", c.numeric_rank},
                    {"conditioning", c.conditioning}});
  return Json{{"assignment", assignment},
              {"achieved_rank", r.achieved_rank},
              {"ok", r.ok},
              {"ill_conditioned", r.ill_conditioned},
              {"cuts", cuts}};
}

Json to_json(const OutageEstimate& e) {
  Json rho = Json::array(), p = Json::array(), se = Json::array(), ev = Json::array(), tr = Json::array(),
       used = Json::array();
  for (std::size_t i = 0; i < e.points.size(); ++i) {
    rho.push_back(e.points[i].rho_db);
    p.push_back(e.points[i].p());
    se.push_back(e.points[i].std_error());
    ev.push_back(e.points[i].events);
    tr.push_back(e.points[i].trials);
    used.push_back(static_cast<bool>(e.used[i]));
  }
  Json j{{"seed", e.seed}, {"r", e.r}, {"whiten", e.whiten}, {"rho_db", rho}, {"p_out", p},
         {"stderr", se},   {"events", ev}, {"trials", tr}, {"used_in_fit", used}};
  if (e.fitted()) {
    j["slope"] = e.fit.slope;
    j["ci"] = e.fit.ci;
  } else {
    j["slope"] = nullptr;
    j["ci"] = nullptr;
  }
  j["fit_points"] = e.fit.points;
  return j;
}

std::string outage_csv(const OutageEstimate& e) {
  std::string out = "# seed " + std::to_string(e.seed) + "\nrho_db,p_out,stderr,events,trials\n";
  for (const auto& p : e.points)
    out += format_number(p.rho_db) + "," + format_number(p.p()) + "," + format_number(p.std_error()) + "," +
           std::to_string(p.events) + "," + std::to_string(p.trials) + "\n";
  return out;
}

std::string outage_gnuplot(const std::string& csv_name, const OutageEstimate& e) {
  std::ostringstream os;
  os << "# seed " << e.seed << "\n"
     << "set datafile separator ','\n"
     << "set logscale y\n"
     << "set xlabel 'SNR (dB)'\n"
     << "set ylabel 'outage probability'\n"
     << "set key bottom left\n";
  if (e.fitted()) {
    os << "fit_line(x) = exp(-(" << format_number(e.fit.intercept) << " + " << format_number(e.fit.slope)
       << " * x * log(10) / 10))\n"
       << "plot '" << csv_name << "' every ::1 using 1:2:3 with yerrorbars title 'r = " << format_number(e.r)
       << "', fit_line(x) title 'slope " << format_number(e.fit.slope) << "'\n";
  } else {
    os << "plot '" << csv_name << "' every ::1 using 1:2:3 with yerrorbars title 'r = " << format_number(e.r) << "'\n";
  }
  return os.str();
}

}  // namespace dmtlab
