#include "dmtlab/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dmtlab/det_lift.hpp"
#include "dmtlab/error.hpp"
#include "dmtlab/extreme_points.hpp"
#include "dmtlab/io.hpp"
#include "dmtlab/monte_carlo.hpp"
#include "dmtlab/protocols.hpp"

namespace dmtlab {

namespace {

struct Output {
  const RunConfig& cfg;
  std::ostream& out;

  // Writes `text` to out_dir/name, or to the terminal when no directory is set.
  void emit(const std::string& name, const std::string& text) const {
    if (cfg.out_dir.empty()) {
      out << text;
      if (!text.empty() && text.back() != '\n') out << '\n';
      return;
    }
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = (std::filesystem::path(cfg.out_dir) / name).string();
    write_file(path, text);
    out << "wrote " << path << '\n';
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

NetworkGraph require_net(const RunConfig& cfg) {
  if (cfg.net.empty()) throw InputError("--net FILE is required for this command");
  return load_network(cfg.net);
}

std::string path_text(const NetworkGraph& net, const Path& p) {
  std::string s;
  for (NodeIndex v : p.nodes(net)) s += (s.empty() ? "" : "->") + net.node(v).id;
  return s;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const auto net = require_net(cfg);
  const Terminals t = default_terminals(net);
  StructuralRankOptions sr;
  sr.seed = cfg.seed;
  const MinCut mc = min_cut_edges(net, t);
  const auto paths = edge_disjoint_paths(net, t);
  const MmgReport m = mmg(net, t, sr);
  const auto bound = cutset_bound(net, t, sr);
  const bool acyclic = network_is_acyclic(net);

  Json path_list = Json::array();
  bool any_shortcut = false;
  for (const auto& p : paths) {
    bool sc = path_has_shortcut(net, p);
    any_shortcut = any_shortcut || sc;
    path_list.push_back({{"nodes", path_text(net, p)}, {"edges", p.edges}, {"shortcut", sc}});
  }
  std::string fd_linear;
  if (mc.disconnected()) fd_linear = "not applicable (disconnected)";
  else if (!net.single_antenna() || !net.all_full_duplex()) fd_linear = "not applicable (needs single-antenna full-duplex nodes)";
  else if (acyclic) fd_linear = "applicable (no directed cycles)";
  else if (!any_shortcut) fd_linear = "applicable (edge-disjoint paths without shortcuts)";
  else fd_linear = "infeasible (directed cycle and shortcut)";

  int max_ant = net.max_antennas();
  Json summary{{"antennas", max_ant == 1 ? "single" : "multiple"},
               {"duplex", net.all_full_duplex() ? "FD" : "HD"},
               {"d_max", mc.edges},
               {"r_max", m.mmg},
               {"r_max_upper_bound_only", !net.all_full_duplex()}};
  Json report{{"seed", cfg.seed},
              {"nodes", net.node_count()},
              {"edges", net.edge_count()},
              {"disconnected", mc.disconnected()},
              {"min_cut", mc.edges},
              {"edge_disjoint_paths", path_list},
              {"mmg", to_json(m, net)},
              {"acyclic", acyclic},
              {"fd_linear", fd_linear},
              {"summary", summary}};
  if (bound.curve) report["cutset_curve"] = to_json(*bound.curve);
  else report["cutset_curve"] = nullptr;

  out << "network: " << net.node_count() << " nodes, " << net.edge_count() << " edges\n";
  if (mc.disconnected()) out << "diagnosis: disconnected (sink unreachable from source)\n";
  out << "diversity (min-cut) d_max = " << mc.edges << "\n";
  out << "MMG (min-cut structural rank) r_max = " << m.mmg
      << (net.all_full_duplex() ? "" : " (upper bound only: half-duplex nodes)") << "\n";
  out << "acyclic: " << (acyclic ? "yes" : "no") << "; fd-linear protocol: " << fd_linear << "\n";
  out << "| antennas | duplex | d_max | r_max |\n| " << summary["antennas"].get<std::string>() << " | "
      << summary["duplex"].get<std::string>() << " | " << mc.edges << " | " << m.mmg << " |\n";
  if (!cfg.out_dir.empty()) Output{cfg, out}.emit("analyze.json", dump(report));
  return kExitOk;
}

std::vector<Rational> parse_fractions(const std::vector<std::string>& items) {
  std::vector<Rational> f;
  for (const auto& s : items) f.push_back(parse_rational(s));
  return f;
}

int cmd_dmt(const RunConfig& cfg, std::ostream& out) {
  const Output o{cfg, out};
  const std::string& p = cfg.protocol;
  Json extra = Json::object();
  auto finish = [&](const auto& curve, const std::string& name) {
    o.emit(name + ".csv", curve_csv(curve, cfg.r_grid, cfg.seed));
    if (!cfg.out_dir.empty()) {
      Json j{{"seed", cfg.seed}, {"protocol", p}, {"curve", to_json(curve)}};
      for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
      o.emit(name + ".json", dump(j));
    }
    return kExitOk;
  };
  auto protocol_extra = [&](const ProtocolRun& run) {
    auto names = run.network.variable_names();
    extra["schedule"] = to_json(run.schedule);
    extra["channel"] = to_json(run.channel, names);
    if (!run.diagnosis.empty()) extra["diagnosis"] = run.diagnosis;
  };

  if (p == "naf") {
    auto run = naf_single();
    protocol_extra(run);
    return finish(run.bound, "naf");
  }
  if (p == "naf-n") return finish(naf_n_relay_bound(cfg.relays), "naf-n");
  if (p == "saf") {
    auto run = saf_matrix(cfg.relays, cfg.cycles);
    protocol_extra(run);
    return finish(run.bound, "saf");
  }
  if (p == "mimo-naf") {
    if (cfg.antennas.size() != 3) throw InputError("--antennas needs three counts: source,relay,destination");
    auto run = mimo_naf_channel(cfg.antennas[0], cfg.antennas[1], cfg.antennas[2]);
    protocol_extra(run);
    if (!cfg.product_curve.empty()) {
      auto c = mimo_naf(cfg.antennas[0], cfg.antennas[1], cfg.antennas[2], load_curve(cfg.product_curve));
      return finish(c, "mimo-naf");
    }
    return finish(run.bound, "mimo-naf");
  }
  if (p == "gen-naf") {
    DmtCurve<double> direct = cfg.direct_curve.empty() ? DmtCurve<double>::ramp(1.0, 1.0) : load_curve(cfg.direct_curve);
    std::vector<DmtCurve<double>> relays;
    for (const auto& f : cfg.relay_curves) relays.push_back(load_curve(f));
    if (relays.empty()) relays.assign(static_cast<std::size_t>(cfg.relays), DmtCurve<double>::ramp(1.0, 1.0));
    if (cfg.optimize_fractions) {
      GenNafOptions go;
      go.resolution = cfg.gen_naf_resolution;
      go.refinement_rounds = cfg.gen_naf_refinements;
      go.r_step = cfg.r_grid;
      auto opt = gen_naf_optimize(direct, relays, go);
      Json rows = Json::array();
      std::string csv = "# seed " + std::to_string(cfg.seed) + "\nr,d";
      for (std::size_t i = 0; i < relays.size(); ++i) csv += ",f" + std::to_string(i + 1);
      csv += "\n";
      for (std::size_t k = 0; k < opt.r.size(); ++k) {
        csv += format_number(opt.r[k]) + "," + format_number(opt.d[k]);
        for (double f : opt.fractions[k]) csv += "," + format_number(f);
        csv += "\n";
        rows.push_back({{"r", opt.r[k]}, {"d", opt.d[k]}, {"fractions", opt.fractions[k]}});
      }
      o.emit("gen-naf.csv", csv);
      if (!cfg.out_dir.empty())
        o.emit("gen-naf.json", dump(Json{{"seed", cfg.seed}, {"protocol", p}, {"optimum", rows}, {"curve", to_json(opt.curve)}}));
      return kExitOk;
    }
    std::vector<double> f;
    if (cfg.fractions.empty()) f.assign(relays.size(), 1.0 / static_cast<double>(relays.size()));
    for (const auto& r : parse_fractions(cfg.fractions)) f.push_back(to_double(r));
    extra["fractions"] = f;
    return finish(gen_naf_bound(direct, relays, f), "gen-naf");
  }
  if (p == "edge-disjoint") {
    auto run = edge_disjoint_protocol(require_net(cfg));
    protocol_extra(run);
    return finish(run.bound, "edge-disjoint");
  }
  if (p == "fd-linear") {
    auto run = fd_linear_protocol(require_net(cfg), cfg.slots.value_or(0));
    if (cfg.slots) {
      protocol_extra(run);
      extra["limit"] = to_json(*run.limit);
    }
    extra["diagnosis"] = run.diagnosis;
    return finish(run.bound, "fd-linear");
  }
  throw InputError("unknown protocol '" + p + "' (naf, naf-n, saf, mimo-naf, gen-naf, edge-disjoint, fd-linear)");
}

InducedChannel simulation_channel(const RunConfig& cfg) {
  const std::string& p = cfg.protocol;
  if (p == "scalar") return scalar_channel();
  if (p == "parallel") return parallel_channel(cfg.relays < 2 ? 2 : cfg.relays);
  if (p == "naf") return naf_single().channel;
  if (p == "saf") return saf_matrix(cfg.relays, cfg.cycles).channel;
  if (p == "mimo-naf") {
    if (cfg.antennas.size() != 3) throw InputError("--antennas needs three counts: source,relay,destination");
    return mimo_naf_channel(cfg.antennas[0], cfg.antennas[1], cfg.antennas[2]).channel;
  }
  if (p == "edge-disjoint") return edge_disjoint_protocol(require_net(cfg)).channel;
  if (p == "fd-linear") {
    if (!cfg.slots) throw InputError("simulate fd-linear needs a finite --slots T");
    return fd_linear_protocol(require_net(cfg), *cfg.slots).channel;
  }
  throw InputError("unknown protocol '" + p + "' (scalar, parallel, naf, saf, mimo-naf, edge-disjoint, fd-linear)");
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Output o{cfg, out};
  const auto ic = simulation_channel(cfg);
  OutageOptions opts;
  opts.seed = cfg.seed;
  opts.whiten = !cfg.colored;
  for (double r : cfg.r) {
    auto est = estimate_diversity(ic, r, cfg.rho_db, cfg.trials, opts);
    const std::string stem = "simulate_" + cfg.protocol + "_r" + format_number(r);
    out << cfg.protocol << " r = " << format_number(r) << ": ";
    if (est.fitted())
      out << "slope " << format_number(est.fit.slope) << " +/- " << format_number(est.fit.ci) << " (" << est.fit.points
          << " points)\n";
    else
      out << "too few outage events for a slope fit\n";
    o.emit(stem + ".csv", outage_csv(est));
    if (!cfg.out_dir.empty()) {
      o.emit(stem + ".json", dump(to_json(est)));
      o.emit(stem + ".gp", outage_gnuplot(stem + ".csv", est));
    }
  }
  return kExitOk;
}

int cmd_detnet(const RunConfig& cfg, std::ostream& out) {
  const auto net = require_net(cfg);
  DerivationOptions dopts;
  dopts.seed = cfg.seed;
  const auto derivation = derive_deterministic(net, dopts);
  const auto det_rank = det_min_cut_rank(derivation.det);
  LiftOptions lo;
  lo.rank_threshold = cfg.rank_threshold;
  const auto lift = lift_to_fading(derivation.det, net, lo);
  MmgReport m;
  m.cuts = derivation.cuts;
  m.mmg = m.cuts.empty() ? 0 : m.cuts.front().rank.rank;
  for (const auto& c : m.cuts) m.mmg = std::min(m.mmg, c.rank.rank);
  Json j{{"seed", cfg.seed},
         {"det_network", to_json(derivation.det)},
         {"attempts", derivation.attempts},
         {"mmg", to_json(m, net)},
         {"det_min_cut_rank", to_json(det_rank, net)},
         {"lift", to_json(lift, net)}};
  out << "prime p = " << derivation.det.p << ", q = " << derivation.det.q << "\n";
  out << "MMG = " << m.mmg << ", deterministic min-cut rank = " << det_rank.min_cut_rank
      << ", lifted rank = " << lift.achieved_rank << (lift.ok ? "" : " (lift check FAILED)")
      << (lift.ill_conditioned ? " (ill-conditioned)" : "") << "\n";
  Output{cfg, out}.emit("detnet.json", dump(j));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"dmtlab: DMT analysis of amplify-and-forward relay networks"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.require_subcommand(1);

  std::string slots_text;
  std::string fractions_text;
  std::string rho_text;
  std::string r_text;
  std::string antennas_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
    sub->add_option("--out", cfg.out_dir, "Output directory");
  };
  auto* analyze = app.add_subcommand("analyze", "Min-cut diversity, MMG and structural diagnosis of a network");
  analyze->add_option("--net", cfg.net, "Network JSON file")->required();
  common(analyze);

  auto protocol_opts = [&](CLI::App* sub) {
    sub->add_option("--protocol", cfg.protocol, "Protocol name")->required();
    sub->add_option("--net", cfg.net, "Network JSON file");
    sub->add_option("--relays", cfg.relays, "Relay count N (or parallel branches)")->capture_default_str();
    sub->add_option("--cycles", cfg.cycles, "SAF cycles k, M = kN + 1")->capture_default_str();
    sub->add_option("--antennas", antennas_text, "Antenna counts ns,nr,nd for mimo-naf");
    sub->add_option("--slots", slots_text, "Slots per path T for fd-linear, or inf");
  };

  auto* dmt = app.add_subcommand("dmt", "Analytic DMT curve of a protocol");
  protocol_opts(dmt);
  dmt->add_option("--r-grid", cfg.r_grid, "Export grid step")->capture_default_str();
  dmt->add_option("--fractions", fractions_text, "Activation fractions (comma list) or optimize");
  dmt->add_option("--direct-curve", cfg.direct_curve, "gen-naf direct-link curve JSON");
  dmt->add_option("--relay-curve", cfg.relay_curves, "gen-naf relay product curve JSON (repeatable)");
  dmt->add_option("--product-curve", cfg.product_curve, "mimo-naf product-channel curve JSON");
  dmt->add_option("--resolution", cfg.gen_naf_resolution, "Fraction simplex resolution")->capture_default_str();
  dmt->add_option("--refinements", cfg.gen_naf_refinements, "Refinement rounds")->capture_default_str();
  common(dmt);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo outage probability and diversity slope");
  protocol_opts(simulate);
  simulate->add_option("--r", r_text, "Multiplexing gains (comma list)");
  simulate->add_option("--rho-db", rho_text, "SNR ladder in dB (comma list)");
  simulate->add_option("--trials", cfg.trials, "Trials per SNR point")->capture_default_str();
  simulate->add_flag("--colored", cfg.colored, "Treat the relay noise as white (no whitening)");
  common(simulate);

  auto* detnet = app.add_subcommand("detnet", "Derived finite-field network, cut ranks and lift");
  detnet->add_option("--net", cfg.net, "Network JSON file")->required();
  detnet->add_option("--rank-threshold", cfg.rank_threshold, "Relative singular value threshold")
      ->capture_default_str();
  common(detnet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    auto split = [](const std::string& s) {
      std::vector<std::string> items;
      std::stringstream ss(s);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) items.push_back(item);
      return items;
    };
    auto to_doubles = [&](const std::string& s) {
      std::vector<double> v;
      for (const auto& item : split(s)) v.push_back(to_double(parse_rational(item)));
      return v;
    };
    if (!rho_text.empty()) cfg.rho_db = to_doubles(rho_text);
    if (!r_text.empty()) cfg.r = to_doubles(r_text);
    if (!antennas_text.empty()) {
      cfg.antennas.clear();
      for (const auto& item : split(antennas_text)) cfg.antennas.push_back(std::stoi(item));
    }
    if (fractions_text == "optimize") cfg.optimize_fractions = true;
    else if (!fractions_text.empty()) cfg.fractions = split(fractions_text);
    if (!slots_text.empty() && slots_text != "inf") {
      cfg.slots = std::stoi(slots_text);
      if (*cfg.slots < 1) throw InputError("--slots must be positive or inf");
    }
    if (cfg.trials < 1) throw InputError("--trials must be positive");
    if (!(cfg.r_grid > 0)) throw InputError("--r-grid must be positive");
    if (cfg.relays < 1 || cfg.cycles < 1) throw InputError("--relays and --cycles must be positive");

    if (analyze->parsed()) return cmd_analyze(cfg, out);
    if (dmt->parsed()) return cmd_dmt(cfg, out);
    if (simulate->parsed()) return cmd_simulate(cfg, out);
    return cmd_detnet(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace dmtlab
