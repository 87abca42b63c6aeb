#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "dmtlab/cli.hpp"
#include "dmtlab/io.hpp"

using namespace dmtlab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dmtlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string net(const std::string& name) { return std::string(DMTLAB_NETWORKS_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("dmtlab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("analyze") {
  auto fig = cli({"analyze", "--net", net("mincut_multiple_antennas")});
  CHECK(fig.code == kExitOk);
  CHECK(contains(fig.out, "d_max = 12"));
  CHECK(contains(fig.out, "r_max = 2"));
  CHECK(contains(fig.out, "| multiple | FD | 12 | 2 |"));

  auto one = cli({"analyze", "--net", net("single_link")});
  CHECK(contains(one.out, "d_max = 1\n"));
  CHECK(contains(one.out, "r_max = 1\n"));

  auto cut = cli({"analyze", "--net", net("disconnected")});
  CHECK(cut.code == kExitOk);
  CHECK(contains(cut.out, "disconnected"));

  auto dir = scratch("analyze");
  CHECK(cli({"analyze", "--net", net("mincut_multiple_antennas"), "--out", dir.string()}).code == kExitOk);
  auto report = Json::parse(read_file((dir / "analyze.json").string()));
  CHECK(report["min_cut"] == 12);
  CHECK(report["mmg"]["mmg"] == 2);
  CHECK(report["mmg"]["cuts"].size() == 4);
}

TEST_CASE("dmt curves") {
  auto naf = cli({"dmt", "--protocol", "naf", "--r-grid", "0.25"});
  CHECK(naf.code == kExitOk);
  CHECK(contains(naf.out, "# seed 42\nr,d\n0,2\n0.25,1.25\n0.5,0.5\n0.75,0.25\n1,0\n"));

  auto dir = scratch("dmt");
  CHECK(cli({"dmt", "--protocol", "naf", "--out", dir.string()}).code == kExitOk);
  auto j = Json::parse(read_file((dir / "naf.json").string()));
  auto bp = j["curve"]["breakpoints"];
  REQUIRE(bp.size() == 3);
  CHECK(bp[0]["d_exact"] == "2");
  CHECK(bp[1]["r_exact"] == "1/2");
  CHECK(bp[1]["d_exact"] == "1/2");
  CHECK(bp[2]["r_exact"] == "1");

  auto saf = cli({"dmt", "--protocol", "saf", "--relays", "2", "--cycles", "2", "--r-grid", "0.2"});
  CHECK(contains(saf.out, "\n0,3\n"));
  CHECK(contains(saf.out, "\n0.8,0.2\n"));

  auto fd = cli({"dmt", "--protocol", "fd-linear", "--net", net("two_paths"), "--slots", "inf", "--r-grid", "0.5"});
  CHECK(fd.code == kExitOk);
  CHECK(contains(fd.out, "r,d\n0,2\n0.5,1\n1,0\n"));

  auto finite = cli({"dmt", "--protocol", "fd-linear", "--net", net("two_paths"), "--slots", "7", "--r-grid", "1"});
  // M = 2, T = 7, D = 3: 2 (1 - 7r/4)^+.
  CHECK(contains(finite.out, "0,2\n0.571428571429,0\n"));

  auto ed = cli({"dmt", "--protocol", "edge-disjoint", "--net", net("diamond"), "--r-grid", "1"});
  CHECK(contains(ed.out, "0,2\n0.5,0\n"));
  CHECK(cli({"dmt", "--protocol", "naf-n", "--relays", "3"}).code == kExitOk);
  CHECK(cli({"dmt", "--protocol", "mimo-naf", "--antennas", "2,1,2"}).code == kExitOk);
  CHECK(cli({"dmt", "--protocol", "gen-naf", "--relays", "2", "--fractions", "1/4,3/4"}).code == kExitOk);
  CHECK(cli({"dmt", "--protocol", "gen-naf", "--relays", "2", "--fractions", "optimize", "--resolution", "8"}).code ==
        kExitOk);
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == kExitInput);
  CHECK(cli({"dmt", "--bogus"}).code == kExitInput);
  CHECK(cli({"dmt", "--protocol", "nope"}).code == kExitInput);
  CHECK(cli({"analyze", "--net", "/nonexistent/net.json"}).code == kExitInput);
  CHECK(cli({"dmt", "--protocol", "fd-linear", "--net", net("naf")}).code == kExitInput);
  CHECK(cli({"dmt", "--protocol", "fd-linear", "--net", net("two_paths"), "--slots", "3"}).code == kExitInput);
  CHECK(cli({"dmt", "--protocol", "edge-disjoint", "--net", net("disconnected")}).code == kExitInfeasible);
  CHECK(cli({"dmt", "--protocol", "gen-naf", "--relays", "2", "--fractions", "1/2,1/3"}).code == kExitInput);
  CHECK(cli({"simulate", "--protocol", "scalar", "--trials", "0"}).code == kExitInput);

  auto dir = scratch("exit");
  auto bad = (dir / "bad.json").string();
  write_file(bad, "{\"nodes\": [");
  CHECK(cli({"analyze", "--net", bad}).code == kExitInput);
  auto cyc = (dir / "cycle_shortcut.json").string();
  write_file(cyc, R"({"nodes":[{"id":"s","role":"source"},{"id":"a"},{"id":"b"},{"id":"x"},{"id":"t","role":"sink"}],
    "edges":[{"from":"s","to":"a"},{"from":"s","to":"x"},{"from":"x","to":"a"},{"from":"a","to":"t"},
             {"from":"a","to":"b"},{"from":"b","to":"t"},{"from":"b","to":"x"}]})");
  auto r = cli({"dmt", "--protocol", "fd-linear", "--net", cyc, "--slots", "8"});
  CHECK(r.code == kExitInfeasible);
  CHECK(contains(r.err, "shortcut"));
}

TEST_CASE("simulate output is reproducible") {
  auto a = scratch("sim_a");
  auto b = scratch("sim_b");
  std::vector<std::string> args{"simulate", "--protocol", "naf", "--r", "0.3", "--trials", "20000", "--rho-db", "0,5,10"};
  auto with = [&](const fs::path& dir) {
    auto v = args;
    v.push_back("--out");
    v.push_back(dir.string());
    return v;
  };
  setenv("DMTLAB_THREADS", "1", 1);
  CHECK(cli(with(a)).code == kExitOk);
  setenv("DMTLAB_THREADS", "3", 1);
  CHECK(cli(with(b)).code == kExitOk);
  unsetenv("DMTLAB_THREADS");
  for (const char* f : {"simulate_naf_r0.3.json", "simulate_naf_r0.3.csv", "simulate_naf_r0.3.gp"})
    CHECK(read_file((a / f).string()) == read_file((b / f).string()));
  auto csv = read_file((a / "simulate_naf_r0.3.csv").string());
  CHECK(csv.rfind("# seed 42\n", 0) == 0);
  auto j = Json::parse(read_file((a / "simulate_naf_r0.3.json").string()));
  CHECK(j["seed"] == 42);
  CHECK(j["p_out"].size() == 3);

  auto d1 = scratch("det_a");
  auto d2 = scratch("det_b");
  CHECK(cli({"detnet", "--net", net("mincut_multiple_antennas"), "--out", d1.string()}).code == kExitOk);
  CHECK(cli({"detnet", "--net", net("mincut_multiple_antennas"), "--out", d2.string()}).code == kExitOk);
  CHECK(read_file((d1 / "detnet.json").string()) == read_file((d2 / "detnet.json").string()));
  auto det = Json::parse(read_file((d1 / "detnet.json").string()));
  CHECK(det["lift"]["ok"] == true);
  CHECK(det["det_min_cut_rank"]["min_cut_rank"] >= 2);
}

TEST_CASE("config file with flag precedence") {
  auto dir = scratch("config");
  auto cfg = (dir / "run.ini").string();
  write_file(cfg, "[simulate]\nprotocol = scalar\ntrials = 5000\nseed = 9\n");
  auto a = scratch("config_a");
  auto b = scratch("config_b");
  CHECK(cli({"--config", cfg, "simulate", "--r", "0.5", "--rho-db", "0,5,10", "--out", a.string()}).code == kExitOk);
  CHECK(cli({"--config", cfg, "simulate", "--r", "0.5", "--rho-db", "0,5,10", "--seed", "10", "--out", b.string()}).code ==
        kExitOk);
  auto ja = Json::parse(read_file((a / "simulate_scalar_r0.5.json").string()));
  auto jb = Json::parse(read_file((b / "simulate_scalar_r0.5.json").string()));
  CHECK(ja["seed"] == 9);
  CHECK(jb["seed"] == 10);
  CHECK(ja["trials"][0] == 5000);
}
