#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "superres/cli_runner.hpp"

using namespace superres;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("superres_cli_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& cfg) {
  fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << cfg.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const fs::path& config, const fs::path& out, int threads = 1, bool with_seed = false,
        std::uint64_t seed = 0) {
  RunOptions opt;
  opt.config_path = config.string();
  opt.out_dir = out.string();
  opt.threads = threads;
  opt.seed_override = with_seed;
  opt.seed = seed;
  return run_experiment(opt);
}

}  // namespace

TEST_CASE("config hash is stable and content-sensitive") {
  CHECK(config_hash("abc") == config_hash("abc"));
  CHECK(config_hash("abc") != config_hash("abd"));
  CHECK(config_hash("") != config_hash("x"));
}

TEST_CASE("analyze experiment writes the expected report") {
  fs::path dir = fresh_dir("analyze");
  json cfg = {{"experiment", "analyze"},
              {"protocol", {{"family", "free"}, {"kappa", 2}, {"omega_c", 1.0}}},
              {"g", 0.1},
              {"delta_omega", 0.01},
              {"delta", 0.1},
              {"p_fail", 0.05}};
  fs::path cp = write_config(dir, cfg);
  CHECK(run(cp, dir) == kExitOk);

  json out = json::parse(slurp(dir / "analyze.json"));
  CHECK(out.at("is_superres").get<bool>());
  CHECK(out.at("fi_limit").get<double>() == doctest::Approx(3.15827).epsilon(1e-4));
  CHECK(out.at("budget").at("n_shots").get<long long>() == 316629);

  json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("tool").get<std::string>() == std::string(kToolVersion));
  CHECK(summary.contains("config_hash"));
}

TEST_CASE("config errors exit with code 2") {
  fs::path dir = fresh_dir("badcfg");

  RunOptions missing;
  missing.config_path = (dir / "nope.json").string();
  missing.out_dir = dir.string();
  CHECK(run_experiment(missing) == kExitConfigError);

  json unknown = {{"experiment", "frobnicate"}};
  CHECK(run(write_config(dir, unknown), dir) == kExitConfigError);

  json incomplete = {{"experiment", "analyze"}};  // no protocol
  CHECK(run(write_config(dir, incomplete), dir) == kExitConfigError);

  json badnoise = {{"experiment", "analyze"},
                   {"protocol", {{"family", "free"}, {"kappa", 2}}},
                   {"noise", {{"kind", "pink"}}}};
  CHECK(run(write_config(dir, badnoise), dir) == kExitConfigError);
}

TEST_CASE("subcommand must match the config experiment kind") {
  fs::path dir = fresh_dir("mismatch");
  json cfg = {{"experiment", "analyze"},
              {"protocol", {{"family", "free"}, {"kappa", 2}}}};
  fs::path cp = write_config(dir, cfg);
  std::string cps = cp.string(), outs = dir.string();

  const char* bad[] = {"superres", "filterfn", "--config", cps.c_str(), "--out", outs.c_str()};
  CHECK(run_cli(6, bad) == kExitConfigError);

  const char* good[] = {"superres", "analyze", "--config", cps.c_str(), "--out", outs.c_str()};
  CHECK(run_cli(6, good) == kExitOk);
}

TEST_CASE("filterfn runs are byte-identical across reruns") {
  json cfg = {{"experiment", "filterfn"},
              {"protocols",
               json::array({{{"family", "free"}, {"kappa", 2}, {"name", "fe"}},
                            {{"family", "cpmg"}, {"kappa", 2}, {"name", "cp"}}})},
              {"omega_grid", {{"min", 0.5}, {"max", 1.5}, {"n", 64}}}};
  fs::path d1 = fresh_dir("ff1");
  fs::path d2 = fresh_dir("ff2");
  CHECK(run(write_config(d1, cfg), d1) == kExitOk);
  CHECK(run(write_config(d2, cfg), d2) == kExitOk);
  CHECK(slurp(d1 / "filterfn.csv") == slurp(d2 / "filterfn.csv"));

  std::string body = slurp(d1 / "filterfn.csv");
  CHECK(body.find("# superres 1.0.0") == 0);
  CHECK(body.find("# config-hash:") != std::string::npos);
  CHECK(body.find("protocol,omega,f,df,d2f") != std::string::npos);
}

TEST_CASE("mc-rmse output is independent of the thread count") {
  json cfg = {{"experiment", "mc-rmse"},
              {"g", 0.1},
              {"delta", 0.1},
              {"n_repeats", 20},
              {"grid", {{"min", 3e-3}, {"max", 1e-2}, {"n", 2}}},
              {"curves",
               json::array({{{"name", "fe_sr"},
                             {"protocol", {{"family", "free"}, {"kappa", 2}}},
                             {"budget_rule", "n_free"}}})}};
  fs::path d1 = fresh_dir("mc1");
  fs::path d2 = fresh_dir("mc2");
  CHECK(run(write_config(d1, cfg), d1, 1) == kExitOk);
  CHECK(run(write_config(d2, cfg), d2, 4) == kExitOk);
  CHECK(slurp(d1 / "mc_rmse.csv") == slurp(d2 / "mc_rmse.csv"));

  // A different seed changes the data.
  fs::path d3 = fresh_dir("mc3");
  CHECK(run(write_config(d3, cfg), d3, 1, true, 999) == kExitOk);
  CHECK(slurp(d3 / "mc_rmse.csv") != slurp(d1 / "mc_rmse.csv"));
}

TEST_CASE("qns comb experiment emits the comb filter table") {
  json cfg = {{"experiment", "qns-comb"},
              {"m_teeth_list", {1, 2}},
              {"duration", 8.0},
              {"omega_grid", {{"min", 0.2}, {"max", 2.0}, {"n", 32}}}};
  fs::path dir = fresh_dir("qns");
  CHECK(run(write_config(dir, cfg), dir) == kExitOk);
  std::string body = slurp(dir / "qns_comb.csv");
  CHECK(body.find("m_teeth,omega,f,f_closed") != std::string::npos);

  // Data rows exist for both comb sizes.
  CHECK(body.find("\n1,") != std::string::npos);
  CHECK(body.find("\n2,") != std::string::npos);
}

TEST_CASE("entangle experiment reports quadratic information scaling") {
  json cfg = {{"experiment", "entangle"},
              {"protocol", {{"family", "free"}, {"kappa", 2}}},
              {"g", 0.1},
              {"delta", 0.1},
              {"delta_omega", 1e-3},
              {"ne_list", {1, 2, 4}}};
  fs::path dir = fresh_dir("ent");
  CHECK(run(write_config(dir, cfg), dir) == kExitOk);

  std::ifstream in(dir / "entangle.csv");
  std::string line;
  std::vector<double> fi;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    fi.push_back(std::stod(cell));
  }
  REQUIRE(fi.size() == 3);
  CHECK(fi[1] / fi[0] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(fi[2] / fi[0] == doctest::Approx(16.0).epsilon(1e-9));
}
