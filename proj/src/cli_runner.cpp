#include "superres/cli_runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "superres/classical_baseline.hpp"
#include "superres/control_optimizer.hpp"
#include "superres/estimation.hpp"
#include "superres/filter_functions.hpp"
#include "superres/monte_carlo.hpp"
#include "superres/protocols.hpp"
#include "superres/rng.hpp"
#include "superres/signal_models.hpp"

namespace superres {

namespace {

using json = nlohmann::json;

// Raised for malformed configs (exit 2); everything else maps to exit 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunContext {
  json config;           // fully resolved
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::uint64_t hash = 0;
  json summary;
};

json require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T opt_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

Rational rational_of(const json& j) {
  if (j.is_array() && j.size() == 2)
    return Rational{j.at(0).get<std::int64_t>(), j.at(1).get<std::int64_t>()};
  if (j.is_number_integer()) return Rational{j.get<std::int64_t>(), 1};
  throw ConfigError("config: kappa must be an integer or a [num, den] pair");
}

NoiseModel noise_of(const json& j) {
  NoiseModel n;
  if (j.is_null()) return n;
  std::string kind = opt_or<std::string>(j, "kind", "none");
  if (kind == "none")
    n.kind = NoiseKind::none;
  else if (kind == "white")
    n.kind = NoiseKind::white;
  else if (kind == "lorentzian")
    n.kind = NoiseKind::lorentzian;
  else
    throw ConfigError("config: noise.kind must be none | white | lorentzian");
  n.strength = opt_or<double>(j, "strength", 0.0);
  n.fwhm = opt_or<double>(j, "fwhm", 0.0);
  return n;
}

ControlProtocol protocol_of(const json& j) {
  std::string family = require(j, "family").get<std::string>();
  double omega_c = opt_or<double>(j, "omega_c", 1.0);
  if (family == "free") return make_free(rational_of(require(j, "kappa")), omega_c);
  if (family == "cpmg") return make_cpmg(rational_of(require(j, "kappa")), omega_c);
  if (family == "c1") return make_c1(rational_of(require(j, "kappa")), omega_c);
  if (family == "qns")
    return make_qns_comb(require(j, "m_teeth").get<int>(), require(j, "duration").get<double>());
  if (family == "custom") {
    std::vector<double> samples = opt_or<std::vector<double>>(j, "samples", {});
    std::vector<Impulse> impulses;
    for (const json& imp : opt_or<json>(j, "impulses", json::array()))
      impulses.push_back({require(imp, "time").get<double>(),
                          require(imp, "angle").get<double>()});
    return make_custom(rational_of(require(j, "kappa")), omega_c, samples, impulses);
  }
  if (family == "file") {
    std::ifstream in(require(j, "path").get<std::string>());
    if (!in) throw ConfigError("config: cannot read protocol file");
    std::stringstream ss;
    ss << in.rdbuf();
    return protocol_from_json(ss.str());
  }
  throw ConfigError("config: unknown protocol family '" + family + "'");
}

std::vector<double> grid_of(const json& j) {
  if (j.is_array()) {
    std::vector<double> g = j.get<std::vector<double>>();
    if (g.empty()) throw ConfigError("config: empty grid");
    return g;
  }
  double lo = require(j, "min").get<double>();
  double hi = require(j, "max").get<double>();
  int n = require(j, "n").get<int>();
  bool log_spacing = opt_or<bool>(j, "log", true);
  if (n < 1 || lo <= 0.0 || hi < lo) throw ConfigError("config: bad grid spec");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) {
    double f = n == 1 ? 0.0 : double(i) / double(n - 1);
    g.push_back(log_spacing ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
  }
  return g;
}

class CsvWriter {
 public:
  CsvWriter(const RunContext& ctx, const std::string& name, const std::string& header) {
    std::filesystem::create_directories(ctx.out_dir);
    path_ = ctx.out_dir + "/" + name;
    out_.open(path_);
    if (!out_) throw std::runtime_error("cannot open output file " + path_);
    out_ << "# " << kToolVersion << "\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ctx.hash));
    out_ << "# config-hash: " << buf << "\n";
    out_ << "# seed: " << ctx.seed << "\n";
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_summary(RunContext& ctx) {
  std::filesystem::create_directories(ctx.out_dir);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ctx.hash));
  ctx.summary["tool"] = kToolVersion;
  ctx.summary["config_hash"] = std::string(buf);
  ctx.summary["seed"] = ctx.seed;
  ctx.summary["config"] = ctx.config;
  std::ofstream out(ctx.out_dir + "/summary.json");
  out << ctx.summary.dump(2) << "\n";
}

// Runs tasks 0..n-1 on ctx.threads workers; results land in caller-owned
// slots indexed by task, so output order never depends on scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& task) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- experiments ----------------------------------------------------------

void run_filterfn(RunContext& ctx) {
  const json& cfg = ctx.config;
  std::vector<ControlProtocol> protocols;
  std::vector<std::string> names;
  for (const json& p : require(cfg, "protocols")) {
    protocols.push_back(protocol_of(p));
    names.push_back(opt_or<std::string>(p, "name",
                                        "protocol" + std::to_string(names.size())));
  }
  std::vector<double> grid = grid_of(require(cfg, "omega_grid"));
  CsvWriter csv(ctx, "filterfn.csv", "protocol,omega,f,df,d2f");
  json heads = json::array();
  for (std::size_t k = 0; k < protocols.size(); ++k) {
    const ControlProtocol& p = protocols[k];
    std::vector<FFValue> vals(grid.size());
    parallel_for(int(grid.size()), ctx.threads, [&](int i) {
      vals[std::size_t(i)] = p.dephasing_preserving()
                                 ? ff_instantaneous(p, grid[std::size_t(i)])
                                 : ff_continuous_order2(p, grid[std::size_t(i)]);
    });
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv.row({names[k], num(grid[i]), num(vals[i].F), num(vals[i].dF), num(vals[i].d2F)});
    FFValue center = p.dephasing_preserving() ? ff_instantaneous(p, p.omega_c)
                                              : ff_continuous_order2(p, p.omega_c);
    heads.push_back({{"protocol", names[k]},
                     {"f_center", center.F},
                     {"d2f_center", center.d2F}});
  }
  ctx.summary["filterfn"] = heads;
}

void run_analyze(RunContext& ctx) {
  const json& cfg = ctx.config;
  ControlProtocol p = protocol_of(require(cfg, "protocol"));
  double g = opt_or<double>(cfg, "g", 0.1);
  NoiseModel noise = noise_of(opt_or<json>(cfg, "noise", json()));
  ProtocolAnalysis analysis = expansion_coefficients(p, g, noise);
  json out = json::parse(analysis_to_json(analysis));
  if (cfg.contains("delta_omega")) {
    double dw = cfg.at("delta_omega").get<double>();
    double delta = opt_or<double>(cfg, "delta", 0.1);
    double p_fail = opt_or<double>(cfg, "p_fail", 0.05);
    MeasurementBudget budget = measurement_budget(analysis, delta, dw, p_fail);
    out["budget"] = {{"n_shots", budget.n_shots},
                     {"n_rigorous", budget.n_rigorous},
                     {"n_non_sr", budget.n_non_sr},
                     {"delta", budget.delta},
                     {"p_fail", budget.p_fail}};
    out["fisher_information"] = fisher_information(analysis, dw);
  }
  ctx.summary["analyze"] = out;
  std::filesystem::create_directories(ctx.out_dir);
  std::ofstream f(ctx.out_dir + "/analyze.json");
  f << out.dump(2) << "\n";
}

BudgetRule budget_rule_of(const std::string& s) {
  if (s == "n_free") return BudgetRule::n_free;
  if (s == "n_cpmg") return BudgetRule::n_cpmg;
  if (s == "fixed") return BudgetRule::fixed;
  throw ConfigError("config: budget_rule must be n_free | n_cpmg | fixed");
}

void run_mc_rmse(RunContext& ctx) {
  const json& cfg = ctx.config;
  double g = opt_or<double>(cfg, "g", 0.1);
  NoiseModel noise = noise_of(opt_or<json>(cfg, "noise", json()));
  std::vector<double> grid = grid_of(require(cfg, "grid"));
  SweepConfig sweep;
  sweep.delta = opt_or<double>(cfg, "delta", 0.1);
  sweep.n_repeats = opt_or<int>(cfg, "n_repeats", 100);
  sweep.n_cap = opt_or<std::int64_t>(cfg, "n_cap", 0);
  sweep.mixture_shortcut = opt_or<bool>(cfg, "mixture_shortcut", true);
  // Desk-scale rescaling: capping N at n_cap while keeping the same expected
  // RMSE band would need delta^2 scaled up by the cap ratio; we instead keep
  // delta and report the capped N per point so the effect is visible.
  const json& curves_cfg = require(cfg, "curves");

  struct Curve {
    std::string name;
    ShotEngine engine;
    SweepConfig sweep;
  };
  std::vector<Curve> curves;
  for (const json& c : curves_cfg) {
    Curve curve;
    curve.name = opt_or<std::string>(c, "name",
                                     "curve" + std::to_string(curves.size()));
    curve.engine.protocol = protocol_of(require(c, "protocol"));
    curve.engine.signal = TwoToneSignal{g, curve.engine.protocol.omega_c, grid.front()};
    curve.engine.noise = noise;
    curve.engine.n_entangled = opt_or<int>(c, "n_entangled", 1);
    curve.sweep = sweep;
    curve.sweep.rule = budget_rule_of(opt_or<std::string>(c, "budget_rule", "n_free"));
    curve.sweep.fixed_n = opt_or<std::int64_t>(c, "fixed_n", 0);
    curves.push_back(std::move(curve));
  }

  struct Point {
    double rmse = 0.0;
    std::int64_t n_shots = 0;
  };
  std::vector<std::vector<Point>> table(curves.size(),
                                        std::vector<Point>(grid.size()));
  int total = int(curves.size() * grid.size());
  parallel_for(total, ctx.threads, [&](int idx) {
    std::size_t ci = std::size_t(idx) / grid.size();
    std::size_t pi = std::size_t(idx) % grid.size();
    std::uint64_t root = derive_seed(ctx.seed, std::uint64_t(ci), std::uint64_t(pi));
    auto records = rmse_sweep(curves[ci].engine, {grid[pi]}, curves[ci].sweep, root);
    table[ci][pi].rmse = relative_rmse(records, grid[pi]);
    table[ci][pi].n_shots = records.empty() ? 0 : records.front().n_shots;
  });

  CsvWriter csv(ctx, "mc_rmse.csv", "curve,delta_omega,n_shots,relative_rmse");
  json heads = json::array();
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    for (std::size_t pi = 0; pi < grid.size(); ++pi)
      csv.row({curves[ci].name, num(grid[pi]), std::to_string(table[ci][pi].n_shots),
               num(table[ci][pi].rmse)});
    heads.push_back({{"curve", curves[ci].name},
                     {"rmse_first", table[ci].front().rmse},
                     {"rmse_last", table[ci].back().rmse}});
  }
  ctx.summary["mc_rmse"] = heads;

  if (cfg.contains("bounds")) {
    CsvWriter bounds(ctx, "error_bounds.csv", "curve,delta_omega,bound");
    for (const json& b : cfg.at("bounds")) {
      std::string kind_s = require(b, "kind").get<std::string>();
      SequenceKind kind = kind_s == "cpmg" ? SequenceKind::cpmg
                                           : SequenceKind::free_evolution;
      double kappa = rational_of(require(b, "kappa")).as_double();
      double p_fail = opt_or<double>(b, "p_fail", 0.05);
      std::string name = opt_or<std::string>(b, "name", kind_s);
      for (double dw : grid)
        bounds.row({name, num(dw),
                    num(analytic_error_bounds(kind, kappa, 1.0, g, noise, sweep.delta,
                                              p_fail, dw))});
    }
  }
}

void run_optimize(RunContext& ctx) {
  const json& cfg = ctx.config;
  ControlProtocol seed;
  if (cfg.contains("seed_protocol")) {
    seed = protocol_of(cfg.at("seed_protocol"));
  } else {
    Rational kappa = rational_of(opt_or<json>(cfg, "kappa", json::array({4, 1})));
    int n_cells = opt_or<int>(cfg, "n_cells", 64);
    double v = opt_or<double>(cfg, "v", 0.0);
    if (!cfg.contains("v")) {
      Rng rng = make_rng(ctx.seed, 0, 0);
      std::uniform_real_distribution<double> unif(-0.5, 0.5);
      v = unif(rng);
    }
    seed = make_optimizer_seed(kappa, opt_or<double>(cfg, "omega_c", 1.0), n_cells, v);
  }
  ObjectiveWeights w = default_objective_weights();
  if (cfg.contains("weights")) {
    const json& jw = cfg.at("weights");
    w.mu1 = opt_or<double>(jw, "mu1", w.mu1);
    w.mu2 = opt_or<double>(jw, "mu2", w.mu2);
    w.mu3 = opt_or<double>(jw, "mu3", w.mu3);
    w.mu4 = opt_or<double>(jw, "mu4", w.mu4);
    w.mu5 = opt_or<double>(jw, "mu5", w.mu5);
  }
  NoiseModel noise = noise_of(opt_or<json>(cfg, "noise", json()));
  int iterations = opt_or<int>(cfg, "iterations", 150);
  OptimizationReport rep = optimize(seed, w, noise, iterations);

  std::filesystem::create_directories(ctx.out_dir);
  std::ofstream pf(ctx.out_dir + "/optimized_protocol.json");
  pf << protocol_to_json(rep.protocol) << "\n";

  auto terms_json = [](const ObjectiveBreakdown& t) {
    return json{{"curvature", t.curvature},     {"noise_overlap", t.noise_overlap},
                {"centroid", t.centroid},       {"amplitude", t.amplitude},
                {"fourth_order", t.fourth_order}, {"smoothness", t.smoothness},
                {"total", t.total}};
  };
  double maxc = 0.0;
  for (double v : rep.protocol.samples) maxc = std::max(maxc, std::abs(v));
  json report{{"initial_objective", rep.initial_objective},
              {"final_objective", rep.final_objective},
              {"initial_terms", terms_json(rep.initial_terms)},
              {"final_terms", terms_json(rep.final_terms)},
              {"iterations", rep.iterations},
              {"gradient_norm", rep.gradient_norm},
              {"optimality_residual", rep.optimality_residual},
              {"max_amplitude", maxc}};
  std::ofstream rf(ctx.out_dir + "/optimize_report.json");
  rf << report.dump(2) << "\n";
  ctx.summary["optimize"] = report;
}

void run_classical_fi(RunContext& ctx) {
  const json& cfg = ctx.config;
  MeasurementBlock tmpl = make_uniform_block(
      opt_or<int>(cfg, "m_samples", 4),
      rational_of(opt_or<json>(cfg, "kappa", json::array({1, 1}))),
      opt_or<double>(cfg, "omega_c", 1.0), opt_or<double>(cfg, "g", 0.1), 0.0,
      opt_or<double>(cfg, "noise_fwhm", 0.1), 0.1);
  std::vector<double> grid = grid_of(require(cfg, "grid"));
  std::vector<double> gls = require(cfg, "g_lambda_list").get<std::vector<double>>();
  auto curves = fisher_sweep(tmpl, grid, gls);
  CsvWriter csv(ctx, "classical_fi.csv", "delta_omega,g_lambda,fi_over_n");
  for (const FisherCurve& c : curves)
    for (std::size_t i = 0; i < c.delta_omega.size(); ++i)
      csv.row({num(c.delta_omega[i]), num(c.g_lambda), num(c.fi_over_n[i])});
  json heads = json::array();
  for (const FisherCurve& c : curves)
    heads.push_back({{"g_lambda", c.g_lambda},
                     {"fi_first", c.fi_over_n.front()},
                     {"fi_last", c.fi_over_n.back()}});
  ctx.summary["classical_fi"] = heads;
}

void run_entangle(RunContext& ctx) {
  const json& cfg = ctx.config;
  ControlProtocol p = protocol_of(require(cfg, "protocol"));
  double g = opt_or<double>(cfg, "g", 0.1);
  NoiseModel noise = noise_of(opt_or<json>(cfg, "noise", json()));
  double delta = opt_or<double>(cfg, "delta", 0.1);
  double dw = require(cfg, "delta_omega").get<double>();
  std::vector<int> ne_list = opt_or<std::vector<int>>(cfg, "ne_list", {1, 2, 4});
  ProtocolAnalysis analysis = expansion_coefficients(p, g, noise);
  CsvWriter csv(ctx, "entangle.csv", "n_entangled,fi,n_repetitions,resource_ratio");
  json heads = json::array();
  for (int ne : ne_list) {
    EntangledScaling s = entanglement_scaling(analysis, ne, delta, dw);
    csv.row({std::to_string(ne), num(s.fi), std::to_string(s.n_repetitions),
             num(s.resource_ratio)});
    heads.push_back({{"n_entangled", ne}, {"fi", s.fi}});
  }
  ctx.summary["entangle"] = heads;
}

void run_qns_comb(RunContext& ctx) {
  const json& cfg = ctx.config;
  std::vector<int> m_list = opt_or<std::vector<int>>(cfg, "m_teeth_list", {1, 2, 4});
  double duration = opt_or<double>(cfg, "duration", 2.0 * 3.14159265358979324);
  std::vector<double> grid = grid_of(require(cfg, "omega_grid"));
  CsvWriter csv(ctx, "qns_comb.csv", "m_teeth,omega,f,f_closed");
  for (int m : m_list) {
    ControlProtocol p = make_qns_comb(m, duration);
    for (double w : grid)
      csv.row({std::to_string(m), num(w), num(ff_instantaneous(p, w).F),
               num(ff_qns_closed(m, duration, w))});
  }
  ctx.summary["qns_comb"] = {{"m_teeth", m_list}};
}

void dispatch(RunContext& ctx, const std::string& kind);

void run_reproduce_figures(RunContext& ctx) {
  std::string id = require(ctx.config, "figure").get<std::string>();
  json cfg;
  std::string kind;
  if (id == "mse-left" || id == "mse-right") {
    kind = "mc-rmse";
    cfg["g"] = 0.1;
    cfg["delta"] = 0.1;
    cfg["grid"] = {{"min", 1e-3}, {"max", 1e-2}, {"n", 7}};
    cfg["n_repeats"] = opt_or<int>(ctx.config, "n_repeats", 200);
    cfg["curves"] = json::array(
        {{{"name", "fe-sr"},
          {"protocol", {{"family", "free"}, {"kappa", {2, 1}}}}},
         {{"name", "fe-non-sr"},
          {"protocol", {{"family", "free"}, {"kappa", {5, 2}}}}},
         {{"name", "cpmg-sr"},
          {"protocol", {{"family", "cpmg"}, {"kappa", {2, 1}}}}}});
    cfg["bounds"] = json::array({{{"kind", "free"}, {"kappa", {2, 1}}},
                                 {{"kind", "cpmg"}, {"kappa", {2, 1}}}});
    if (id == "mse-right")
      cfg["noise"] = {{"kind", "lorentzian"}, {"strength", 0.001}, {"fwhm", 0.1}};
  } else if (id == "cc-mse") {
    // One bundle per (g, noise) panel; this emits the g = 0.06, g/30 panel by
    // default, with g and ratio overridable.
    kind = "mc-rmse";
    double g = opt_or<double>(ctx.config, "g", 0.06);
    double ratio = opt_or<double>(ctx.config, "noise_ratio", 30.0);
    cfg["g"] = g;
    cfg["delta"] = 0.1;
    cfg["grid"] = {{"min", 1e-3}, {"max", 1e-1}, {"n", 7}};
    cfg["n_repeats"] = opt_or<int>(ctx.config, "n_repeats", 100);
    if (ratio > 0.0)
      cfg["noise"] = {{"kind", "lorentzian"}, {"strength", g / ratio}, {"fwhm", 0.1}};
    cfg["curves"] = json::array(
        {{{"name", "fe-sr"},
          {"protocol", {{"family", "free"}, {"kappa", {4, 1}}}}},
         {{"name", "cpmg-sr"},
          {"protocol", {{"family", "cpmg"}, {"kappa", {4, 1}}}}},
         {{"name", "c1"},
          {"protocol", {{"family", "c1"}, {"kappa", {4, 1}}}}}});
  } else if (id == "filterfunctions" || id == "all-controls") {
    kind = "filterfn";
    cfg["omega_grid"] = {{"min", 0.05}, {"max", 3.0}, {"n", 400}, {"log", false}};
    cfg["protocols"] = json::array(
        {{{"name", "fe-sr"}, {"family", "free"}, {"kappa", {2, 1}}},
         {{"name", "fe-non-sr"}, {"family", "free"}, {"kappa", {5, 2}}},
         {{"name", "cpmg-sr"}, {"family", "cpmg"}, {"kappa", {2, 1}}}});
    if (id == "all-controls")
      cfg["protocols"].push_back({{"name", "c1"}, {"family", "c1"}, {"kappa", {2, 1}}});
  } else if (id == "qns-filter-function") {
    kind = "qns-comb";
    cfg["m_teeth_list"] = {1, 2, 4};
    cfg["duration"] = 2.0 * 3.14159265358979324;
    cfg["omega_grid"] = {{"min", 0.05}, {"max", 6.0}, {"n", 400}, {"log", false}};
  } else if (id == "classical-fi") {
    kind = "classical-fi";
    cfg["m_samples"] = 4;
    cfg["kappa"] = {1, 1};
    cfg["g"] = 0.1;
    cfg["noise_fwhm"] = 0.1;
    cfg["g_lambda_list"] = {0.0, 0.02, 0.05, 0.1};
    cfg["grid"] = {{"min", 1e-3}, {"max", 1.9}, {"n", 80}};
  } else {
    throw ConfigError("config: unknown figure id '" + id + "'");
  }
  RunContext sub = ctx;
  cfg["experiment"] = kind;
  sub.config = cfg;
  dispatch(sub, kind);
  ctx.summary = sub.summary;
  ctx.summary["figure"] = id;
}

void dispatch(RunContext& ctx, const std::string& kind) {
  if (kind == "filterfn")
    run_filterfn(ctx);
  else if (kind == "analyze")
    run_analyze(ctx);
  else if (kind == "mc-rmse")
    run_mc_rmse(ctx);
  else if (kind == "optimize")
    run_optimize(ctx);
  else if (kind == "classical-fi")
    run_classical_fi(ctx);
  else if (kind == "entangle")
    run_entangle(ctx);
  else if (kind == "qns-comb")
    run_qns_comb(ctx);
  else if (kind == "reproduce-figures")
    run_reproduce_figures(ctx);
  else
    throw ConfigError("config: unknown experiment '" + kind + "'");
}

}  // namespace

std::uint64_t config_hash(const std::string& canonical_config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_config) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int run_experiment(const RunOptions& options) {
  RunContext ctx;
  try {
    std::ifstream in(options.config_path);
    if (!in) throw ConfigError("cannot read config file " + options.config_path);
    try {
      ctx.config = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!ctx.config.is_object()) throw ConfigError("config: root must be an object");
    ctx.out_dir = options.out_dir;
    ctx.seed = options.seed_override ? options.seed
                                     : opt_or<std::uint64_t>(ctx.config, "seed", 0);
    ctx.config["seed"] = ctx.seed;
    ctx.threads = std::max(1, options.threads);
    ctx.hash = config_hash(ctx.config.dump());
    std::string kind = require(ctx.config, "experiment").get<std::string>();
    dispatch(ctx, kind);
    write_summary(ctx);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericFailure;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"filter-design superresolution experiment runner"};
  app.require_subcommand(1);
  RunOptions options;
  std::string expected_kind;
  for (const char* name : {"filterfn", "analyze", "mc-rmse", "optimize", "classical-fi",
                           "entangle", "qns-comb", "reproduce-figures"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path)->required();
    sub->add_option("--out", options.out_dir);
    sub->add_option("--threads", options.threads);
    auto* seed_opt = sub->add_option("--seed", options.seed);
    sub->callback([&options, seed_opt, name, &expected_kind] {
      options.seed_override = seed_opt->count() > 0;
      expected_kind = name;
    });
  }
  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  // The subcommand must agree with the config's experiment field.
  {
    std::ifstream in(options.config_path);
    if (in) {
      try {
        json cfg = json::parse(in);
        if (cfg.is_object() && cfg.contains("experiment") &&
            cfg.at("experiment").get<std::string>() != expected_kind) {
          std::fprintf(stderr, "config error: experiment kind mismatch\n");
          return kExitConfigError;
        }
      } catch (...) {
        // parse errors reported by run_experiment with context
      }
    }
  }
  return run_experiment(options);
}

}  // namespace superres
