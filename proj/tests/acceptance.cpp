// Acceptance harness: one pass/fail line per criterion, exit code equals the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "superres/classical_baseline.hpp"
#include "superres/control_optimizer.hpp"
#include "superres/estimation.hpp"
#include "superres/filter_functions.hpp"
#include "superres/monte_carlo.hpp"
#include "superres/protocols.hpp"
#include "superres/rng.hpp"
#include "superres/signal_models.hpp"

using namespace superres;

namespace {

constexpr double kPi = std::numbers::pi;
const NoiseModel kNoNoise{NoiseKind::none, 0.0, 0.0};

struct Reporter {
  int failures = 0;

  void report(int idx, bool ok, const std::string& what, double seconds) {
    std::printf("criterion %2d: %s  %s  (%.1fs)\n", idx, ok ? "PASS" : "FAIL", what.c_str(),
                seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

double now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

ControlProtocol random_pulse_protocol(std::uint64_t seed) {
  auto rng = make_rng(seed, 0, 0);
  std::uniform_int_distribution<int> n_pulses(0, 10);
  std::uniform_real_distribution<double> gap(0.05, 0.95);
  int n = n_pulses(rng);
  std::vector<Impulse> imp;
  double t = 0.0;
  for (int i = 0; i < n; ++i) {
    t += gap(rng);
    imp.push_back({t, kPi});
  }
  double duration = t + gap(rng);
  Rational kappa{std::int64_t(std::ceil(duration / (2.0 * kPi) * 1000.0)), 1000};
  return make_custom(kappa, 1.0, {}, imp);
}

bool close_rel(double a, double b, double tol, double floor_scale) {
  return std::abs(a - b) <= tol * std::max(std::abs(b), floor_scale);
}

// Sweep results shared between the RMSE criteria and the bound overlays.
struct SweepResult {
  std::vector<double> grid;
  std::vector<double> fe_rmse, cpmg_rmse, nonsr_rmse;
};

SweepResult run_panel(const NoiseModel& noise, int repeats, std::uint64_t seed) {
  SweepResult out;
  int n_points = 7;
  for (int i = 0; i < n_points; ++i)
    out.grid.push_back(1e-3 * std::pow(10.0, double(i) / double(n_points - 1)));

  SweepConfig cfg;
  cfg.delta = 0.1;
  cfg.n_repeats = repeats;
  cfg.mixture_shortcut = true;

  ShotEngine fe;
  fe.protocol = make_free(Rational{2, 1}, 1.0);
  fe.signal = TwoToneSignal{0.1, 1.0, 0.0};
  fe.noise = noise;
  cfg.rule = BudgetRule::n_free;
  auto rec = rmse_sweep(fe, out.grid, cfg, seed);
  for (double dw : out.grid) out.fe_rmse.push_back(relative_rmse(rec, dw));

  // The passband protocol runs at the free-evolution budget, where its 4x
  // larger curvature halves the relative error (down to delta / 2).
  ShotEngine cp = fe;
  cp.protocol = make_cpmg(Rational{2, 1}, 1.0);
  cfg.rule = BudgetRule::n_free;
  auto crec = rmse_sweep(cp, out.grid, cfg, seed + 1);
  for (double dw : out.grid) out.cpmg_rmse.push_back(relative_rmse(crec, dw));

  ShotEngine ns = fe;
  ns.protocol = make_free(Rational{5, 2}, 1.0);
  cfg.rule = BudgetRule::n_free;
  auto nrec = rmse_sweep(ns, out.grid, cfg, seed + 2);
  for (double dw : out.grid) out.nonsr_rmse.push_back(relative_rmse(nrec, dw));
  return out;
}

SweepResult g_clean_panel, g_noisy_panel;
const NoiseModel kPanelNoise{NoiseKind::lorentzian, 0.001, 0.1};
constexpr int kPanelRepeats = 200;

// ---- criteria -------------------------------------------------------------

bool criterion1() {
  auto rng = make_rng(11, 0, 0);
  std::uniform_real_distribution<double> freq(1e-3, 3.0);
  for (std::int64_t kappa : {1, 2, 3}) {
    ControlProtocol p = make_free(Rational{kappa, 1}, 1.0);
    double scale = p.duration * p.duration;
    for (int i = 0; i < 1000; ++i) {
      double w = freq(rng);
      double closed = ff_free_closed(double(kappa), 1.0, w);
      double seg = ff_instantaneous(p, w).F;
      if (!close_rel(seg, closed, 1e-10, 1e-10 * scale)) return false;
    }
  }
  for (std::int64_t kappa : {2, 4, 6}) {
    ControlProtocol p = make_cpmg(Rational{kappa, 1}, 1.0);
    double scale = p.duration * p.duration;
    for (int i = 0; i < 1000; ++i) {
      double w = freq(rng);
      double closed = ff_cpmg_closed(kappa, 1.0, w);
      double seg = ff_instantaneous(p, w).F;
      if (!close_rel(seg, closed, 1e-10, 1e-10 * scale)) return false;
    }
  }
  return true;
}

bool criterion2() {
  std::vector<ControlProtocol> protocols = {make_free(Rational{2, 1}, 1.0),
                                            make_cpmg(Rational{2, 1}, 1.0),
                                            make_qns_comb(1, 4.0), make_qns_comb(2, 8.0),
                                            make_qns_comb(4, 16.0)};
  for (std::uint64_t s = 0; s < 50; ++s) protocols.push_back(random_pulse_protocol(300 + s));
  for (const ControlProtocol& p : protocols) {
    double integral = parseval_integral(p);
    if (!close_rel(integral, 2.0 * kPi * p.duration, 1e-3, 0.0)) return false;
  }
  return true;
}

bool criterion3() {
  double g = 0.1;
  ProtocolAnalysis fe = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  ProtocolAnalysis cp = expansion_coefficients(make_cpmg(Rational{2, 1}, 1.0), g, kNoNoise);
  double expect_fe = 8.0 * kPi * kPi * g * g * 4.0;
  double expect_cp = 32.0 * kPi * kPi * g * g * 4.0;
  if (!close_rel(fe.fi_limit, expect_fe, 1e-6, 0.0)) return false;
  if (!close_rel(cp.fi_limit, expect_cp, 1e-6, 0.0)) return false;
  return std::abs(cp.fi_limit / fe.fi_limit - 4.0) <= 1e-12;
}

bool criterion4() {
  auto rng = make_rng(29, 0, 0);
  std::uniform_real_distribution<double> freq(1e-3, 4.0);
  double g = 0.1;
  for (std::uint64_t s = 0; s < 200; ++s) {
    ControlProtocol p = random_pulse_protocol(4000 + s);
    double bound = g * g * std::pow(p.duration, 4) / 6.0;
    for (int k = 0; k < 5; ++k) {
      double w = freq(rng);
      double fi = g * g * ff_instantaneous(p, w).d2F;
      if (fi > bound * (1.0 + 1e-9)) return false;
    }
  }
  return true;
}

bool criterion5() {
  std::vector<ControlProtocol> protocols = {make_free(Rational{2, 1}, 1.0),
                                            make_cpmg(Rational{4, 1}, 1.0),
                                            make_qns_comb(2, 8.0)};
  for (std::uint64_t s = 0; s < 10; ++s) protocols.push_back(random_pulse_protocol(500 + s));
  auto rng = make_rng(31, 0, 0);
  std::uniform_real_distribution<double> freq(0.05, 3.0);
  for (const ControlProtocol& p : protocols) {
    for (int k = 0; k < 5; ++k) {
      double w1 = freq(rng), w2 = freq(rng);
      double f1 = ff_instantaneous(p, w1).F;
      double f2 = ff_instantaneous(p, w2).F;
      double gen = ff_continuous_order2(p, w1).F;
      if (!close_rel(gen, f1, 1e-8, 1.0)) return false;
      double f4 = ff_continuous_order4(p, w1, w2);
      if (!close_rel(f4, 3.0 * f1 * f2, 1e-6, 1.0)) return false;
    }
  }
  return true;
}

bool criterion6() {
  for (std::int64_t kappa : {2, 4}) {
    ControlProtocol p = make_c1(Rational{kappa, 1}, 1.0);
    FFValue v = ff_continuous_order2(p, 1.0);
    double sup = ff_sup(p);
    if (std::abs(v.F) > 1e-8 * sup) return false;
    double expect = std::pow(kPi, 4) * std::pow(double(kappa), 4);
    if (!close_rel(v.d2F, expect, 5e-3, 0.0)) return false;
  }
  return true;
}

bool criterion7() {
  return std::abs(lorentzian_shape_constant(SequenceKind::cpmg, 2.0, 0.0) - kPi / 6.0) < 1e-4 &&
         std::abs(lorentzian_shape_constant(SequenceKind::cpmg, 4.0, 0.0) - kPi / 3.0) < 1e-4 &&
         std::abs(lorentzian_shape_constant(SequenceKind::cpmg, 6.0, 0.0) - kPi / 2.0) < 1e-4;
}

bool criterion8() {
  g_clean_panel = run_panel(kNoNoise, kPanelRepeats, 81001);
  const SweepResult& r = g_clean_panel;
  // Finite repeats put ~1/sqrt(2R) relative scatter on each RMSE point; the
  // band edges carry that 2 sigma slack.
  double slack = 2.0 / std::sqrt(2.0 * double(kPanelRepeats));
  bool ok = true;
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    ok = ok && r.fe_rmse[i] >= 0.05 && r.fe_rmse[i] <= 0.2;
    ok = ok && r.cpmg_rmse[i] >= 0.01 && r.cpmg_rmse[i] <= 0.05 * (1.0 + slack);
  }
  // grid ascends in delta-omega; non-SR error must shrink along it
  for (std::size_t i = 0; i + 1 < r.grid.size(); ++i)
    ok = ok && r.nonsr_rmse[i] > r.nonsr_rmse[i + 1];
  return ok;
}

bool criterion9() {
  g_noisy_panel = run_panel(kPanelNoise, kPanelRepeats, 91001);
  const SweepResult& r = g_noisy_panel;
  bool ok = true;
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    if (r.grid[i] >= 1e-2 * (1.0 - 1e-9)) continue;
    ok = ok && r.cpmg_rmse[i] < r.fe_rmse[i];
  }
  // Bias-dominated regime: the error ratio approaches
  // sqrt(W f_{2,0} / (2 kappa^2 wc)).
  double expect = std::sqrt(kPanelNoise.fwhm *
                            lorentzian_shape_constant(SequenceKind::cpmg, 2.0, 0.0) /
                            (2.0 * 4.0));
  double ratio = r.cpmg_rmse.front() / r.fe_rmse.front();
  ok = ok && ratio > expect / 2.0 && ratio < expect * 2.0;
  return ok;
}

bool criterion10() {
  double dw = 1e-3, h = 2e-4;
  std::int64_t n = 40000;
  std::vector<double> fi;
  for (int ne : {1, 2, 4}) {
    ShotEngine e;
    e.protocol = make_free(Rational{2, 1}, 1.0);
    e.noise = kNoNoise;
    e.n_entangled = ne;
    e.signal = TwoToneSignal{0.1, 1.0, dw + h};
    double pp = mean_survival(e, n, 4242);  // common random numbers
    e.signal.delta_omega = dw - h;
    double pm = mean_survival(e, n, 4242);
    e.signal.delta_omega = dw;
    double p0 = mean_survival(e, n, 4242);
    double dp = (pp - pm) / (2.0 * h);
    fi.push_back(dp * dp / (p0 * (1.0 - p0)));
  }
  double r2 = fi[1] / fi[0];
  double r4 = fi[2] / fi[0];
  return std::abs(r2 / 4.0 - 1.0) < 0.1 && std::abs(r4 / 16.0 - 1.0) < 0.1;
}

bool criterion11() {
  for (double dw : {0.01, 0.3, 1.2}) {
    MeasurementBlock b = make_uniform_block(1, Rational{1, 1}, 1.0, 0.1, 0.05, 0.1, dw);
    if (std::abs(block_fisher_information(b, 1.0)) > 1e-8) return false;
  }
  for (int i = 0; i < 50; ++i) {
    double dw = 1e-3 * std::pow(1.9 / 1e-3, i / 49.0);
    MeasurementBlock b = make_uniform_block(4, Rational{1, 1}, 1.0, 0.1, 0.0, 0.1, dw);
    double fi = block_fisher_information(b, 1.0);
    double cf = classical_fi_closed_form_k1(1.0, 1.0, dw);
    if (!close_rel(fi, cf, 1e-6, 0.0)) return false;
  }
  MeasurementBlock tmpl = make_uniform_block(4, Rational{1, 1}, 1.0, 0.1, 0.0, 0.1, 0.1);
  auto curves = fisher_sweep(tmpl, {1e-4, 4e-4, 0.1, 0.3}, {0.002});
  const FisherCurve& c = curves[0];
  double lo = std::log(c.fi_over_n[1] / c.fi_over_n[0]) / std::log(4.0);
  double hi = std::log(c.fi_over_n[3] / c.fi_over_n[2]) / std::log(3.0);
  return std::abs(lo - 2.0) < 0.1 && std::abs(hi + 2.0) < 0.1;
}

bool criterion12() {
  NoiseModel noise{NoiseKind::lorentzian, 0.05, 0.1};
  ObjectiveWeights w = default_objective_weights();

  // gradient spot-checks at the seed and at a perturbed point
  ControlProtocol seed = make_optimizer_seed(Rational{4, 1}, 1.0, 64, 0.23);
  for (std::uint64_t variant = 0; variant < 2; ++variant) {
    std::vector<double> c = seed.samples;
    if (variant == 1) {
      auto rng = make_rng(99, 0, 0);
      std::uniform_real_distribution<double> u(-0.2, 0.2);
      for (double& x : c) x += u(rng);
    }
    std::vector<double> grad = gradient(c, w, noise, seed.kappa, 1.0, seed.impulses);
    for (std::size_t j = 0; j < c.size(); j += 7) {
      double h = 1e-6;
      std::vector<double> cp = c, cm = c;
      cp[j] += h;
      cm[j] -= h;
      double fd = (objective(cp, w, noise, seed.kappa, 1.0, seed.impulses).total -
                   objective(cm, w, noise, seed.kappa, 1.0, seed.impulses).total) /
                  (2.0 * h);
      if (std::abs(grad[j] - fd) > 1e-5 * std::max(1.0, std::abs(fd))) return false;
    }
  }

  OptimizationReport rep = optimize(seed, w, noise, 150);
  FFValue fin = ff_continuous_order2(rep.protocol, 1.0);
  if (std::abs(fin.F) > 1e-6 * fin.d2F) return false;  // omega_c = 1

  FFValue cpmg = ff_instantaneous(make_cpmg(Rational{4, 1}, 1.0), 1.0);
  if (!(fin.d2F > cpmg.d2F)) return false;

  double ovl_opt = overlap_chi(rep.protocol, SpectralModel::from_noise(noise)).chi;
  double ovl_cp =
      overlap_chi(make_cpmg(Rational{4, 1}, 1.0), SpectralModel::from_noise(noise)).chi;
  return ovl_opt < ovl_cp;
}

bool criterion13() {
  double slack = 2.0 / std::sqrt(2.0 * double(kPanelRepeats));
  bool ok = true;
  for (const auto& [panel, noise] :
       {std::pair<const SweepResult*, const NoiseModel*>{&g_clean_panel, &kNoNoise},
        {&g_noisy_panel, &kPanelNoise}}) {
    if (panel->grid.empty()) return false;  // depends on criteria 8/9 having run
    for (std::size_t i = 0; i < panel->grid.size(); ++i) {
      double dw = panel->grid[i];
      double bf = analytic_error_bounds(SequenceKind::free_evolution, 2.0, 1.0, 0.1, *noise,
                                        0.1, 0.05, dw);
      double bc =
          analytic_error_bounds(SequenceKind::cpmg, 2.0, 1.0, 0.1, *noise, 0.1, 0.05, dw);
      ok = ok && bf >= panel->fe_rmse[i] * (1.0 - slack);
      ok = ok && bc >= panel->cpmg_rmse[i] * (1.0 - slack);
    }
  }
  return ok;
}

}  // namespace

int main() {
  Reporter rep;
  struct Entry {
    int idx;
    bool (*fn)();
    const char* what;
  };
  const Entry entries[] = {
      {1, criterion1, "closed-form filter functions match the segment evaluator"},
      {2, criterion2, "filter-function normalization (Parseval) holds"},
      {3, criterion3, "Fisher-information limits and the exact factor-4 ratio"},
      {4, criterion4, "g^2 T^4 / 6 information ceiling on random protocols"},
      {5, criterion5, "generalized filter functions reduce for pi-pulse controls"},
      {6, criterion6, "sculpted waveform centroid zero and curvature values"},
      {7, criterion7, "Lorentzian shape constants at zero width"},
      {8, criterion8, "budgeted RMSE bands and non-SR degradation (desk-scale MC)"},
      {9, criterion9, "noisy-case CPMG advantage and bias ratio"},
      {10, criterion10, "entangled information scales as Ne^2"},
      {11, criterion11, "classical block Fisher information anchors and slopes"},
      {12, criterion12, "optimizer gates: gradient checks, curvature, overlap"},
      {13, criterion13, "analytic error bounds dominate the MC RMSE curves"},
  };
  for (const Entry& e : entries) {
    double t0 = now();
    bool ok = false;
    try {
      ok = e.fn();
    } catch (const std::exception& ex) {
      std::printf("criterion %2d: exception: %s\n", e.idx, ex.what());
      ok = false;
    }
    rep.report(e.idx, ok, e.what, now() - t0);
  }
  if (rep.failures == 0) std::printf("all 13 criteria passed\n");
  return rep.failures;
}
