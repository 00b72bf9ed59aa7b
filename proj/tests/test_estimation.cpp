#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "superres/estimation.hpp"
#include "superres/filter_functions.hpp"
#include "superres/protocols.hpp"

using namespace superres;

namespace {
constexpr double kPi = std::numbers::pi;
const NoiseModel kNoNoise{NoiseKind::none, 0.0, 0.0};
}  // namespace

TEST_CASE("survival probability anchors") {
  ControlProtocol fe2 = make_free(Rational{2, 1}, 1.0);
  CHECK(survival_probability(fe2, TwoToneSignal{0.1, 1.0, 0.0}, kNoNoise) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Non-superresolving half-integer duration: F(omega_c) = 4 / omega_c^2.
  ControlProtocol fe52 = make_free(Rational{5, 2}, 1.0);
  double g = 0.1;
  CHECK(survival_probability(fe52, TwoToneSignal{g, 1.0, 0.0}, kNoNoise) ==
        doctest::Approx(0.5 + 0.5 * std::exp(-16.0 * g * g)).epsilon(1e-12));

  // White noise decays any protocol by exp(-2 Gamma T).
  NoiseModel white{NoiseKind::white, 0.03, 0.0};
  ControlProtocol cp = make_cpmg(Rational{2, 1}, 1.0);
  CHECK(survival_probability(cp, TwoToneSignal{g, 1.0, 0.0}, white) ==
        doctest::Approx(0.5 + 0.5 * std::exp(-2.0 * 0.03 * cp.duration)).epsilon(1e-12));
}

TEST_CASE("expansion coefficients") {
  double g = 0.1;
  ProtocolAnalysis fe = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  CHECK(fe.a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fe.b == doctest::Approx(0.01 * 8.0 * kPi * kPi * 4.0 / 4.0).epsilon(1e-10));
  CHECK(fe.is_superres);

  ProtocolAnalysis cp = expansion_coefficients(make_cpmg(Rational{2, 1}, 1.0), g, kNoNoise);
  CHECK(cp.b / fe.b == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cp.is_superres);

  ProtocolAnalysis nonsr = expansion_coefficients(make_free(Rational{5, 2}, 1.0), g, kNoNoise);
  CHECK(nonsr.a == doctest::Approx(0.5 * (1.0 + std::exp(-16.0 * g * g))).epsilon(1e-12));
  CHECK(!nonsr.is_superres);
}

TEST_CASE("expansion reproduces the survival probability at small separation") {
  double g = 0.1;
  for (const ControlProtocol& p :
       {make_free(Rational{2, 1}, 1.0), make_cpmg(Rational{2, 1}, 1.0),
        make_free(Rational{5, 2}, 1.0)}) {
    ProtocolAnalysis an = expansion_coefficients(p, g, kNoNoise);
    for (double dw : {0.005, 0.02, 0.05}) {
      double exact = survival_probability(p, TwoToneSignal{g, 1.0, dw}, kNoNoise);
      double taylor = an.a - an.b * dw * dw + an.c * dw * dw * dw * dw;
      CHECK(std::abs(exact - taylor) < 1e-6);
    }
  }
}

TEST_CASE("fisher information limits and consistency") {
  double g = 0.1;
  ProtocolAnalysis fe = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  CHECK(fe.fi_limit == doctest::Approx(8.0 * kPi * kPi * g * g * 4.0).epsilon(1e-10));
  CHECK(fisher_information(fe, 0.0) == doctest::Approx(fe.fi_limit).epsilon(1e-12));

  ProtocolAnalysis cp = expansion_coefficients(make_cpmg(Rational{2, 1}, 1.0), g, kNoNoise);
  CHECK(cp.fi_limit == doctest::Approx(32.0 * kPi * kPi * g * g * 4.0).epsilon(1e-10));
  CHECK(cp.fi_limit / fe.fi_limit == doctest::Approx(4.0).epsilon(1e-12));

  ProtocolAnalysis nonsr = expansion_coefficients(make_free(Rational{5, 2}, 1.0), g, kNoNoise);
  CHECK(nonsr.fi_limit == 0.0);

  // Exact-route FI against the finite-difference binomial information.
  ControlProtocol p = make_cpmg(Rational{2, 1}, 1.0);
  double dw = 1e-3, h = 1e-7;
  auto prob = [&](double d) { return survival_probability(p, TwoToneSignal{g, 1.0, d}, kNoNoise); };
  double pd = prob(dw);
  double dp = (prob(dw + h) - prob(dw - h)) / (2.0 * h);
  double fd_fi = dp * dp / (pd * (1.0 - pd));
  CHECK(fisher_information(p, TwoToneSignal{g, 1.0, dw}, kNoNoise) ==
        doctest::Approx(fd_fi).epsilon(1e-4));

  // The time-quartic information ceiling.
  CHECK(fe.fi_limit <= g * g * std::pow(fe.duration, 4) / 6.0 * (1.0 + 1e-12));
  CHECK(cp.fi_limit <= g * g * std::pow(cp.duration, 4) / 6.0 * (1.0 + 1e-12));
}

TEST_CASE("measurement budgets") {
  double g = 0.1;
  ProtocolAnalysis fe = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  MeasurementBudget bud = measurement_budget(fe, 0.1, 0.01, 0.05);
  CHECK(bud.n_shots == 316629);

  ProtocolAnalysis cp = expansion_coefficients(make_cpmg(Rational{2, 1}, 1.0), g, kNoNoise);
  MeasurementBudget bc = measurement_budget(cp, 0.1, 0.01, 0.05);
  CHECK(std::abs(double(bud.n_shots) / double(bc.n_shots) - 4.0) < 1e-4);

  // Ceiling floor at absurdly loose targets.
  CHECK(measurement_budget(fe, 1e6, 0.5, 0.05).n_shots == 1);

  // Monotone in delta and delta_omega.
  CHECK(measurement_budget(fe, 0.05, 0.01, 0.05).n_shots >= bud.n_shots);
  CHECK(measurement_budget(fe, 0.1, 0.005, 0.05).n_shots >= bud.n_shots);

  ProtocolAnalysis flat;
  flat.b = 0.0;
  CHECK_THROWS(measurement_budget(flat, 0.1, 0.01, 0.05));
}

TEST_CASE("plug-in estimator") {
  ProtocolAnalysis an;
  an.a = 1.0;
  an.b = 0.7896;
  an.is_superres = true;

  double dw = 0.02;
  double p = an.a - an.b * dw * dw;
  std::int64_t n = 1000000;
  auto n_plus = std::int64_t(std::llround(p * double(n)));
  EstimateResult r = estimate_from_counts(an, n_plus, n);
  CHECK(r.delta_omega == doctest::Approx(dw).epsilon(1e-3));
  CHECK(!r.abs_branch);

  EstimateResult zero = estimate_from_counts(an, n, n);
  CHECK(zero.delta_omega == 0.0);

  EstimateResult over = estimate_from_counts(an, n + 0, n);
  CHECK(!over.abs_branch);
  ProtocolAnalysis low = an;
  low.a = 0.9;
  EstimateResult neg = estimate_from_counts(low, n, n);  // frequency above a
  CHECK(neg.abs_branch);
  CHECK(neg.delta_omega == doctest::Approx(std::sqrt(0.1 / an.b)).epsilon(1e-3));
}

TEST_CASE("analytic error bounds") {
  double delta = 0.1, p_fail = 0.05;
  CHECK(analytic_error_bounds(SequenceKind::free_evolution, 2.0, 1.0, 0.1, kNoNoise, delta,
                              p_fail, 1e-3) == doctest::Approx(delta / std::sqrt(p_fail)).epsilon(1e-10));
  CHECK(analytic_error_bounds(SequenceKind::cpmg, 2.0, 1.0, 0.1, kNoNoise, delta, p_fail,
                              1e-3) == doctest::Approx(0.5 * delta / std::sqrt(p_fail)).epsilon(1e-10));

  // With Lorentzian noise the bias term is positive and larger for free
  // evolution than for the passband protocol.
  NoiseModel lor{NoiseKind::lorentzian, 0.001, 0.1};
  double bf = analytic_error_bounds(SequenceKind::free_evolution, 2.0, 1.0, 0.1, lor, delta,
                                    p_fail, 1e-3);
  double bc = analytic_error_bounds(SequenceKind::cpmg, 2.0, 1.0, 0.1, lor, delta, p_fail, 1e-3);
  CHECK(bf > delta / std::sqrt(p_fail));
  CHECK(bc < bf);
}

TEST_CASE("bias subtraction budget scaling") {
  double g = 0.1;
  NoiseModel lor{NoiseKind::lorentzian, 0.01, 0.1};
  ProtocolAnalysis an = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, lor);
  BiasSubtraction b1 = bias_subtraction_analysis(an, 0.1, 2e-3);
  BiasSubtraction b2 = bias_subtraction_analysis(an, 0.1, 1e-3);
  double growth = double(b2.n_required) / double(b1.n_required);
  CHECK(growth == doctest::Approx(16.0).epsilon(0.05));

  // With the noise switched off the variance-limited count collapses back to
  // the plain superresolution budget.
  ProtocolAnalysis clean = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  BiasSubtraction b0 = bias_subtraction_analysis(clean, 0.1, 1e-3);
  MeasurementBudget plain = measurement_budget(clean, 0.1, 1e-3, 0.05);
  CHECK(double(b0.n_required) / double(plain.n_shots) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("entanglement scaling") {
  double g = 0.1;
  ProtocolAnalysis an = expansion_coefficients(make_free(Rational{2, 1}, 1.0), g, kNoNoise);
  EntangledScaling e1 = entanglement_scaling(an, 1, 0.1, 1e-3);
  CHECK(e1.fi == doctest::Approx(an.fi_limit).epsilon(1e-12));
  CHECK(e1.n_repetitions == measurement_budget(an, 0.1, 1e-3, 0.05).n_shots);

  EntangledScaling e4 = entanglement_scaling(an, 4, 0.1, 1e-3);
  CHECK(e4.fi == doctest::Approx(16.0 * an.fi_limit).epsilon(1e-12));
  double ratio = double(e1.n_repetitions) / double(e4.n_repetitions);
  CHECK(ratio == doctest::Approx(16.0).epsilon(1e-3));

  EntangledScaling sched = entanglement_scaling(an, 2.0, 1.0, 0.1, 1e-3);
  CHECK(sched.resource_ratio == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("measurement basis identity") {
  CHECK(basis_robustness_check(0.0, 0.3, 0.8) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(basis_robustness_check(kPi / 2.0, 1.1, 0.8) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(basis_robustness_check(kPi / 4.0, 0.0, 0.8) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(basis_robustness_check(kPi / 4.0, 2.0, 0.2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("truncated continuous survival") {
  double g = 0.05;
  // Dephasing-preserving input agrees with the exponential form to O(g^6).
  for (const ControlProtocol& p :
       {make_free(Rational{2, 1}, 1.0), make_cpmg(Rational{2, 1}, 1.0)}) {
    for (double dw : {0.0, 0.02}) {
      double exact = survival_probability(p, TwoToneSignal{g, 1.0, dw}, kNoNoise);
      ContinuousSurvival trunc = survival_probability_continuous(p, TwoToneSignal{g, 1.0, dw});
      CHECK(std::abs(exact - trunc.p) < 1e-4);
      CHECK(!trunc.clamped);
    }
  }

  // Sculpted waveform at zero separation: only the fourth-order term survives.
  ControlProtocol c1 = make_c1(Rational{2, 1}, 1.0);
  double f4 = ff_continuous_order4(c1, 1.0, 1.0);
  ContinuousSurvival cs = survival_probability_continuous(c1, TwoToneSignal{g, 1.0, 0.0});
  CHECK(cs.p == doctest::Approx(1.0 - (2.0 / 3.0) * std::pow(g, 4) * f4).epsilon(1e-6));

  // Validity floor is recorded for continuous protocols.
  ProtocolAnalysis an = expansion_coefficients(c1, g, kNoNoise);
  CHECK(an.validity_floor > 0.0);
  double f2pp = ff_continuous_order2(c1, 1.0).d2F;
  CHECK(an.validity_floor ==
        doctest::Approx(std::sqrt(8.0 * g * g * f4 / (3.0 * f2pp))).epsilon(1e-8));
}

TEST_CASE("analysis serializes to json") {
  ProtocolAnalysis an = expansion_coefficients(make_free(Rational{2, 1}, 1.0), 0.1, kNoNoise);
  std::string j = analysis_to_json(an);
  CHECK(j.find("fi_limit") != std::string::npos);
  CHECK(j.find("is_superres") != std::string::npos);
}
