// Closed-form estimation layer: survival probabilities, the a/b/c expansion
// of <P> in the tone separation, Fisher information, measurement budgets,
// plug-in estimators and their analytic error bounds, and entangled scaling.
#ifndef SUPERRES_ESTIMATION_HPP
#define SUPERRES_ESTIMATION_HPP

#include <cstdint>
#include <string>

#include "superres/filter_functions.hpp"
#include "superres/protocols.hpp"
#include "superres/signal_models.hpp"

namespace superres {

struct ProtocolAnalysis {
  // <P> = a - b dw^2 + c dw^4 for small separation dw
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double fi_limit = 0.0;        // lim_{dw -> 0} Fisher information
  bool is_superres = false;
  double validity_floor = 0.0;  // continuous protocols: smallest trustworthy dw

  // ingredients, kept for downstream formulas
  double f_center = 0.0;        // F(omega_c)
  double d2f_center = 0.0;      // F''(omega_c)
  double d4f_center = 0.0;      // F''''(omega_c)
  double chi_lambda = 0.0;      // noise overlap
  double g = 0.0;
  double omega_c = 0.0;
  double duration = 0.0;
};

struct MeasurementBudget {
  std::int64_t n_shots = 1;      // headline superresolution budget
  std::int64_t n_rigorous = 1;   // Chebyshev-style guarantee
  std::int64_t n_non_sr = 1;     // variance-limited budget for a < 1
  double delta = 0.0;
  double p_fail = 0.0;
};

struct EstimateResult {
  double delta_omega = 0.0;
  bool abs_branch = false;  // radicand was negative, absolute value applied
};

struct ContinuousSurvival {
  double p = 1.0;
  bool clamped = false;
};

// Exact exponential form, dephasing-preserving protocols only:
// P = 1/2 + 1/2 exp(-chi - chi_lambda).
double survival_probability(const ControlProtocol& protocol, const TwoToneSignal& signal,
                            const NoiseModel& noise);

// Truncated small-g form for arbitrary (continuous) controls, no noise.
ContinuousSurvival survival_probability_continuous(const ControlProtocol& protocol,
                                                   const TwoToneSignal& signal);

ProtocolAnalysis expansion_coefficients(const ControlProtocol& protocol, double g,
                                        const NoiseModel& noise);

// Taylor route from stored coefficients; exact route from the protocol.
double fisher_information(const ProtocolAnalysis& analysis, double delta_omega);
double fisher_information(const ControlProtocol& protocol, const TwoToneSignal& signal,
                          const NoiseModel& noise);

MeasurementBudget measurement_budget(const ProtocolAnalysis& analysis, double delta,
                                     double delta_omega, double p_fail);

EstimateResult estimate_from_counts(const ProtocolAnalysis& analysis, std::int64_t n_plus,
                                    std::int64_t n_shots);

// Relative-error bound: noise-induced bias sqrt(1 + W) - 1 plus the
// statistical term delta / sqrt(p alpha / 2), alpha = 2 (free) or 8 (CPMG).
double analytic_error_bounds(SequenceKind kind, double kappa, double omega_c, double g,
                             const NoiseModel& noise, double delta, double p_fail,
                             double delta_omega);

struct BiasSubtraction {
  double corrected_a = 1.0;   // noise-aware offset used by the estimator
  double corrected_b = 0.0;
  std::int64_t n_required = 1;
};

BiasSubtraction bias_subtraction_analysis(const ProtocolAnalysis& analysis, double delta,
                                          double delta_omega);

struct EntangledScaling {
  double fi = 0.0;
  std::int64_t n_repetitions = 1;
  double resource_ratio = 1.0;
  bool regime_flag = false;  // beta schedule outside its validity regime
};

// Fixed entangled-block size.
EntangledScaling entanglement_scaling(const ProtocolAnalysis& analysis, int n_entangled,
                                      double delta, double delta_omega);
// Schedule N_e = beta / dw^{1 - mu}, mu in (0, 1].
EntangledScaling entanglement_scaling(const ProtocolAnalysis& analysis, double beta, double mu,
                                      double delta, double delta_omega);

// <P_{theta,phi}> = sin^2(theta) + cos(2 theta) <P_+>: no basis recovers
// separation information lost at theta = pi/4.
double basis_robustness_check(double theta, double phi, double p_plus);

std::string analysis_to_json(const ProtocolAnalysis& analysis);

}  // namespace superres

#endif
