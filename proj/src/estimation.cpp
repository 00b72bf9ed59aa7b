#include "superres/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace superres {

namespace {

constexpr double kSuperresTol = 1e-9;  // F(omega_c) <= tol * sup F

double coth_minus_one(double x) {
  // coth x - 1 = 2 / (e^{2x} - 1), stable for small x
  return 2.0 / std::expm1(2.0 * x);
}

std::int64_t to_count(double n) {
  if (!(n > 0.0)) return 1;
  double c = std::ceil(n);
  if (c >= 9.0e18) return std::numeric_limits<std::int64_t>::max();
  return std::max<std::int64_t>(1, std::int64_t(c));
}

FFValue ff_either(const ControlProtocol& protocol, double omega) {
  if (protocol.dephasing_preserving()) return ff_instantaneous(protocol, omega);
  return ff_continuous_order2(protocol, omega);
}

}  // namespace

double survival_probability(const ControlProtocol& protocol, const TwoToneSignal& signal,
                            const NoiseModel& noise) {
  if (!protocol.dephasing_preserving())
    throw std::invalid_argument(
        "survival_probability: exponential form needs a dephasing-preserving protocol");
  signal.validate();
  double chi = overlap_chi(protocol, SpectralModel::from_signal(signal)).chi;
  double chi_l = overlap_chi(protocol, SpectralModel::from_noise(noise)).chi;
  return 0.5 + 0.5 * std::exp(-chi - chi_l);
}

ContinuousSurvival survival_probability_continuous(const ControlProtocol& protocol,
                                                   const TwoToneSignal& signal) {
  signal.validate();
  double wc = signal.omega_c;
  double g = signal.g;
  double dw = signal.delta_omega;
  FFValue f2 = ff_continuous_order2(protocol, wc);
  double f4 = ff_continuous_order4(protocol, wc, wc);
  double h = 1e-2 * wc;
  double f4pp = (ff_continuous_order4(protocol, wc + h, wc) - 2.0 * f4 +
                 ff_continuous_order4(protocol, wc - h, wc)) / (h * h);
  double p = 1.0 - g * g * (2.0 * f2.F + (2.0 / 3.0) * g * g * f4) -
             g * g * dw * dw * (0.25 * f2.d2F + (g * g / 3.0) * f4pp);
  ContinuousSurvival out;
  out.p = std::clamp(p, 0.0, 1.0);
  out.clamped = (p != out.p);
  return out;
}

ProtocolAnalysis expansion_coefficients(const ControlProtocol& protocol, double g,
                                        const NoiseModel& noise) {
  ProtocolAnalysis an;
  an.g = g;
  an.omega_c = protocol.omega_c;
  an.duration = protocol.duration;
  double wc = protocol.omega_c;
  bool dp = protocol.dephasing_preserving();
  FFValue v = ff_either(protocol, wc);
  an.f_center = v.F;
  an.d2f_center = v.d2F;
  if (dp) {
    an.d4f_center = ff_instantaneous_d4(protocol, wc);
  } else {
    double h = 1e-2 * wc;
    an.d4f_center = (ff_continuous_order2(protocol, wc + h).d2F - 2.0 * v.d2F +
                     ff_continuous_order2(protocol, wc - h).d2F) / (h * h);
  }
  an.chi_lambda = overlap_chi(protocol, SpectralModel::from_noise(noise)).chi;

  double damp = std::exp(-4.0 * g * g * v.F - an.chi_lambda);
  an.a = 0.5 * (1.0 + damp);
  an.b = 0.25 * g * g * damp * v.d2F;
  // chi(dw) = 4 g^2 F + (g^2/2) F'' dw^2 + (g^2/96) F'''' dw^4; the dw^4
  // coefficient of <P> collects the quadratic exponent term as well.
  double alpha = 0.5 * g * g * v.d2F;
  double beta = g * g * an.d4f_center / 96.0;
  an.c = 0.5 * damp * (0.5 * alpha * alpha - beta);

  an.is_superres = (std::abs(v.F) <= kSuperresTol * ff_sup(protocol)) && (v.d2F > 0.0);
  an.fi_limit = an.is_superres ? g * g * v.d2F : 0.0;
  if (!dp) {
    double f4 = ff_continuous_order4(protocol, wc, wc);
    double floor2 = 8.0 * g * g * f4 / (3.0 * v.d2F);
    an.validity_floor = floor2 > 0.0 ? std::sqrt(floor2) : 0.0;
  }
  return an;
}

double fisher_information(const ProtocolAnalysis& an, double delta_omega) {
  if (delta_omega < 0.0) throw std::invalid_argument("fisher_information: delta_omega >= 0");
  double bound = an.g * an.g * std::pow(an.duration, 4) / 6.0;
  double fi;
  if (delta_omega == 0.0) {
    fi = (an.chi_lambda > 0.0) ? 0.0 : an.fi_limit;
  } else {
    double dw2 = delta_omega * delta_omega;
    double chi = 4.0 * an.g * an.g * an.f_center + an.chi_lambda +
                 0.5 * an.g * an.g * an.d2f_center * dw2 +
                 an.g * an.g * an.d4f_center * dw2 * dw2 / 96.0;
    double dchi = an.g * an.g * an.d2f_center * delta_omega +
                  an.g * an.g * an.d4f_center * dw2 * delta_omega / 24.0;
    fi = 0.5 * coth_minus_one(chi) * dchi * dchi;
  }
  if (fi > bound * (1.0 + 1e-9))
    throw std::runtime_error("fisher_information: g^2 T^4 / 6 bound violated");
  return fi;
}

double fisher_information(const ControlProtocol& protocol, const TwoToneSignal& signal,
                          const NoiseModel& noise) {
  signal.validate();
  double g = signal.g;
  double chi_l = overlap_chi(protocol, SpectralModel::from_noise(noise)).chi;
  double bound = g * g * std::pow(protocol.duration, 4) / 6.0;
  double fi;
  if (signal.delta_omega == 0.0) {
    FFValue v = ff_either(protocol, signal.omega_c);
    bool sr = std::abs(v.F) <= kSuperresTol * ff_sup(protocol);
    fi = (chi_l > 0.0 || !sr) ? 0.0 : g * g * v.d2F;
  } else {
    FFValue v1 = ff_either(protocol, signal.omega1());
    FFValue v2 = ff_either(protocol, signal.omega2());
    double chi = 2.0 * g * g * (v1.F + v2.F) + chi_l;
    double dchi = g * g * (v2.dF - v1.dF);
    fi = 0.5 * coth_minus_one(chi) * dchi * dchi;
  }
  if (fi > bound * (1.0 + 1e-9))
    throw std::runtime_error("fisher_information: g^2 T^4 / 6 bound violated");
  return fi;
}

MeasurementBudget measurement_budget(const ProtocolAnalysis& an, double delta,
                                     double delta_omega, double p_fail) {
  if (!(delta > 0.0) || delta_omega <= 0.0 || !(p_fail > 0.0) || p_fail >= 1.0)
    throw std::invalid_argument("measurement_budget: need delta > 0, dw > 0, p_fail in (0,1)");
  if (an.b == 0.0)
    throw std::invalid_argument("measurement_budget: protocol carries no information (b = 0)");
  MeasurementBudget out;
  out.delta = delta;
  out.p_fail = p_fail;
  double dw2 = delta_omega * delta_omega;
  // Non-superresolving protocols at a filter maximum have b < 0 (the mean
  // probability rises with the separation); the budgets depend on |b| only.
  double b = std::abs(an.b);
  out.n_shots = to_count(1.0 / (4.0 * b * delta * delta * dw2));
  double rig = std::max(2.0 / (b * p_fail * delta * delta) + 1.5 / (b * delta),
                        0.5 / (b * delta)) / dw2;
  out.n_rigorous = to_count(rig);
  double var = an.a * (1.0 - an.a);
  out.n_non_sr = to_count(var / (4.0 * an.b * an.b * delta * delta * dw2 * dw2));
  return out;
}

EstimateResult estimate_from_counts(const ProtocolAnalysis& an, std::int64_t n_plus,
                                    std::int64_t n_shots) {
  if (n_shots <= 0 || n_plus < 0 || n_plus > n_shots)
    throw std::invalid_argument("estimate_from_counts: need 0 <= n_plus <= n_shots");
  if (an.b == 0.0) throw std::invalid_argument("estimate_from_counts: b = 0");
  double radicand = (an.a - double(n_plus) / double(n_shots)) / an.b;
  EstimateResult out;
  out.abs_branch = radicand < 0.0;
  out.delta_omega = std::sqrt(std::abs(radicand));
  return out;
}

double analytic_error_bounds(SequenceKind kind, double kappa, double omega_c, double g,
                             const NoiseModel& noise, double delta, double p_fail,
                             double delta_omega) {
  if (delta_omega <= 0.0) throw std::invalid_argument("analytic_error_bounds: dw > 0");
  double alpha = (kind == SequenceKind::free_evolution) ? 2.0 : 8.0;
  double w_cal = 0.0;
  if (noise.kind == NoiseKind::lorentzian && noise.strength > 0.0) {
    double wt = std::numbers::pi * noise.fwhm / omega_c;
    double f = lorentzian_shape_constant(kind, kappa, wt);
    double r = (noise.strength / g) * (omega_c / delta_omega) / std::sqrt(std::numbers::pi);
    w_cal = 4.0 * f * wt * r * r / (std::numbers::pi * alpha * kappa * kappa);
  } else if (noise.kind == NoiseKind::white && noise.strength > 0.0) {
    w_cal = 4.0 * noise.strength * std::pow(omega_c, 3) /
            (alpha * std::numbers::pi * g * g * kappa * delta_omega * delta_omega);
  }
  return std::sqrt(1.0 + w_cal) - 1.0 + delta / std::sqrt(p_fail * alpha / 2.0);
}

BiasSubtraction bias_subtraction_analysis(const ProtocolAnalysis& an, double delta,
                                          double delta_omega) {
  if (an.b == 0.0) throw std::invalid_argument("bias_subtraction_analysis: b = 0");
  BiasSubtraction out;
  out.corrected_a = an.a;
  out.corrected_b = an.b;
  double p = std::clamp(an.a - an.b * delta_omega * delta_omega, 1e-12, 1.0 - 1e-12);
  double dw2 = delta_omega * delta_omega;
  out.n_required =
      to_count(p * (1.0 - p) / (4.0 * an.b * an.b * delta * delta * dw2 * dw2));
  return out;
}

EntangledScaling entanglement_scaling(const ProtocolAnalysis& an, int n_entangled,
                                      double delta, double delta_omega) {
  if (n_entangled < 1) throw std::invalid_argument("entanglement_scaling: N_e >= 1");
  double ne = double(n_entangled);
  EntangledScaling out;
  out.fi = ne * ne * an.fi_limit;
  double dw2 = delta_omega * delta_omega;
  out.n_repetitions = to_count(1.0 / (4.0 * ne * ne * std::abs(an.b) * delta * delta * dw2));
  double n_single = 1.0 / (4.0 * std::abs(an.b) * delta * delta * dw2);
  out.resource_ratio = n_single / (ne * double(out.n_repetitions));
  return out;
}

EntangledScaling entanglement_scaling(const ProtocolAnalysis& an, double beta, double mu,
                                      double delta, double delta_omega) {
  if (!(beta > 0.0) || mu <= 0.0 || mu > 1.0)
    throw std::invalid_argument("entanglement_scaling: beta > 0, mu in (0,1]");
  EntangledScaling out;
  double ne = beta * std::pow(delta_omega, mu - 1.0);
  out.fi = ne * ne * an.fi_limit;
  out.n_repetitions = to_count(1.0 / (4.0 * an.b * beta * beta * mu * mu * delta * delta *
                                      std::pow(delta_omega, 2.0 * mu)));
  out.resource_ratio = mu * mu * ne;
  // the linearized schedule analysis assumes b beta^2 well below 1
  out.regime_flag = an.b * beta * beta >= 0.5;
  return out;
}

double basis_robustness_check(double theta, double phi, double p_plus) {
  (void)phi;  // azimuth drops out of the averaged probability
  if (p_plus < 0.0 || p_plus > 1.0)
    throw std::invalid_argument("basis_robustness_check: p_plus in [0,1]");
  double s = std::sin(theta);
  return s * s + std::cos(2.0 * theta) * p_plus;
}

std::string analysis_to_json(const ProtocolAnalysis& an) {
  nlohmann::json j;
  j["a"] = an.a;
  j["b"] = an.b;
  j["c"] = an.c;
  j["fi_limit"] = an.fi_limit;
  j["is_superres"] = an.is_superres;
  j["validity_floor"] = an.validity_floor;
  j["f_center"] = an.f_center;
  j["d2f_center"] = an.d2f_center;
  j["d4f_center"] = an.d4f_center;
  j["chi_lambda"] = an.chi_lambda;
  j["g"] = an.g;
  j["omega_c"] = an.omega_c;
  j["duration"] = an.duration;
  return j.dump(2);
}

}  // namespace superres
