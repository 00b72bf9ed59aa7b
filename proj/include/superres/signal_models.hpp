// Stationary Gaussian signal and noise models, defined by their power
// spectral densities, plus samplers for Monte-Carlo trials.
//
// Frequencies are angular throughout. The two-tone signal PSD carries two
// Dirac masses of weight pi g^2 at omega_c -/+ delta_omega/2; those are
// reported structurally (weight, location), never as finite spikes.
#ifndef SUPERRES_SIGNAL_MODELS_HPP
#define SUPERRES_SIGNAL_MODELS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "superres/rng.hpp"

namespace superres {

struct TwoToneSignal {
  double g = 0.1;           // coupling strength
  double omega_c = 1.0;     // centroid, > 0
  double delta_omega = 0.0; // tone separation, >= 0

  double omega1() const { return omega_c - 0.5 * delta_omega; }
  double omega2() const { return omega_c + 0.5 * delta_omega; }
  void validate() const {
    if (omega_c <= 0.0) throw std::invalid_argument("two-tone: omega_c must be > 0");
    if (delta_omega < 0.0) throw std::invalid_argument("two-tone: delta_omega must be >= 0");
    if (omega1() <= 0.0) throw std::invalid_argument("two-tone: omega1 = omega_c - delta_omega/2 must be > 0");
  }
};

struct SignalRealization {
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;
};

enum class NoiseKind { none, white, lorentzian };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double strength = 0.0;  // g_lambda (lorentzian) or Gamma (white)
  double fwhm = 0.0;      // W, lorentzian only

  void validate() const {
    if (strength < 0.0) throw std::invalid_argument("noise: strength must be >= 0");
    if (kind == NoiseKind::lorentzian && fwhm < 0.0)
      throw std::invalid_argument("noise: fwhm must be >= 0");
  }
};

// A PSD: one smooth family or a pair of delta masses.
struct SpectralModel {
  enum class Kind { two_tone, lorentzian, white, zero } kind = Kind::zero;
  TwoToneSignal tone;  // two_tone
  double strength = 0.0, fwhm = 0.0;  // lorentzian / white

  static SpectralModel from_signal(const TwoToneSignal& s) {
    SpectralModel m;
    m.kind = Kind::two_tone;
    m.tone = s;
    s.validate();
    return m;
  }
  static SpectralModel from_noise(const NoiseModel& n) {
    n.validate();
    SpectralModel m;
    switch (n.kind) {
      case NoiseKind::none: m.kind = Kind::zero; break;
      case NoiseKind::white: m.kind = Kind::white; m.strength = n.strength; break;
      case NoiseKind::lorentzian:
        m.kind = Kind::lorentzian;
        m.strength = n.strength;
        m.fwhm = n.fwhm;
        break;
    }
    return m;
  }
};

struct DeltaMass {
  double omega;
  double weight;
};

// Smooth part of the PSD. Delta masses are exposed via psd_masses.
double psd_value(const SpectralModel& model, double omega);
std::vector<DeltaMass> psd_masses(const SpectralModel& model);

// C(tau) = (1/2pi) \int S(omega) e^{i omega tau} d omega.
// White noise is rejected (distributional autocorrelation).
double autocorrelation(const SpectralModel& model, double tau);

SignalRealization sample_signal(const TwoToneSignal& signal, std::uint64_t rng_seed);

struct NoisePath {
  double t0 = 0.0, dt = 0.0;
  std::vector<double> values;
};

// Exact stationary sampling of the Lorentzian (Ornstein-Uhlenbeck type)
// noise on a uniform grid: first-order autoregressive recursion with
// lag-1 coefficient e^{-W dt / 2}, so the discrete covariance matches
// C(tau) = (g_lambda^2 / 2 pi) e^{-W |tau| / 2} with no discretization bias.
NoisePath sample_noise_path(const NoiseModel& noise, double t0, double dt,
                            std::size_t n_points, std::uint64_t rng_seed);

}  // namespace superres

#endif
