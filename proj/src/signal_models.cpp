#include "superres/signal_models.hpp"

#include <cmath>
#include <numbers>

namespace superres {

namespace {
constexpr double kPi = std::numbers::pi;
}

double psd_value(const SpectralModel& model, double omega) {
  switch (model.kind) {
    case SpectralModel::Kind::two_tone:
      return 0.0;  // smooth part is zero; masses via psd_masses
    case SpectralModel::Kind::lorentzian: {
      double g2 = model.strength * model.strength;
      double w = model.fwhm;
      return (g2 / kPi) * 2.0 * w / (4.0 * omega * omega + w * w);
    }
    case SpectralModel::Kind::white:
      return model.strength;
    case SpectralModel::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

std::vector<DeltaMass> psd_masses(const SpectralModel& model) {
  if (model.kind != SpectralModel::Kind::two_tone) return {};
  const TwoToneSignal& s = model.tone;
  double w = kPi * s.g * s.g;
  return {{s.omega1(), w}, {s.omega2(), w}};
}

double autocorrelation(const SpectralModel& model, double tau) {
  switch (model.kind) {
    case SpectralModel::Kind::two_tone: {
      const TwoToneSignal& s = model.tone;
      return s.g * s.g * (std::cos(s.omega1() * tau) + std::cos(s.omega2() * tau));
    }
    case SpectralModel::Kind::lorentzian: {
      double g2 = model.strength * model.strength;
      return g2 / (2.0 * kPi) * std::exp(-0.5 * model.fwhm * std::abs(tau));
    }
    case SpectralModel::Kind::white:
      throw std::invalid_argument(
          "autocorrelation: white noise is distributional; handled analytically elsewhere");
    case SpectralModel::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

SignalRealization sample_signal(const TwoToneSignal& signal, std::uint64_t rng_seed) {
  signal.validate();
  Rng rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SignalRealization r;
  r.a1 = normal(rng);
  r.a2 = normal(rng);
  r.b1 = normal(rng);
  r.b2 = normal(rng);
  return r;
}

NoisePath sample_noise_path(const NoiseModel& noise, double t0, double dt,
                            std::size_t n_points, std::uint64_t rng_seed) {
  noise.validate();
  if (n_points < 2) throw std::invalid_argument("sample_noise_path: need >= 2 grid points");
  if (dt <= 0.0) throw std::invalid_argument("sample_noise_path: dt must be > 0");
  NoisePath path;
  path.t0 = t0;
  path.dt = dt;
  path.values.assign(n_points, 0.0);
  if (noise.kind == NoiseKind::none || noise.strength == 0.0) return path;
  if (noise.kind != NoiseKind::lorentzian)
    throw std::invalid_argument("sample_noise_path: only Lorentzian noise has a sampled path");

  double sigma = noise.strength / std::sqrt(2.0 * kPi);  // stationary std dev
  double rho = std::exp(-0.5 * noise.fwhm * dt);         // exact lag-1 correlation
  double innovation = sigma * std::sqrt(1.0 - rho * rho);
  Rng rng(rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  path.values[0] = sigma * normal(rng);
  for (std::size_t i = 1; i < n_points; ++i)
    path.values[i] = rho * path.values[i - 1] + innovation * normal(rng);
  return path;
}

}  // namespace superres
