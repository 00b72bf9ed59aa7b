#include "superres/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "superres/filter_functions.hpp"

namespace superres {

namespace {

// Signal value at time t for one realization.
double signal_value(const SignalRealization& r, const TwoToneSignal& s, double t) {
  return s.g * (r.a1 * std::cos(s.omega1() * t) + r.b1 * std::sin(s.omega1() * t) +
                r.a2 * std::cos(s.omega2() * t) + r.b2 * std::sin(s.omega2() * t));
}

double noise_value(const NoisePath& path, double t) {
  if (path.values.empty()) return 0.0;
  double x = (t - path.t0) / path.dt;
  auto i = std::size_t(std::clamp(x, 0.0, double(path.values.size() - 1)));
  if (i + 1 >= path.values.size()) return path.values.back();
  double frac = x - double(i);
  return path.values[i] * (1.0 - frac) + path.values[i + 1] * frac;
}

// GHZ-mode scaling: N_e entangled qubits square the decay exponent, which is
// the same as scaling the couplings by N_e (noise power by N_e^2).
TwoToneSignal scaled_signal(const TwoToneSignal& s, int ne) {
  TwoToneSignal out = s;
  out.g = s.g * double(ne);
  return out;
}
NoiseModel scaled_noise(const NoiseModel& n, int ne) {
  NoiseModel out = n;
  if (n.kind == NoiseKind::white)
    out.strength = n.strength * double(ne) * double(ne);
  else
    out.strength = n.strength * double(ne);
  return out;
}

std::int64_t sample_binomial(Rng& rng, std::int64_t n, double p) {
  p = std::clamp(p, 0.0, 1.0);
  double var = double(n) * p * (1.0 - p);
  if (var > 2500.0) {
    std::normal_distribution<double> z(double(n) * p, std::sqrt(var));
    double v = std::llround(z(rng));
    return std::int64_t(std::clamp(v, 0.0, double(n)));
  }
  std::binomial_distribution<std::int64_t> bin(n, p);
  return bin(rng);
}

}  // namespace

void ShotEngine::validate() const {
  protocol.validate();
  signal.validate();
  noise.validate();
  if (n_entangled < 1) throw std::invalid_argument("shot engine: n_entangled >= 1");
  if (n_entangled > 1 && !protocol.dephasing_preserving())
    throw std::invalid_argument(
        "shot engine: entangled mode needs a dephasing-preserving protocol");
  if (grid_steps < 16) throw std::invalid_argument("shot engine: grid_steps >= 16");
}

double shot_phase_instantaneous(const SignalRealization& realization,
                                const NoisePath& noise_path,
                                const SwitchingFunction& switching,
                                const TwoToneSignal& signal) {
  double phi = 0.0;
  for (int tone = 0; tone < 2; ++tone) {
    double omega = tone == 0 ? signal.omega1() : signal.omega2();
    double ic = 0.0, is = 0.0;
    int sign = 1;
    for (std::size_t j = 0; j + 1 < switching.breakpoints.size(); ++j, sign = -sign) {
      double t0 = switching.breakpoints[j], t1 = switching.breakpoints[j + 1];
      ic += sign * (std::sin(omega * t1) - std::sin(omega * t0)) / omega;
      is += sign * (std::cos(omega * t0) - std::cos(omega * t1)) / omega;
    }
    phi += signal.g * ((tone == 0 ? realization.a1 : realization.a2) * ic +
                       (tone == 0 ? realization.b1 : realization.b2) * is);
  }
  if (!noise_path.values.empty()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < noise_path.values.size(); ++i) {
      double t = noise_path.t0 + double(i) * noise_path.dt;
      double w = (i == 0 || i + 1 == noise_path.values.size()) ? 0.5 : 1.0;
      acc += w * switching.sign_at(t) * noise_path.values[i];
    }
    phi += acc * noise_path.dt;
  }
  return phi;
}

Mat2 shot_unitary_continuous(const SignalRealization& realization, const NoisePath& noise_path,
                             const ControlProtocol& protocol, const TwoToneSignal& signal,
                             int n_steps) {
  PhaseProfile profile = phase_profile(protocol);
  double T = protocol.duration;
  double h = T / double(n_steps);
  Mat2 u;
  std::size_t imp = 0, seg = 0;
  auto apply_x = [&](double angle) {
    std::complex<double> c = std::cos(0.5 * angle), s(0, -std::sin(0.5 * angle));
    Mat2 r{c * u.m00 + s * u.m10, c * u.m01 + s * u.m11,
           s * u.m00 + c * u.m10, s * u.m01 + c * u.m11};
    u = r;
  };
  for (int step = 0; step < n_steps; ++step) {
    double t0 = double(step) * h;
    while (imp < protocol.impulses.size() && protocol.impulses[imp].time <= t0 + 1e-12)
      apply_x(protocol.impulses[imp++].angle);
    double tm = t0 + 0.5 * h;
    while (seg + 1 < profile.segments.size() &&
           tm >= profile.segments[seg].t0 + profile.segments[seg].h)
      ++seg;
    double c = profile.segments.empty() ? 0.0 : profile.segments[seg].slope;
    double y = signal_value(realization, signal, tm) + noise_value(noise_path, tm);
    double om = std::sqrt(c * c + y * y);
    double ch = std::cos(om * h), sh = (om > 0.0) ? std::sin(om * h) / om : h;
    std::complex<double> d0(ch, -sh * y), d1(ch, sh * y), off(0, -sh * c);
    Mat2 r{d0 * u.m00 + off * u.m10, d0 * u.m01 + off * u.m11,
           off * u.m00 + d1 * u.m10, off * u.m01 + d1 * u.m11};
    u = r;
  }
  while (imp < protocol.impulses.size()) apply_x(protocol.impulses[imp++].angle);
  return u;
}

double shot_survival(const ShotEngine& engine, std::uint64_t seed) {
  SignalRealization realization = sample_signal(engine.signal, derive_seed(seed, 1, 0));
  NoisePath path;
  if (engine.noise.kind == NoiseKind::lorentzian && engine.noise.strength > 0.0) {
    std::size_t n = std::size_t(engine.grid_steps) + 1;
    path = sample_noise_path(engine.noise, 0.0, engine.protocol.duration / double(n - 1), n,
                             derive_seed(seed, 2, 0));
  } else if (engine.noise.kind == NoiseKind::white && engine.noise.strength > 0.0) {
    throw std::invalid_argument(
        "shot_survival: white noise has no pathwise sampler; use the closed-form sweep");
  }
  if (engine.protocol.dephasing_preserving()) {
    double phi = shot_phase_instantaneous(realization, path,
                                          switching_function(engine.protocol), engine.signal);
    double c = std::cos(double(engine.n_entangled) * phi);
    return c * c;
  }
  Mat2 u = shot_unitary_continuous(realization, path, engine.protocol, engine.signal,
                                   engine.grid_steps);
  std::complex<double> amp = 0.5 * (u.m00 + u.m01 + u.m10 + u.m11);
  return std::norm(amp);
}

int run_shot(const ShotEngine& engine, std::uint64_t seed) {
  double p = shot_survival(engine, seed);
  Rng rng = make_rng(seed, 3, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng) < p ? 1 : 0;
}

double mean_survival(const ShotEngine& engine, std::int64_t n_samples, std::uint64_t seed) {
  engine.validate();
  double acc = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i)
    acc += shot_survival(engine, derive_seed(seed, 4, std::uint64_t(i)));
  return acc / double(n_samples);
}

std::vector<TrialRecord> rmse_sweep(const ShotEngine& engine,
                                    const std::vector<double>& delta_omega_grid,
                                    const SweepConfig& config, std::uint64_t root_seed) {
  engine.validate();
  const ControlProtocol& protocol = engine.protocol;
  double g = engine.signal.g;
  double wc = engine.signal.omega_c;
  double kappa = protocol.kappa.as_double();

  TwoToneSignal sig_eff = scaled_signal(engine.signal, engine.n_entangled);
  NoiseModel noise_eff = scaled_noise(engine.noise, engine.n_entangled);
  ProtocolAnalysis analysis = expansion_coefficients(protocol, sig_eff.g, noise_eff);
  bool dp = protocol.dephasing_preserving();
  double chi_lambda = analysis.chi_lambda;

  std::vector<TrialRecord> records;
  records.reserve(delta_omega_grid.size() * std::size_t(config.n_repeats));
  for (std::size_t pi = 0; pi < delta_omega_grid.size(); ++pi) {
    double dw = delta_omega_grid[pi];
    double b_free = 2.0 * std::numbers::pi * std::numbers::pi * g * g * kappa * kappa /
                    std::pow(wc, 4);
    std::int64_t n;
    switch (config.rule) {
      case BudgetRule::n_free:
        n = std::int64_t(std::ceil(1.0 / (4.0 * b_free * config.delta * config.delta * dw * dw)));
        break;
      case BudgetRule::n_cpmg:
        n = std::int64_t(
            std::ceil(1.0 / (16.0 * b_free * config.delta * config.delta * dw * dw)));
        break;
      default:
        n = config.fixed_n;
    }
    n = std::max<std::int64_t>(1, n);
    if (config.n_cap > 0) n = std::min(n, config.n_cap);

    TwoToneSignal sig = sig_eff;
    sig.delta_omega = dw;
    double p_true;
    if (dp) {
      p_true = survival_probability(protocol, sig, noise_eff);
    } else {
      p_true = 0.5 + (survival_probability_continuous(protocol, sig).p - 0.5) *
                         std::exp(-chi_lambda);
    }

    for (int rep = 0; rep < config.n_repeats; ++rep) {
      std::uint64_t seed = derive_seed(root_seed, std::uint64_t(pi), std::uint64_t(rep));
      std::int64_t n_plus;
      if (config.mixture_shortcut) {
        Rng rng = make_rng(seed, 0, 0);
        n_plus = sample_binomial(rng, n, p_true);
      } else {
        n_plus = 0;
        ShotEngine shot_engine = engine;
        shot_engine.signal = sig;
        shot_engine.noise = noise_eff;
        for (std::int64_t s = 0; s < n; ++s)
          n_plus += run_shot(shot_engine, derive_seed(seed, 5, std::uint64_t(s)));
      }
      EstimateResult est = estimate_from_counts(analysis, n_plus, n);
      TrialRecord rec;
      rec.delta_omega = dw;
      rec.n_shots = n;
      rec.estimate = est.delta_omega;
      rec.relative_error = dw > 0.0 ? std::abs(est.delta_omega - dw) / dw : 0.0;
      rec.seed = seed;
      rec.abs_branch = est.abs_branch;
      records.push_back(rec);
    }
  }
  return records;
}

double relative_rmse(const std::vector<TrialRecord>& records, double delta_omega) {
  double acc = 0.0;
  std::int64_t count = 0;
  for (const TrialRecord& r : records) {
    if (r.delta_omega != delta_omega) continue;
    double e = r.estimate - delta_omega;
    acc += e * e;
    ++count;
  }
  if (count == 0 || delta_omega <= 0.0) return 0.0;
  return std::sqrt(acc / double(count)) / delta_omega;
}

}  // namespace superres
