// Shot-level protocol simulator and RMSE experiment sweeps.
//
// Two evaluation routes:
//  * honest per-shot physics: sample the tone amplitudes (and a noise path),
//    compute the survival probability for that realization (exact phase
//    integrals for pi-pulse protocols, 2x2 propagators for continuous
//    control), draw the Bernoulli outcome;
//  * exact mixture shortcut for sweeps: independent shots with independent
//    realizations make the plus-count exactly Binomial(N, <P>), so large-N
//    experiments can draw the count directly from the closed-form mean.
#ifndef SUPERRES_MONTE_CARLO_HPP
#define SUPERRES_MONTE_CARLO_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "superres/estimation.hpp"
#include "superres/protocols.hpp"
#include "superres/rng.hpp"
#include "superres/signal_models.hpp"

namespace superres {

struct ShotEngine {
  ControlProtocol protocol;
  TwoToneSignal signal;
  NoiseModel noise;
  int n_entangled = 1;
  int grid_steps = 4096;  // continuous-propagator cells per shot

  void validate() const;
};

// Toggling-frame phase accumulated by one realization under a pi-pulse
// protocol: exact segment integrals for the tones, trapezoid quadrature on
// the sampled noise path (pass an empty path for no noise).
double shot_phase_instantaneous(const SignalRealization& realization,
                                const NoisePath& noise_path,
                                const SwitchingFunction& switching,
                                const TwoToneSignal& signal);

struct Mat2 {
  std::complex<double> m00{1, 0}, m01{0, 0}, m10{0, 0}, m11{1, 0};
};

// Lab-frame propagator for one realization: per-cell closed-form
// exp(-i dt (y sz + c sx)) with midpoint signal/noise values, interleaved
// with impulse x-rotations.
Mat2 shot_unitary_continuous(const SignalRealization& realization, const NoisePath& noise_path,
                             const ControlProtocol& protocol, const TwoToneSignal& signal,
                             int n_steps);

// Survival probability for one sampled realization (and noise), before the
// Bernoulli draw. Exposed so sweeps can average it directly.
double shot_survival(const ShotEngine& engine, std::uint64_t seed);

int run_shot(const ShotEngine& engine, std::uint64_t seed);

// Mean of the per-realization survival probability over n_samples draws;
// with common random numbers across calls (same seed) this gives a
// low-variance route to finite differences of <P>.
double mean_survival(const ShotEngine& engine, std::int64_t n_samples, std::uint64_t seed);

struct TrialRecord {
  double delta_omega = 0.0;
  std::int64_t n_shots = 0;
  double estimate = 0.0;
  double relative_error = 0.0;
  std::uint64_t seed = 0;
  bool abs_branch = false;
};

enum class BudgetRule { n_free, n_cpmg, fixed };

struct SweepConfig {
  BudgetRule rule = BudgetRule::n_free;
  double delta = 0.1;        // target relative error used by the budget
  std::int64_t fixed_n = 0;  // BudgetRule::fixed
  int n_repeats = 100;
  std::int64_t n_cap = 0;    // 0 = uncapped (mixture shortcut makes N free)
  bool mixture_shortcut = true;
};

std::vector<TrialRecord> rmse_sweep(const ShotEngine& engine,
                                    const std::vector<double>& delta_omega_grid,
                                    const SweepConfig& config, std::uint64_t root_seed);

// Root-mean-square relative error over the repeats at one grid point.
double relative_rmse(const std::vector<TrialRecord>& records, double delta_omega);

}  // namespace superres

#endif
