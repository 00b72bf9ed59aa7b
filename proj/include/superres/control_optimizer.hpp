// Waveform optimizer: deterministic first-order descent on a five-term
// objective over piecewise-constant drive amplitudes,
//   L = -F''(wc) + mu1 \int S F dw + mu2 F(wc) + mu3 ||c||^2
//       + mu4 F4(wc, wc) + mu5 ||c'||^2,
// followed by a Gauss-Newton polish that restores the F(wc) = 0 gate to
// machine precision. Gradients are exact (forward-mode duals through the
// cell-exact filter-function integrals).
#ifndef SUPERRES_CONTROL_OPTIMIZER_HPP
#define SUPERRES_CONTROL_OPTIMIZER_HPP

#include <vector>

#include "superres/protocols.hpp"
#include "superres/signal_models.hpp"

namespace superres {

struct ObjectiveWeights {
  double mu1 = 0.0;  // noise overlap \int S F dw
  double mu2 = 0.0;  // centroid-zero constraint F(wc)
  double mu3 = 0.0;  // amplitude norm ||c||^2
  double mu4 = 0.0;  // fourth-order filter magnitude F4(wc, wc)
  double mu5 = 0.0;  // smoothness ||c'||^2 (forward differences)

  void validate() const;
};

// Defaults from a calibration run at the c1-like seed (kappa = 4, Lorentzian
// W = 0.1 wc): each term lands within one to two orders of magnitude of the
// leading curvature term. Not a published set of values.
ObjectiveWeights default_objective_weights();

struct ObjectiveBreakdown {
  double curvature = 0.0;      // -F''(wc), weight 1
  double noise_overlap = 0.0;  // mu1 term
  double centroid = 0.0;       // mu2 term
  double amplitude = 0.0;      // mu3 term
  double fourth_order = 0.0;   // mu4 term
  double smoothness = 0.0;     // mu5 term
  double total = 0.0;
};

// c_samples is a piecewise-constant waveform on a uniform grid over
// [0, kappa 2 pi / omega_c]; impulse times must sit on cell boundaries.
ObjectiveBreakdown objective(const std::vector<double>& c_samples,
                             const ObjectiveWeights& weights, const NoiseModel& noise,
                             Rational kappa, double omega_c,
                             const std::vector<Impulse>& impulses = {});

std::vector<double> gradient(const std::vector<double>& c_samples,
                             const ObjectiveWeights& weights, const NoiseModel& noise,
                             Rational kappa, double omega_c,
                             const std::vector<Impulse>& impulses = {});

struct OptimizationReport {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  ObjectiveBreakdown initial_terms;
  ObjectiveBreakdown final_terms;
  int iterations = 0;
  double gradient_norm = 0.0;  // at exit
  ControlProtocol protocol;
  double optimality_residual = 0.0;  // max |r(t)| after optimization
};

// Seed waveform c = (-1/2, ..., v, ..., -1/2) with v in the middle cell, plus
// the pi impulse at T/2 (n_cells must be even so the impulse sits on a cell
// boundary).
ControlProtocol make_optimizer_seed(Rational kappa, double omega_c, int n_cells, double v);

// Backtracking gradient descent, then a Gauss-Newton polish of the four real
// components of the centroid filter response so the optimized protocol passes
// the superresolution gate exactly. Throws if the seed objective is not
// finite.
OptimizationReport optimize(const ControlProtocol& seed_protocol,
                            const ObjectiveWeights& weights, const NoiseModel& noise,
                            int iterations);

// max_t |r(t)| with r(t) = \int ((t - t1)^2 + lambda) cos(wc (t - t1))
//                               sin(2 theta(t1) - 2 theta(t)) dt1;
// zero (to quadrature tolerance) iff the protocol is a critical point of the
// curvature objective. Pi-pulse protocols give r = 0 identically.
double local_optimality_residual(const ControlProtocol& protocol, double lambda_multiplier,
                                 int n_grid = 200);

}  // namespace superres

#endif
