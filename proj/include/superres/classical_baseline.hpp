// Classical Fisher information for direct M-sample measurements of the raw
// two-tone signal: Gaussian block covariance Sigma = g^2 D D^T + g_l^2 V^-1,
// the trace formula FI = (N / 2M) Tr[(Sigma^-1 Sigma')^2], and the kappa = 1
// closed form used as an oracle.
#ifndef SUPERRES_CLASSICAL_BASELINE_HPP
#define SUPERRES_CLASSICAL_BASELINE_HPP

#include <vector>

#include <Eigen/Dense>

#include "superres/protocols.hpp"

namespace superres {

struct MeasurementBlock {
  std::vector<double> times;  // strictly increasing, within [0, kappa tau]
  double g = 0.1;
  double g_lambda = 0.0;
  double noise_fwhm = 0.1;  // W in the covariance e^{-W pi |ti - tj|}
  double omega_c = 1.0;
  Rational kappa{1, 1};
  double delta_omega = 0.0;

  double duration() const;
  int size() const { return int(times.size()); }
  void validate() const;
};

// Uniform sampling grid t_m = (m - 1) kappa tau / M, m = 1..M.
MeasurementBlock make_uniform_block(int m_samples, Rational kappa, double omega_c, double g,
                                    double g_lambda, double noise_fwhm, double delta_omega);

// Rows (cos w1 t_m, cos w2 t_m, sin w1 t_m, sin w2 t_m).
Eigen::MatrixXd design_matrix(const MeasurementBlock& block);

struct BlockCovariance {
  Eigen::MatrixXd d;        // M x 4 design matrix
  Eigen::MatrixXd v_inv;    // noise covariance e^{-W pi |ti - tj|}
  Eigen::MatrixXd sigma;    // g^2 D D^T + g_l^2 V^-1
  Eigen::MatrixXd d_sigma;  // entrywise d Sigma / d delta_omega, analytic
  bool ridged = false;      // tiny ridge added to a near-singular Sigma
};

BlockCovariance block_covariance(const MeasurementBlock& block);

// The appendix-style inverse Sigma^-1 = s - g_l^2 s (V + g_l^2 s)^-1 s with
// s = (D D^T)^-1, valid at g = 1 and invertible D; kept as a cross-check of
// the direct route.
Eigen::MatrixXd woodbury_inverse(const BlockCovariance& cov, double g_lambda);

// (N / 2M) Tr[(Sigma^-1 Sigma')^2]; n_total measurements grouped into
// N / M blocks.
double block_fisher_information(const MeasurementBlock& block, double n_total);

// kappa = 1, M = 4, no noise: FI = (N pi^2 / 8 wc^2)(2 csc^2(pi dw / 2 wc) - 1).
double classical_fi_closed_form_k1(double n_total, double omega_c, double delta_omega);

struct FisherCurve {
  double g_lambda = 0.0;
  std::vector<double> delta_omega;
  std::vector<double> fi_over_n;
};

std::vector<FisherCurve> fisher_sweep(const MeasurementBlock& block_template,
                                      const std::vector<double>& delta_omega_grid,
                                      const std::vector<double>& g_lambda_list);

}  // namespace superres

#endif
