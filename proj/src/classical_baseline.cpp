#include "superres/classical_baseline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace superres {

namespace {
constexpr double kPi = std::numbers::pi;
}

double MeasurementBlock::duration() const {
  return kappa.as_double() * 2.0 * kPi / omega_c;
}

void MeasurementBlock::validate() const {
  if (times.empty()) throw std::invalid_argument("measurement block: empty");
  if (g < 0.0 || g_lambda < 0.0 || noise_fwhm < 0.0)
    throw std::invalid_argument("measurement block: negative parameter");
  if (g == 0.0 && g_lambda == 0.0)
    throw std::invalid_argument("measurement block: singular covariance (g = g_lambda = 0)");
  double T = duration();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] > T + 1e-12)
      throw std::invalid_argument("measurement block: times outside [0, T]");
    if (i > 0 && times[i] <= times[i - 1])
      throw std::invalid_argument("measurement block: times must be strictly increasing");
  }
}

MeasurementBlock make_uniform_block(int m_samples, Rational kappa, double omega_c, double g,
                                    double g_lambda, double noise_fwhm, double delta_omega) {
  if (m_samples < 1) throw std::invalid_argument("measurement block: M >= 1");
  MeasurementBlock b;
  b.kappa = kappa;
  b.omega_c = omega_c;
  b.g = g;
  b.g_lambda = g_lambda;
  b.noise_fwhm = noise_fwhm;
  b.delta_omega = delta_omega;
  double T = b.duration();
  for (int m = 1; m <= m_samples; ++m) b.times.push_back(double(m - 1) * T / double(m_samples));
  return b;
}

Eigen::MatrixXd design_matrix(const MeasurementBlock& block) {
  block.validate();
  double w1 = block.omega_c - 0.5 * block.delta_omega;
  double w2 = block.omega_c + 0.5 * block.delta_omega;
  int m = block.size();
  Eigen::MatrixXd d(m, 4);
  for (int i = 0; i < m; ++i) {
    double t = block.times[std::size_t(i)];
    d(i, 0) = std::cos(w1 * t);
    d(i, 1) = std::cos(w2 * t);
    d(i, 2) = std::sin(w1 * t);
    d(i, 3) = std::sin(w2 * t);
  }
  return d;
}

BlockCovariance block_covariance(const MeasurementBlock& block) {
  block.validate();
  int m = block.size();
  BlockCovariance cov;
  cov.d = design_matrix(block);

  double w1 = block.omega_c - 0.5 * block.delta_omega;
  double w2 = block.omega_c + 0.5 * block.delta_omega;
  Eigen::MatrixXd dd(m, 4);  // d D / d delta_omega
  for (int i = 0; i < m; ++i) {
    double t = block.times[std::size_t(i)];
    dd(i, 0) = 0.5 * t * std::sin(w1 * t);
    dd(i, 1) = -0.5 * t * std::sin(w2 * t);
    dd(i, 2) = -0.5 * t * std::cos(w1 * t);
    dd(i, 3) = 0.5 * t * std::cos(w2 * t);
  }

  cov.v_inv.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      cov.v_inv(i, j) = std::exp(-block.noise_fwhm * kPi *
                                 std::abs(block.times[std::size_t(i)] -
                                          block.times[std::size_t(j)]));

  double g2 = block.g * block.g;
  double gl2 = block.g_lambda * block.g_lambda;
  cov.sigma = g2 * cov.d * cov.d.transpose() + gl2 * cov.v_inv;
  cov.d_sigma = g2 * (dd * cov.d.transpose() + cov.d * dd.transpose());

  // Near-singular Sigma (degenerate D with no noise): tiny ridge, flagged.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cov.sigma);
  double cond_floor = svd.singularValues()(0) * 1e-13;
  if (svd.singularValues()(m - 1) < cond_floor) {
    cov.sigma += (1e-12 * cov.sigma.trace()) * Eigen::MatrixXd::Identity(m, m);
    cov.ridged = true;
  }
  return cov;
}

Eigen::MatrixXd woodbury_inverse(const BlockCovariance& cov, double g_lambda) {
  Eigen::MatrixXd ddt = cov.d * cov.d.transpose();
  Eigen::MatrixXd s = ddt.inverse();
  double gl2 = g_lambda * g_lambda;
  Eigen::MatrixXd v = cov.v_inv.inverse();
  return s - gl2 * s * (v + gl2 * s).inverse() * s;
}

double block_fisher_information(const MeasurementBlock& block, double n_total) {
  BlockCovariance cov = block_covariance(block);
  int m = block.size();
  Eigen::MatrixXd a = cov.sigma.ldlt().solve(cov.d_sigma);
  double tr = (a * a).trace();
  return n_total / (2.0 * double(m)) * tr;
}

double classical_fi_closed_form_k1(double n_total, double omega_c, double delta_omega) {
  double s = std::sin(0.5 * kPi * delta_omega / omega_c);
  return n_total * kPi * kPi / (8.0 * omega_c * omega_c) * (2.0 / (s * s) - 1.0);
}

std::vector<FisherCurve> fisher_sweep(const MeasurementBlock& block_template,
                                      const std::vector<double>& delta_omega_grid,
                                      const std::vector<double>& g_lambda_list) {
  if (delta_omega_grid.empty() || g_lambda_list.empty())
    throw std::invalid_argument("fisher_sweep: empty grid");
  std::vector<FisherCurve> curves;
  for (double gl : g_lambda_list) {
    FisherCurve curve;
    curve.g_lambda = gl;
    for (double dw : delta_omega_grid) {
      MeasurementBlock b = block_template;
      b.g_lambda = gl;
      b.delta_omega = dw;
      curve.delta_omega.push_back(dw);
      curve.fi_over_n.push_back(block_fisher_information(b, 1.0));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace superres
