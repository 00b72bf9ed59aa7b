#include "superres/control_optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "superres/dual.hpp"
#include "superres/filter_functions.hpp"

namespace superres {

namespace {

constexpr double kPi = std::numbers::pi;

struct QuadRule {
  std::vector<double> x, w;  // on [-1, 1]
};

QuadRule legendre_rule(int n) {
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// Fixed quadrature for \int_0^inf S(w) F(w) dw: graded panels over the
// Lorentzian head, coarser panels out to 8 wc where S F has fallen off as
// w^-4. White noise needs no nodes: \int F dw = pi T exactly by Parseval.
struct NoiseQuad {
  std::vector<double> omega, weight;  // weight includes S(omega)
  double constant = 0.0;              // waveform-independent part
};

NoiseQuad build_noise_quad(const NoiseModel& noise, double omega_c, double duration) {
  NoiseQuad q;
  if (noise.kind == NoiseKind::none || noise.strength == 0.0) return q;
  if (noise.kind == NoiseKind::white) {
    q.constant = noise.strength * kPi * duration;
    return q;
  }
  SpectralModel model = SpectralModel::from_noise(noise);
  static const QuadRule gl = legendre_rule(12);
  auto add_panel = [&](double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      double w = mid + half * gl.x[i];
      q.omega.push_back(w);
      q.weight.push_back(half * gl.w[i] * psd_value(model, w));
    }
  };
  double head = 4.0 * noise.fwhm;
  for (int i = 0; i < 4; ++i) add_panel(head * i / 4.0, head * (i + 1) / 4.0);
  double upper = 8.0 * omega_c;
  if (upper > head) {
    int panels = 8;
    for (int i = 0; i < panels; ++i)
      add_panel(head + (upper - head) * i / panels, head + (upper - head) * (i + 1) / panels);
  }
  return q;
}

template <class T>
ProfileT<T> build_profile(const std::vector<T>& c, const std::vector<Impulse>& impulses,
                          double duration) {
  int n = int(c.size());
  double h = duration / double(n);
  ProfileT<T> out;
  out.reserve(c.size());
  T theta{};
  std::size_t imp = 0;
  for (int j = 0; j < n; ++j) {
    double t0 = double(j) * h;
    while (imp < impulses.size() && impulses[imp].time <= t0 + 1e-9 * duration) {
      if (impulses[imp].time < t0 - 1e-9 * duration)
        throw std::invalid_argument("optimizer: impulse times must sit on cell boundaries");
      theta += T(0.5 * impulses[imp].angle);
      ++imp;
    }
    out.push_back({t0, h, theta, c[std::size_t(j)]});
    theta += T(h) * c[std::size_t(j)];
  }
  if (imp < impulses.size() && impulses[imp].time < duration - 1e-9 * duration)
    throw std::invalid_argument("optimizer: impulse times must sit on cell boundaries");
  return out;
}

template <class T>
struct TermsT {
  T curvature{}, noise_overlap{}, centroid{}, amplitude{}, fourth_order{}, smoothness{},
      total{};
};

template <class T>
TermsT<T> objective_t(const std::vector<T>& c, const ObjectiveWeights& weights,
                      const NoiseQuad& quad, double omega_c,
                      const std::vector<Impulse>& impulses, double duration) {
  ProfileT<T> profile = build_profile(c, impulses, duration);
  TermsT<T> terms;
  FF2T<T> center = ff2_eval(profile, omega_c);
  terms.curvature = -center.d2F;
  terms.centroid = T(weights.mu2) * center.F;
  if (weights.mu1 > 0.0) {
    T acc{};
    for (std::size_t i = 0; i < quad.omega.size(); ++i) {
      Cx<T> c0[1], s0[1];
      continuous_cs_moments(profile, quad.omega[i], 0, c0, s0);
      acc += T(quad.weight[i]) * (abs2(c0[0]) + abs2(s0[0]));
    }
    terms.noise_overlap = T(weights.mu1) * (acc + T(quad.constant));
  }
  if (weights.mu3 > 0.0) {
    T acc{};
    for (const T& v : c) acc += v * v;
    terms.amplitude = T(weights.mu3) * acc;
  }
  if (weights.mu4 > 0.0)
    terms.fourth_order = T(weights.mu4) * ff4_eval(profile, omega_c, omega_c);
  if (weights.mu5 > 0.0) {
    T acc{};
    for (std::size_t j = 0; j + 1 < c.size(); ++j) {
      T d = c[j + 1] - c[j];
      acc += d * d;
    }
    terms.smoothness = T(weights.mu5) * acc;
  }
  terms.total = terms.curvature + terms.noise_overlap + terms.centroid + terms.amplitude +
                terms.fourth_order + terms.smoothness;
  return terms;
}

ObjectiveBreakdown to_breakdown(const TermsT<double>& t) {
  return {t.curvature, t.noise_overlap, t.centroid, t.amplitude, t.fourth_order, t.smoothness,
          t.total};
}

std::vector<double> gradient_impl(const std::vector<double>& c, const ObjectiveWeights& weights,
                                  const NoiseQuad& quad, double omega_c,
                                  const std::vector<Impulse>& impulses, double duration) {
  std::vector<Dual> cd(c.begin(), c.end());
  std::vector<double> grad(c.size(), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    cd[j].d = 1.0;
    grad[j] = objective_t(cd, weights, quad, omega_c, impulses, duration).total.d;
    cd[j].d = 0.0;
  }
  return grad;
}

}  // namespace

void ObjectiveWeights::validate() const {
  if (mu1 < 0 || mu2 < 0 || mu3 < 0 || mu4 < 0 || mu5 < 0)
    throw std::invalid_argument("objective weights must be nonnegative");
}

ObjectiveWeights default_objective_weights() {
  // Calibrated at the kappa=4 c1-like seed with Lorentzian W = 0.1 wc, where
  // the curvature term is ~ -2.5e4: the chosen weights put every penalty
  // within one to two orders of magnitude of it.
  ObjectiveWeights w;
  w.mu1 = 2.0e4;
  w.mu2 = 1.0e3;
  w.mu3 = 8.0e2;
  w.mu4 = 1.0;
  w.mu5 = 1.0e2;
  return w;
}

ObjectiveBreakdown objective(const std::vector<double>& c_samples,
                             const ObjectiveWeights& weights, const NoiseModel& noise,
                             Rational kappa, double omega_c,
                             const std::vector<Impulse>& impulses) {
  weights.validate();
  if (c_samples.empty()) throw std::invalid_argument("objective: empty waveform");
  double duration = kappa.as_double() * 2.0 * kPi / omega_c;
  NoiseQuad quad = build_noise_quad(noise, omega_c, duration);
  return to_breakdown(objective_t(c_samples, weights, quad, omega_c, impulses, duration));
}

std::vector<double> gradient(const std::vector<double>& c_samples,
                             const ObjectiveWeights& weights, const NoiseModel& noise,
                             Rational kappa, double omega_c,
                             const std::vector<Impulse>& impulses) {
  weights.validate();
  if (c_samples.empty()) throw std::invalid_argument("gradient: empty waveform");
  double duration = kappa.as_double() * 2.0 * kPi / omega_c;
  NoiseQuad quad = build_noise_quad(noise, omega_c, duration);
  return gradient_impl(c_samples, weights, quad, omega_c, impulses, duration);
}

ControlProtocol make_optimizer_seed(Rational kappa, double omega_c, int n_cells, double v) {
  if (n_cells < 2 || n_cells % 2 != 0)
    throw std::invalid_argument("optimizer seed: n_cells must be even and >= 2");
  std::vector<double> c(std::size_t(n_cells), -0.5);
  c[std::size_t(n_cells / 2)] = v;
  double duration = kappa.as_double() * 2.0 * kPi / omega_c;
  ControlProtocol p = make_custom(kappa, omega_c, c, {{0.5 * duration, kPi}});
  p.kind = "custom";
  return p;
}

OptimizationReport optimize(const ControlProtocol& seed_protocol,
                            const ObjectiveWeights& weights, const NoiseModel& noise,
                            int iterations) {
  weights.validate();
  seed_protocol.validate();
  if (!seed_protocol.has_continuous())
    throw std::invalid_argument("optimize: seed protocol has no continuous part");
  double omega_c = seed_protocol.omega_c;
  double duration = seed_protocol.duration;
  const std::vector<Impulse>& impulses = seed_protocol.impulses;
  NoiseQuad quad = build_noise_quad(noise, omega_c, duration);

  auto eval = [&](const std::vector<double>& c) {
    return objective_t(c, weights, quad, omega_c, impulses, duration);
  };

  std::vector<double> x = seed_protocol.samples;
  TermsT<double> terms = eval(x);
  if (!std::isfinite(terms.total))
    throw std::invalid_argument("optimize: objective not finite at the seed");

  OptimizationReport report;
  report.initial_terms = to_breakdown(terms);
  report.initial_objective = terms.total;

  double step = 1e-4;
  std::vector<double> grad;
  int used = 0;
  for (int it = 0; it < iterations; ++it) {
    grad = gradient_impl(x, weights, quad, omega_c, impulses, duration);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    report.gradient_norm = gnorm;
    if (gnorm < 1e-10) break;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> trial = x;
      for (std::size_t j = 0; j < x.size(); ++j) trial[j] -= step * grad[j];
      TermsT<double> t = eval(trial);
      if (std::isfinite(t.total) && t.total < terms.total) {
        x = std::move(trial);
        terms = t;
        step *= 1.5;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    used = it + 1;
    if (!accepted) break;
  }
  report.iterations = used;

  // Gauss-Newton polish of the four real components of (C0, S0) at wc so the
  // centroid filter response vanishes to machine precision. Moves along the
  // least-norm direction, so the descent solution is disturbed minimally.
  for (int it = 0; it < 40; ++it) {
    ProfileT<double> profile = build_profile(x, impulses, duration);
    Cx<double> c0[1], s0[1];
    continuous_cs_moments(profile, omega_c, 0, c0, s0);
    double f_center = abs2(c0[0]) + abs2(s0[0]);
    if (f_center < 1e-24) break;
    Eigen::Vector4d r(c0[0].re, c0[0].im, s0[0].re, s0[0].im);
    Eigen::MatrixXd jac(4, int(x.size()));
    std::vector<Dual> cd(x.begin(), x.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
      cd[j].d = 1.0;
      ProfileT<Dual> pd = build_profile(cd, impulses, duration);
      Cx<Dual> cc[1], ss[1];
      continuous_cs_moments(pd, omega_c, 0, cc, ss);
      jac(0, int(j)) = cc[0].re.d;
      jac(1, int(j)) = cc[0].im.d;
      jac(2, int(j)) = ss[0].re.d;
      jac(3, int(j)) = ss[0].im.d;
      cd[j].d = 0.0;
    }
    Eigen::Matrix4d jjt = jac * jac.transpose();
    Eigen::Vector4d y = jjt.ldlt().solve(r);
    Eigen::VectorXd delta = jac.transpose() * y;
    double scale = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      std::vector<double> trial = x;
      for (std::size_t j = 0; j < x.size(); ++j) trial[j] -= scale * delta[int(j)];
      ProfileT<double> pt = build_profile(trial, impulses, duration);
      Cx<double> tc[1], ts[1];
      continuous_cs_moments(pt, omega_c, 0, tc, ts);
      if (abs2(tc[0]) + abs2(ts[0]) < f_center) {
        x = std::move(trial);
        moved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!moved) break;
  }

  terms = eval(x);
  report.final_terms = to_breakdown(terms);
  report.final_objective = terms.total;
  report.protocol = make_custom(seed_protocol.kappa, omega_c, x, impulses);
  report.optimality_residual = local_optimality_residual(report.protocol, weights.mu2);
  return report;
}

double local_optimality_residual(const ControlProtocol& protocol, double lambda_multiplier,
                                 int n_grid) {
  PhaseProfile profile = phase_profile(protocol);
  double T = protocol.duration;
  double wc = protocol.omega_c;
  static const QuadRule gl = legendre_rule(8);
  double max_r = 0.0;
  for (int i = 0; i <= n_grid; ++i) {
    double t = T * double(i) / double(n_grid);
    double th_t = profile.theta_at(t);
    double r = 0.0;
    for (const PhaseSegment& seg : profile.segments) {
      double mid = seg.t0 + 0.5 * seg.h, half = 0.5 * seg.h;
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        double t1 = mid + half * gl.x[k];
        double th1 = seg.theta0 + (t1 - seg.t0) * seg.slope;
        double d = t - t1;
        r += half * gl.w[k] * ((d * d + lambda_multiplier) * std::cos(wc * d) *
                               std::sin(2.0 * th1 - 2.0 * th_t));
      }
    }
    max_r = std::max(max_r, std::abs(r));
  }
  return max_r;
}

}  // namespace superres
