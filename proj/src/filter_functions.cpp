#include "superres/filter_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace superres {

namespace {

constexpr double kPi = std::numbers::pi;

struct Quad {
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
Quad gauss_legendre(int n) {
  Quad q;
  q.x.assign(std::size_t(n), 0.0);
  q.w.assign(std::size_t(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - double(j) * p2) / (double(j) + 1.0);
      }
      dp = double(n) * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[std::size_t(i)] = -x;
    q.x[std::size_t(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.w[std::size_t(i)] = w;
    q.w[std::size_t(n - 1 - i)] = w;
  }
  return q;
}

const Quad& panel_quad() {
  static const Quad q = gauss_legendre(12);
  return q;
}

// Composite Gauss-Legendre of fn over [a, b] with the given panel width.
template <class Fn>
double integrate_panels(Fn&& fn, double a, double b, double panel_width) {
  const Quad& q = panel_quad();
  int n_panels = std::max(1, int(std::ceil((b - a) / panel_width)));
  double h = (b - a) / double(n_panels);
  double total = 0.0;
  for (int p = 0; p < n_panels; ++p) {
    double lo = a + double(p) * h;
    double mid = lo + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i)
      acc += q.w[i] * fn(mid + 0.5 * h * q.x[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

// Generic second-order filter function for any protocol.
double ff_any(const ControlProtocol& protocol, double omega) {
  if (protocol.dephasing_preserving()) return ff_instantaneous(protocol, omega).F;
  return ff_continuous_order2(protocol, omega).F;
}

}  // namespace

void ff_instantaneous_moments(const ControlProtocol& protocol, double omega, int kmax,
                              Cx<double>* G) {
  SwitchingFunction f = switching_function(protocol);
  for (int k = 0; k <= kmax; ++k) G[k] = Cx<double>{};
  Cx<double> q[kMaxMoment + 1];
  int sign = 1;
  for (std::size_t j = 0; j + 1 < f.breakpoints.size(); ++j, sign = -sign) {
    double t0 = f.breakpoints[j];
    double h = f.breakpoints[j + 1] - t0;
    power_moments(omega, h, kmax, q);
    Cx<double> rot = cis(omega * t0);
    for (int k = 0; k <= kmax; ++k) {
      Cx<double> m{};
      double t0m = 1.0;
      for (int mm = k; mm >= 0; --mm) {
        m += (detail::kBinom[k][mm] * t0m) * q[mm];
        t0m *= t0;
      }
      Cx<double> phase = double(sign) * rot;
      for (int r = 0; r < k; ++r) phase = rot90(phase);
      G[k] += phase * m;
    }
  }
}

FFValue ff_instantaneous(const ControlProtocol& protocol, double omega) {
  Cx<double> G[3];
  ff_instantaneous_moments(protocol, omega, 2, G);
  FFValue out;
  out.F = abs2(G[0]);
  out.dF = 2.0 * (G[1] * conj(G[0])).re;
  out.d2F = 2.0 * (G[2] * conj(G[0])).re + 2.0 * abs2(G[1]);
  return out;
}

double ff_instantaneous_d4(const ControlProtocol& protocol, double omega) {
  Cx<double> G[5];
  ff_instantaneous_moments(protocol, omega, 4, G);
  return 2.0 * (G[4] * conj(G[0])).re + 8.0 * (G[3] * conj(G[1])).re + 6.0 * abs2(G[2]);
}

double ff_free_closed(double kappa, double omega_c, double omega) {
  double T = kappa * 2.0 * kPi / omega_c;
  if (omega == 0.0) return T * T;
  double r = std::sin(kPi * kappa * omega / omega_c) / omega;
  return 4.0 * r * r;
}

double ff_cpmg_closed(std::int64_t kappa, double omega_c, double omega) {
  if (omega == 0.0) return 0.0;
  double x = omega / omega_c;
  double c = std::cos(kPi * x);
  double r;
  if (std::abs(c) < 0.1) {
    // Near the sec poles x = m + 1/2 the product sec(pi x) sin(pi kappa x)
    // is a 0/0 ratio; with s the offset from the pole it equals
    // +/- sin(kappa s) / sin(s), which is benign (kappa even).
    double m = std::round(x - 0.5);
    double s = kPi * (x - (m + 0.5));
    r = (s == 0.0) ? double(kappa) : std::sin(double(kappa) * s) / std::sin(s);
  } else {
    r = std::sin(kPi * double(kappa) * x) / c;
  }
  double sh = std::sin(0.5 * kPi * x);
  double s2 = sh * sh;
  return 16.0 * r * r * s2 * s2 / (omega * omega);
}

double ff_qns_closed(int m_teeth, double duration, double omega) {
  if (omega == 0.0) return 0.0;
  double x = omega * duration / (4.0 * double(m_teeth));
  double c = std::cos(x);
  double r;  // sin(2 M x) / cos(x), stable near the poles of 1/cos
  if (std::abs(c) < 0.1) {
    double m = std::round(x / kPi - 0.5);
    double s = x - kPi * (m + 0.5);
    r = (s == 0.0) ? 2.0 * double(m_teeth) : std::sin(2.0 * double(m_teeth) * s) / std::sin(s);
  } else {
    r = std::sin(2.0 * double(m_teeth) * x) / c;
  }
  double sh = std::sin(0.5 * x);
  double s2 = sh * sh;
  return 16.0 * r * r * s2 * s2 / (omega * omega);
}

ProfileT<double> profile_of(const ControlProtocol& protocol) {
  PhaseProfile p = phase_profile(protocol);
  ProfileT<double> out;
  out.reserve(p.segments.size());
  for (const PhaseSegment& s : p.segments) out.push_back({s.t0, s.h, s.theta0, s.slope});
  return out;
}

FFValue ff_continuous_order2(const ControlProtocol& protocol, double omega, int n_steps) {
  ProfileT<double> prof = refine_profile(profile_of(protocol), n_steps, protocol.duration);
  FF2T<double> v = ff2_eval(prof, omega);
  return {v.F, v.dF, v.d2F};
}

double ff_continuous_order4(const ControlProtocol& protocol, double omega1, double omega2,
                            int n_steps) {
  ProfileT<double> prof = refine_profile(profile_of(protocol), n_steps, protocol.duration);
  return ff4_eval(prof, omega1, omega2);
}

OverlapResult overlap_chi(const ControlProtocol& protocol, const SpectralModel& model) {
  OverlapResult out;
  switch (model.kind) {
    case SpectralModel::Kind::zero:
      return out;
    case SpectralModel::Kind::two_tone: {
      // chi = (2/pi) * sum of mass_i * F(omega_i)
      for (const DeltaMass& m : psd_masses(model)) {
        double c = (2.0 / kPi) * m.weight * ff_any(protocol, m.omega);
        out.components.push_back(c);
        out.chi += c;
      }
      return out;
    }
    case SpectralModel::Kind::white:
      // Flat spectrum: the overlap collapses to 2 Gamma T by Parseval.
      out.chi = 2.0 * model.strength * protocol.duration;
      out.components = {out.chi};
      return out;
    case SpectralModel::Kind::lorentzian: {
      double T = protocol.duration;
      double w_scale = std::max({protocol.omega_c, model.fwhm, 1.0 / T});
      double omega_max = 400.0 * w_scale;
      double window = (2.0 / kPi) * integrate_panels(
          [&](double w) { return psd_value(model, w) * ff_any(protocol, w); },
          0.0, omega_max, std::min(kPi / T, 0.25 * std::max(model.fwhm, 1e-3 * w_scale)));
      // Tail: S ~ g^2 W / (2 pi w^2) and mean F ~ (4 M + 2) / w^2.
      double pulse_weight = 4.0 * double(protocol.impulses.size()) + 2.0;
      double tail = (2.0 / kPi) * model.strength * model.strength * model.fwhm /
                    (2.0 * kPi) * pulse_weight / (3.0 * omega_max * omega_max * omega_max);
      out.chi = window + tail;
      out.components = {window, tail};
      return out;
    }
  }
  return out;
}

double lorentzian_shape_constant(SequenceKind kind, double kappa, double w_tilde) {
  if (kappa <= 0.0) throw std::invalid_argument("shape constant: kappa must be > 0");
  if (w_tilde < 0.0) throw std::invalid_argument("shape constant: w_tilde must be >= 0");
  double a2 = 0.25 * w_tilde * w_tilde;
  auto lorentz = [&](double u) { return 1.0 / ((u * u + a2)); };
  double upper = std::max(600.0, 40.0 * kappa);
  if (kind == SequenceKind::free_evolution) {
    if (w_tilde == 0.0)
      throw std::invalid_argument("shape constant: free evolution diverges at w_tilde = 0");
    auto fn = [&](double u) {
      double s = (u == 0.0) ? kappa : std::sin(kappa * u) / u;
      return s * s * lorentz(u);
    };
    // The Lorentzian factor concentrates on a width w_tilde / 2 near zero;
    // resolve that region with graded panels before the oscillatory sweep.
    double split = std::min(4.0 * w_tilde, upper);
    double head = integrate_panels(fn, 0.0, split, std::max(w_tilde / 8.0, 1e-6));
    double rest = integrate_panels(fn, split, upper, kPi / 4.0);
    return 0.5 * (head + rest);
  }
  auto fn = [&](double u) {
    double c = std::cos(u);
    double r;
    if (std::abs(c) < 0.1) {
      double m = std::round(u / kPi - 0.5);
      double s = u - kPi * (m + 0.5);
      r = (s == 0.0) ? kappa : std::sin(kappa * s) / std::sin(s);
    } else {
      r = std::sin(kappa * u) / c;
    }
    double sh = std::sin(0.5 * u);
    double s2 = sh * sh;
    double uu = (u == 0.0) ? 1.0 : u * u;  // integrand -> 0 as u^2 at 0
    return s2 * s2 * r * r / uu * lorentz(u);
  };
  return 2.0 * integrate_panels(fn, 0.0, upper, kPi / 4.0);
}

double parseval_integral(const ControlProtocol& protocol, double omega_max) {
  if (!protocol.dephasing_preserving())
    throw std::invalid_argument("parseval_integral: pi-pulse protocols only");
  if (omega_max <= 0.0) omega_max = 2000.0 * std::max(1.0, protocol.omega_c);
  double T = protocol.duration;
  double window =
      2.0 * integrate_panels([&](double w) { return ff_instantaneous(protocol, w).F; }, 0.0,
                             omega_max, kPi / T);
  // Beyond the window, i omega G(omega) = sum_k c_k e^{i omega T_k} with
  // breakpoint coefficients c_k in {+/-1, +/-2}; integrate |.|^2 / omega^2
  // term by term (diagonal exact, cross terms by parts to O(omega_max^-3)).
  SwitchingFunction f = switching_function(protocol);
  std::vector<double> tk = f.breakpoints;
  std::vector<double> ck(tk.size());
  ck[0] = -1.0;
  for (std::size_t i = 1; i + 1 < tk.size(); ++i) ck[i] = 2.0 * ((i % 2 == 0) ? -1.0 : 1.0);
  ck[tk.size() - 1] = (tk.size() % 2 == 0) ? 1.0 : -1.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < tk.size(); ++i) tail += ck[i] * ck[i] / omega_max;
  for (std::size_t i = 0; i < tk.size(); ++i)
    for (std::size_t j = i + 1; j < tk.size(); ++j) {
      double d = tk[j] - tk[i];
      tail -= 2.0 * ck[i] * ck[j] * std::sin(omega_max * d) / (d * omega_max * omega_max);
    }
  return window + 2.0 * tail;
}

double ff_sup(const ControlProtocol& protocol) {
  double top = 0.0;
  const int n = 4096;
  for (int i = 1; i <= n; ++i) {
    double w = 4.0 * protocol.omega_c * double(i) / double(n);
    top = std::max(top, ff_any(protocol, w));
  }
  return top;
}

}  // namespace superres
