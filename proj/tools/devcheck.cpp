// Scratch numerical cross-checks for the core integral machinery. Not a unit
// test; prints diagnostics so conventions and constants can be pinned before
// the real test suite depends on them.
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "superres/classical_baseline.hpp"
#include "superres/control_optimizer.hpp"
#include "superres/filter_functions.hpp"
#include "superres/monte_carlo.hpp"
#include "superres/protocols.hpp"

using namespace superres;

namespace {
constexpr double kPi = std::numbers::pi;

double brute_q(double p, double h, int k, bool imag_part) {
  // Simpson with many panels
  int n = 20000;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double u = h * double(i) / n;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double f = std::pow(u, k) * (imag_part ? std::sin(p * u) : std::cos(p * u));
    acc += w * f;
  }
  return acc * h / (3.0 * n);
}

void check_moments() {
  std::printf("== power moments vs brute force ==\n");
  for (double p : {0.001, 0.3, 2.5, 40.0}) {
    for (double h : {0.01, 1.0, 3.0}) {
      Cx<double> q[5];
      power_moments(p, h, 4, q);
      double worst = 0.0;
      for (int k = 0; k <= 4; ++k) {
        worst = std::max(worst, std::abs(q[k].re - brute_q(p, h, k, false)));
        worst = std::max(worst, std::abs(q[k].im - brute_q(p, h, k, true)));
      }
      std::printf("  p=%7.3f h=%5.2f worst abs err %.3e\n", p, h, worst);
    }
  }
  // E2 vs brute double integral
  std::printf("== ordered pair integral vs brute force ==\n");
  for (double p : {0.01, 1.7, 12.0}) {
    for (double q : {0.003, 0.9, -7.0}) {
      double h = 1.3;
      Cx<double> e = ordered_pair_integral(p, q, h);
      std::complex<double> acc = 0.0;
      int n = 3000;
      for (int i = 0; i < n; ++i) {
        double u = h * (i + 0.5) / n;
        std::complex<double> inner =
            (std::abs(q) > 1e-12)
                ? (std::exp(std::complex<double>(0, q * u)) - 1.0) / std::complex<double>(0, q)
                : std::complex<double>(u, 0);
        acc += std::exp(std::complex<double>(0, p * u)) * inner * (h / n);
      }
      std::printf("  p=%6.2f q=%6.3f err %.3e\n", p, q,
                  std::abs(std::complex<double>(e.re, e.im) - acc));
    }
  }
}

void check_closed_forms() {
  std::printf("== generic vs closed forms (relative err, 400 random omegas) ==\n");
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uomega(1e-6, 5.0);
  double omega_c = 1.0;
  {
    auto p = make_free(Rational{3, 1}, omega_c);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      double w = uomega(rng);
      double a = ff_instantaneous(p, w).F;
      double b = ff_free_closed(3.0, omega_c, w);
      double tol = std::max(std::abs(a), std::abs(b)) + 1e-16 * p.duration * p.duration;
      worst = std::max(worst, std::abs(a - b) / tol);
    }
    std::printf("  free kappa=3: %.3e\n", worst);
  }
  {
    auto p = make_cpmg(Rational{4, 1}, omega_c);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      double w = uomega(rng);
      double a = ff_instantaneous(p, w).F;
      double b = ff_cpmg_closed(4, omega_c, w);
      double tol = std::max(std::abs(a), std::abs(b)) + 1e-16 * p.duration * p.duration;
      worst = std::max(worst, std::abs(a - b) / tol);
    }
    // also directly at near-pole frequencies
    for (int k = 0; k < 8; ++k) {
      double w = (k + 0.5) + 1e-9;
      double a = ff_instantaneous(p, w).F;
      double b = ff_cpmg_closed(4, omega_c, w);
      worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
    std::printf("  cpmg kappa=4 (incl poles): %.3e\n", worst);
  }
  {
    auto p = make_qns_comb(3, 11.0);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      double w = uomega(rng) * 2.0;
      double a = ff_instantaneous(p, w).F;
      double b = ff_qns_closed(3, 11.0, w);
      double tol = std::max(std::abs(a), std::abs(b)) + 1e-16 * p.duration * p.duration;
      worst = std::max(worst, std::abs(a - b) / tol);
    }
    std::printf("  qns M=3: %.3e\n", worst);
  }
}

void check_curvatures() {
  std::printf("== curvatures at omega_c ==\n");
  double omega_c = 1.0;
  for (std::int64_t kap : {2, 4, 6}) {
    auto pf = make_free(Rational{kap, 1}, omega_c);
    auto pc = make_cpmg(Rational{kap, 1}, omega_c);
    FFValue vf = ff_instantaneous(pf, omega_c);
    FFValue vc = ff_instantaneous(pc, omega_c);
    double expect_free = 8.0 * kPi * kPi * double(kap * kap);
    std::printf("  kappa=%lld: F_free(wc)=%.3e d2F_free=%.12f expect=%.12f ratio_cpmg=%.12f\n",
                (long long)kap, vf.F, vf.d2F, expect_free, vc.d2F / vf.d2F);
  }
  // derivative self-consistency via finite differences
  auto p = make_cpmg(Rational{4, 1}, omega_c);
  double w0 = 1.37;
  double h = 5e-3;
  FFValue v = ff_instantaneous(p, w0);
  double fd1 = (ff_instantaneous(p, w0 + h).F - ff_instantaneous(p, w0 - h).F) / (2 * h);
  double fd2 =
      (ff_instantaneous(p, w0 + h).F - 2 * v.F + ff_instantaneous(p, w0 - h).F) / (h * h);
  double fd4 = (ff_instantaneous(p, w0 + 2 * h).F - 4 * ff_instantaneous(p, w0 + h).F +
                6 * v.F - 4 * ff_instantaneous(p, w0 - h).F + ff_instantaneous(p, w0 - 2 * h).F) /
               (h * h * h * h);
  std::printf("  dF err %.3e  d2F err %.3e  d4F err %.3e\n", std::abs(v.dF - fd1),
              std::abs(v.d2F - fd2), std::abs(ff_instantaneous_d4(p, w0) - fd4));
}

void check_continuous_reduction() {
  std::printf("== generalized FF reduces to instantaneous for pi-pulse protocols ==\n");
  auto p = make_cpmg(Rational{4, 1}, 1.0);
  double worst = 0.0, worst4 = 0.0;
  for (double w : {0.11, 0.5, 1.0, 1.49999, 2.7}) {
    FFValue a = ff_instantaneous(p, w);
    FFValue b = ff_continuous_order2(p, w);
    worst = std::max({worst, std::abs(a.F - b.F), std::abs(a.dF - b.dF) * 1e-2,
                      std::abs(a.d2F - b.d2F) * 1e-3});
    double f4 = ff_continuous_order4(p, w, 1.3 * w);
    double expect = 3.0 * a.F * ff_instantaneous(p, 1.3 * w).F;
    worst4 = std::max(worst4, std::abs(f4 - expect) / std::max(1.0, std::abs(expect)));
  }
  std::printf("  order2 worst %.3e   order4 vs 3 F1 F2 worst rel %.3e\n", worst, worst4);
}

void check_c1() {
  std::printf("== c1 protocol ==\n");
  for (std::int64_t kap : {2, 4}) {
    auto p = make_c1(Rational{kap, 1}, 1.0);
    FFValue v = ff_continuous_order2(p, 1.0);
    double expect = kPi * kPi * kPi * kPi * double(kap * kap * kap * kap);
    double f4 = ff_continuous_order4(p, 1.0, 1.0);
    double f4r = ff_continuous_order4(p, 1.0, 1.0, 4 * int(p.samples.size()) + 64);
    std::printf("  kappa=%lld: F(wc)=%.3e dF=%.3e d2F=%.10f expect_d2F=%.10f\n",
                (long long)kap, v.F, v.dF, v.d2F, expect);
    // decompose into unordered and ordered parts to settle the sign choice
    ProfileT<double> pr = profile_of(p);
    Cx<double> c0[1], s0[1];
    continuous_cs_moments(pr, 1.0, 0, c0, s0);
    double f2w = abs2(c0[0]) + abs2(s0[0]);
    Cx<double> z1 = c0[0] * c0[0] + s0[0] * s0[0];
    Cx<double> z2 = conj(c0[0]) * c0[0] + conj(s0[0]) * s0[0];
    double phi = f2w * f2w + abs2(z1) + abs2(z2);
    double ordered = (phi - f4) / 3.0;  // current coeff is -3
    std::printf("            F4(wc,wc)=%.6f refined=%.6f unordered=%.6f ordered=%.6f"
                " F4(+3)=%.6f\n", f4, f4r, phi, ordered, phi + 3.0 * ordered);
  }
  // Dual tangent vs finite difference through ff2/ff4
  auto p = make_c1(Rational{2, 1}, 1.0);
  ProfileT<double> prof = profile_of(p);
  ProfileT<Dual> dprof;
  for (auto& s : prof) dprof.push_back({s.t0, s.h, Dual(s.theta0), Dual(s.slope, 1.0)});
  // theta0 of later segments depends on earlier slopes; c1 has slope shared
  // across both segments, so theta0 of segment 2 carries tangent slope*t
  for (std::size_t i = 1; i < dprof.size(); ++i)
    dprof[i].theta0 = Dual(prof[i].theta0, prof[i].t0);
  FF2T<Dual> dv = ff2_eval(dprof, 1.0);
  Dual d4 = ff4_eval(dprof, 1.0, 1.0);
  double eps = 1e-6;
  auto perturbed = [&](double delta) {
    ProfileT<double> q = prof;
    for (auto& s : q) {
      s.theta0 += delta * s.t0;
      s.slope += delta;
    }
    return q;
  };
  double fdF = (ff2_eval(perturbed(eps), 1.3).F - ff2_eval(perturbed(-eps), 1.3).F) / (2 * eps);
  FF2T<Dual> dv13 = ff2_eval(dprof, 1.3);
  double fd4 = (ff4_eval(perturbed(eps), 1.0, 1.0) - ff4_eval(perturbed(-eps), 1.0, 1.0)) / (2 * eps);
  double fd4b =
      (ff4_eval(perturbed(10 * eps), 1.0, 1.0) - ff4_eval(perturbed(-10 * eps), 1.0, 1.0)) /
      (20 * eps);
  std::printf("  dual dF2/dc(w=1.3)=%.8f fd=%.8f   dF4/dc=%.6f fd=%.6f fd(10eps)=%.6f\n",
              dv13.F.d, fdF, d4.d, fd4, fd4b);
  (void)dv;
  // direct dual check on the ordered pair integral
  {
    Dual p1(0.37, 1.0), q1(0.9, -2.0);
    Cx<Dual> e = ordered_pair_integral(p1, q1, 1.3);
    double de = 1e-6;
    Cx<double> ep = ordered_pair_integral(0.37 + de, 0.9 - 2 * de, 1.3);
    Cx<double> em = ordered_pair_integral(0.37 - de, 0.9 + 2 * de, 1.3);
    std::printf("  dual E2 tangent (%.8f, %.8f) fd (%.8f, %.8f)\n", e.re.d, e.im.d,
                (ep.re - em.re) / (2 * de), (ep.im - em.im) / (2 * de));
  }
}

void check_parseval_and_overlap() {
  std::printf("== parseval ==\n");
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 3; ++trial) {
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    int n_pulse = 3 + trial * 2;
    std::vector<double> times;
    for (int i = 0; i < n_pulse; ++i) times.push_back(ut(rng));
    std::sort(times.begin(), times.end());
    auto kappa = Rational{2, 1};
    double T = kappa.as_double() * 2.0 * kPi;
    std::vector<Impulse> imp;
    for (double t : times) imp.push_back({t * T, kPi});
    auto p = make_custom(kappa, 1.0, {}, imp);
    double val = parseval_integral(p);
    std::printf("  random %d-pulse: integral/2piT - 1 = %.3e\n", n_pulse,
                val / (2.0 * kPi * T) - 1.0);
  }
  std::printf("== lorentzian shape constants ==\n");
  std::printf("  cpmg f(2,0)=%.8f  pi/6=%.8f\n",
              lorentzian_shape_constant(SequenceKind::cpmg, 2.0, 0.0), kPi / 6.0);
  std::printf("  cpmg f(4,0)=%.8f  pi/3=%.8f\n",
              lorentzian_shape_constant(SequenceKind::cpmg, 4.0, 0.0), kPi / 3.0);
  std::printf("  cpmg f(6,0)=%.8f  pi/2=%.8f\n",
              lorentzian_shape_constant(SequenceKind::cpmg, 6.0, 0.0), kPi / 2.0);
  double wt = 0.3;
  std::printf("  free f(3,0.3)=%.6f  bound pi k^2/(2wt)=%.6f\n",
              lorentzian_shape_constant(SequenceKind::free_evolution, 3.0, wt),
              kPi * 9.0 / (2.0 * wt));
  // chi cross-check: quadrature overlap vs (8 wt glam^2 / wc^2) f
  NoiseModel nm{NoiseKind::lorentzian, 0.02, 0.1};
  auto pc = make_cpmg(Rational{4, 1}, 1.0);
  double chi_quad = overlap_chi(pc, SpectralModel::from_noise(nm)).chi;
  double wtild = kPi * nm.fwhm / 1.0;
  double chi_f = 8.0 * wtild * nm.strength * nm.strength *
                 lorentzian_shape_constant(SequenceKind::cpmg, 4.0, wtild);
  std::printf("  chi quad=%.10e  via f=%.10e  rel diff=%.3e\n", chi_quad, chi_f,
              chi_quad / chi_f - 1.0);
  auto pf = make_free(Rational{4, 1}, 1.0);
  double chi_quad_f = overlap_chi(pf, SpectralModel::from_noise(nm)).chi;
  double chi_f_f = 8.0 * wtild * nm.strength * nm.strength *
                   lorentzian_shape_constant(SequenceKind::free_evolution, 4.0, wtild);
  std::printf("  free: chi quad=%.10e  via f=%.10e  rel diff=%.3e\n", chi_quad_f, chi_f_f,
              chi_quad_f / chi_f_f - 1.0);
}

// Non-circular truth for the fourth-order sign: integrate the Schrodinger
// equation for the c1 protocol with a single tone at omega_c and average the
// survival probability over the Gaussian quadratures.
double survival_mc(const ControlProtocol& p, double g, double omega) {
  PhaseProfile prof = phase_profile(p);
  int per_axis = 48;
  // Gauss-Hermite-like: Gauss-Legendre on [-6, 6] against the normal pdf
  std::vector<double> nodes, wts;
  int panels = 12, order = 4;
  for (int pa = 0; pa < panels; ++pa) {
    double lo = -6.0 + 12.0 * pa / panels, hi = lo + 12.0 / panels;
    // 4-pt GL
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    for (int i = 0; i < order; ++i) {
      double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i];
      double w = 0.5 * (hi - lo) * gw[i] * std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
      nodes.push_back(x);
      wts.push_back(w);
    }
  }
  (void)per_axis;
  double T = p.duration;
  int n_steps = 4096;
  double h = T / n_steps;
  double mean = 0.0;
  for (std::size_t ia = 0; ia < nodes.size(); ++ia) {
    for (std::size_t ib = 0; ib < nodes.size(); ++ib) {
      double a = nodes[ia], b = nodes[ib];
      // state |+x>, propagate H = c(t) sx + y(t) sz; impulses as instant x-rotations
      std::complex<double> u(1.0 / std::sqrt(2.0), 0.0), v = u;
      std::size_t imp = 0;
      for (int s = 0; s < n_steps; ++s) {
        double t0 = s * h;
        while (imp < p.impulses.size() && p.impulses[imp].time <= t0 + 1e-12) {
          double half = 0.5 * p.impulses[imp].angle;
          std::complex<double> c = std::cos(half), si(0, -std::sin(half));
          std::complex<double> nu = c * u + si * v, nv = si * u + c * v;
          u = nu;
          v = nv;
          ++imp;
        }
        double tm = t0 + 0.5 * h;
        double c_amp = 0.0;
        for (const auto& seg : prof.segments)
          if (tm >= seg.t0 && tm < seg.t0 + seg.h) c_amp = seg.slope;
        double y = g * (a * std::cos(omega * tm) + b * std::sin(omega * tm));
        double om = std::sqrt(c_amp * c_amp + y * y);
        double ch = std::cos(om * h), sh = (om > 0) ? std::sin(om * h) / om : h;
        // exp(-i h (c sx + y sz))
        std::complex<double> m00(ch, -sh * y), m01(0, -sh * c_amp);
        std::complex<double> m10(0, -sh * c_amp), m11(ch, sh * y);
        std::complex<double> nu = m00 * u + m01 * v, nv = m10 * u + m11 * v;
        u = nu;
        v = nv;
      }
      while (imp < p.impulses.size()) {
        double half = 0.5 * p.impulses[imp].angle;
        std::complex<double> c = std::cos(half), si(0, -std::sin(half));
        std::complex<double> nu = c * u + si * v, nv = si * u + c * v;
        u = nu;
        v = nv;
        ++imp;
      }
      std::complex<double> amp = (u + v) / std::sqrt(2.0);
      mean += wts[ia] * wts[ib] * std::norm(amp);
    }
  }
  return mean;
}

void check_f4_sign() {
  std::printf("== fourth-order sign vs unitary truth (c1, kappa=2, single tone) ==\n");
  auto p = make_c1(Rational{2, 1}, 1.0);
  double f2 = ff_continuous_order2(p, 1.0).F;
  double f4 = ff_continuous_order4(p, 1.0, 1.0);
  std::printf("  F2(wc)=%.3e F4(wc,wc)=%.6f\n", f2, f4);
  // Two coincident tones are one tone with amplitude g*sqrt(2); simulate that
  // so the fitted coefficients line up with the two-tone expansion.
  double g1 = 0.05, g2 = 0.075, g3 = 0.1;
  double s2 = std::sqrt(2.0);
  double p1 = survival_mc(p, g1 * s2, 1.0);
  double p2 = survival_mc(p, g2 * s2, 1.0);
  double p3 = survival_mc(p, g3 * s2, 1.0);
  // fit 1 - P = c2 g^2 + c4 g^4 + c6 g^6
  double a11 = g1 * g1, a12 = a11 * a11, a13 = a12 * a11;
  double a21 = g2 * g2, a22 = a21 * a21, a23 = a22 * a21;
  double a31 = g3 * g3, a32 = a31 * a31, a33 = a32 * a31;
  double b1 = 1 - p1, b2 = 1 - p2, b3 = 1 - p3;
  // Cramer
  double det = a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) +
               a13 * (a21 * a32 - a22 * a31);
  double c2 = (b1 * (a22 * a33 - a23 * a32) - a12 * (b2 * a33 - a23 * b3) +
               a13 * (b2 * a32 - a22 * b3)) / det;
  double c4 = (a11 * (b2 * a33 - a23 * b3) - b1 * (a21 * a33 - a23 * a31) +
               a13 * (a21 * b3 - b2 * a31)) / det;
  double c6 = (a11 * (a22 * b3 - b2 * a32) - a12 * (a21 * b3 - b2 * a31) +
               b1 * (a21 * a32 - a22 * a31)) / det;
  std::printf("  1-P fit: c2=%.4e c4=%.4f c6=%.4e\n", c2, c4, c6);
  std::printf("  expected c2=2*F2=%.4e; c4 vs (2/3)F4=%.4f (sign convention check)\n",
              2.0 * f2, (2.0 / 3.0) * f4);
}

void check_monte_carlo() {
  std::printf("monte carlo:\n");
  // DP route, noiseless: sampled mean survival vs the closed exp form.
  {
    ShotEngine e;
    e.protocol = make_cpmg(Rational{2, 1}, 1.0);
    e.signal = TwoToneSignal{0.1, 1.0, 0.3};
    e.noise = NoiseModel{};
    double mc = mean_survival(e, 40000, 11);
    double cf = survival_probability(e.protocol, e.signal, e.noise);
    std::printf("  cpmg noiseless: mc=%.5f closed=%.5f diff=%.2e\n", mc, cf, mc - cf);
  }
  // DP route with a sampled Lorentzian path vs the overlap-quadrature form.
  {
    ShotEngine e;
    e.protocol = make_cpmg(Rational{2, 1}, 1.0);
    e.signal = TwoToneSignal{0.05, 1.0, 0.2};
    e.noise = NoiseModel{NoiseKind::lorentzian, 0.08, 0.1};
    e.grid_steps = 2048;
    double mc = mean_survival(e, 40000, 12);
    double cf = survival_probability(e.protocol, e.signal, e.noise);
    std::printf("  cpmg lorentzian: mc=%.5f closed=%.5f diff=%.2e\n", mc, cf, mc - cf);
  }
  // Continuous route vs the truncated formula (agreement limited by the
  // truncation itself at this g).
  {
    ShotEngine e;
    e.protocol = make_c1(Rational{2, 1}, 1.0);
    e.signal = TwoToneSignal{0.05, 1.0, 0.2};
    e.grid_steps = 1024;
    double mc = mean_survival(e, 20000, 13);
    double cf = survival_probability_continuous(e.protocol, e.signal).p;
    std::printf("  c1 continuous: mc=%.5f truncated=%.5f diff=%.2e\n", mc, cf, mc - cf);
  }
  // Entangled blocks: P = cos^2(Ne phi), mean = 1/2 + 1/2 exp(-Ne^2 chi).
  {
    ShotEngine e;
    e.protocol = make_cpmg(Rational{2, 1}, 1.0);
    e.signal = TwoToneSignal{0.05, 1.0, 0.2};
    e.n_entangled = 2;
    double mc = mean_survival(e, 40000, 14);
    TwoToneSignal s2 = e.signal;
    s2.g *= 2.0;
    double cf = survival_probability(e.protocol, s2, e.noise);
    std::printf("  entangled Ne=2: mc=%.5f scaled-closed=%.5f diff=%.2e\n", mc, cf, mc - cf);
  }
  // Shot mode vs mixture shortcut on a small fixed budget.
  {
    ShotEngine e;
    e.protocol = make_free(Rational{1, 1}, 1.0);
    e.signal = TwoToneSignal{0.1, 1.0, 5e-3};
    SweepConfig cfg;
    cfg.rule = BudgetRule::fixed;
    cfg.fixed_n = 400;
    cfg.n_repeats = 60;
    cfg.mixture_shortcut = false;
    auto shots = rmse_sweep(e, {5e-3}, cfg, 21);
    cfg.mixture_shortcut = true;
    cfg.n_repeats = 400;
    auto mix = rmse_sweep(e, {5e-3}, cfg, 22);
    std::printf("  fixed N=400 rmse: shot=%.4f mixture=%.4f\n",
                relative_rmse(shots, 5e-3), relative_rmse(mix, 5e-3));
  }
  // Budgeted sweeps, expected ~0.10 (free) and ~0.05 (cpmg under N_free).
  {
    SweepConfig cfg;
    cfg.n_repeats = 400;
    std::vector<double> grid{1e-3, 3e-3, 1e-2};
    ShotEngine fe;
    fe.protocol = make_free(Rational{1, 1}, 1.0);
    fe.signal = TwoToneSignal{0.1, 1.0, 1e-3};
    auto rf = rmse_sweep(fe, grid, cfg, 31);
    ShotEngine cp;
    cp.protocol = make_cpmg(Rational{2, 1}, 1.0);
    cp.signal = TwoToneSignal{0.1, 1.0, 1e-3};
    auto rc = rmse_sweep(cp, grid, cfg, 32);
    for (double dw : grid)
      std::printf("  dw=%.0e rmse free=%.4f cpmg=%.4f\n", dw, relative_rmse(rf, dw),
                  relative_rmse(rc, dw));
  }
}

void check_optimizer() {
  std::printf("optimizer:\n");
  // objective anchors with c == 0 (free evolution, no impulses)
  {
    std::vector<double> c(64, 0.0);
    ObjectiveWeights w;
    w.mu2 = 7.0;
    auto b = objective(c, w, NoiseModel{}, Rational{2, 1}, 1.0);
    std::printf("  c=0 mu2-only centroid=%.3e (expect 0), curvature=%.6f (expect %.6f)\n",
                b.centroid, b.curvature, -8.0 * kPi * kPi * 4.0);
  }
  // gradient vs central finite differences at a random point
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-0.6, 0.6);
    std::vector<double> c(32);
    for (double& v : c) v = unif(rng);
    ObjectiveWeights w;
    w.mu1 = 300.0;
    w.mu2 = 40.0;
    w.mu3 = 7.0;
    w.mu4 = 0.3;
    w.mu5 = 11.0;
    NoiseModel noise{NoiseKind::lorentzian, 0.2, 0.1};
    Rational kappa{2, 1};
    auto g = gradient(c, w, noise, kappa, 1.0);
    double worst = 0.0;
    for (std::size_t j = 0; j < c.size(); j += 3) {
      double h = 1e-6;
      std::vector<double> cp = c, cm = c;
      cp[j] += h;
      cm[j] -= h;
      double fd = (objective(cp, w, noise, kappa, 1.0).total -
                   objective(cm, w, noise, kappa, 1.0).total) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(fd)));
    }
    std::printf("  gradient vs fd worst rel err = %.2e\n", worst);
  }
  // full run: kappa=4, Lorentzian W = 0.1 wc
  {
    ControlProtocol seed = make_optimizer_seed(Rational{4, 1}, 1.0, 64, 0.23);
    NoiseModel noise{NoiseKind::lorentzian, 0.05, 0.1};
    ObjectiveWeights w = default_objective_weights();
    auto t0 = objective(seed.samples, w, noise, seed.kappa, 1.0, seed.impulses);
    std::printf("  seed terms: curv=%.4g ovl=%.4g cen=%.4g amp=%.4g f4=%.4g smo=%.4g\n",
                t0.curvature, t0.noise_overlap, t0.centroid, t0.amplitude, t0.fourth_order,
                t0.smoothness);
    auto rep = optimize(seed, w, noise, 150);
    FFValue cpmg = ff_instantaneous(make_cpmg(Rational{4, 1}, 1.0), 1.0);
    FFValue fin = ff_continuous_order2(rep.protocol, 1.0);
    double maxc = 0.0;
    for (double v : rep.protocol.samples) maxc = std::max(maxc, std::abs(v));
    double sup = ff_sup(rep.protocol);
    OverlapResult ovl_opt = overlap_chi(rep.protocol,
                                        SpectralModel::from_noise(noise));
    OverlapResult ovl_cp = overlap_chi(make_cpmg(Rational{4, 1}, 1.0),
                                       SpectralModel::from_noise(noise));
    std::printf("  obj %.4f -> %.4f in %d iters, |grad|=%.2e\n", rep.initial_objective,
                rep.final_objective, rep.iterations, rep.gradient_norm);
    std::printf("  F(wc)=%.3e (sup=%.3g, gate 1e-9*sup=%.1e), F''=%.2f vs cpmg %.2f\n",
                fin.F, sup, 1e-9 * sup, fin.d2F, cpmg.d2F);
    std::printf("  overlap opt=%.4e cpmg=%.4e, max|c|=%.3f\n", ovl_opt.chi, ovl_cp.chi, maxc);
    std::printf("  residual seed=%.4e final=%.4e\n",
                local_optimality_residual(seed, w.mu2),
                rep.optimality_residual);
    std::printf("  pi-pulse residual (cpmg) = %.3e\n",
                local_optimality_residual(make_cpmg(Rational{4, 1}, 1.0), w.mu2));
  }
}

void check_classical() {
  std::printf("classical baseline:\n");
  // closed-form anchor, M=4, kappa=1, no noise, both time conventions
  {
    for (double dw : {1e-3, 0.1, 0.5, 1.0, 1.9}) {
      MeasurementBlock b = make_uniform_block(4, Rational{1, 1}, 1.0, 0.1, 0.0, 0.1, dw);
      double fi_a = block_fisher_information(b, 1.0);
      MeasurementBlock b2 = b;
      double T = b.duration();
      for (int m = 0; m < 4; ++m) b2.times[m] = double(m + 1) * T / 4.0;
      double fi_b = block_fisher_information(b2, 1.0);
      double cf = classical_fi_closed_form_k1(1.0, 1.0, dw);
      std::printf("  dw=%.3g fi(0-start)=%.8g fi(1-start)=%.8g closed=%.8g\n", dw, fi_a, fi_b,
                  cf);
    }
  }
  // M=1 independence, Woodbury cross-check, slopes
  {
    MeasurementBlock b = make_uniform_block(1, Rational{1, 1}, 1.0, 0.1, 0.05, 0.1, 0.3);
    b.times[0] = 1.7;
    std::printf("  M=1 fi=%.3e (expect 0)\n", block_fisher_information(b, 1.0));
  }
  {
    MeasurementBlock b = make_uniform_block(4, Rational{1, 1}, 1.0, 1.0, 0.07, 0.1, 0.37);
    BlockCovariance cov = block_covariance(b);
    Eigen::MatrixXd direct = cov.sigma.inverse();
    Eigen::MatrixXd wood = woodbury_inverse(cov, b.g_lambda);
    std::printf("  woodbury max diff = %.3e\n", (direct - wood).cwiseAbs().maxCoeff());
  }
  {
    MeasurementBlock tmpl = make_uniform_block(4, Rational{1, 1}, 1.0, 0.1, 0.0, 0.1, 0.1);
    auto curves = fisher_sweep(tmpl, {1e-3, 2e-3, 0.9, 1.8}, {0.05});
    double lo = std::log(curves[0].fi_over_n[1] / curves[0].fi_over_n[0]) / std::log(2.0);
    double hi = std::log(curves[0].fi_over_n[3] / curves[0].fi_over_n[2]) / std::log(2.0);
    std::printf("  small-dw slope=%.3f (expect 2), large-dw slope=%.3f (expect -2)\n", lo, hi);
  }
}

}  // namespace

int main() {
  check_moments();
  check_closed_forms();
  check_curvatures();
  check_continuous_reduction();
  check_c1();
  check_parseval_and_overlap();
  check_f4_sign();
  check_monte_carlo();
  check_optimizer();
  check_classical();
  return 0;
}
