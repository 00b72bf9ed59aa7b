// Filter functions and spectral overlap integrals for control protocols.
//
// Three evaluation routes:
//  * ff_instantaneous: exact per-segment integrals of the +/-1 switching
//    function, with analytic omega-derivatives up to fourth order.
//  * ff_closed_*: the analytic expressions for free evolution, CPMG and the
//    QNS comb, with removable singularities evaluated by stable shifted
//    identities instead of naive sec/sin products.
//  * ff2_eval / ff4_eval: generalized second- and fourth-order filter
//    functions for arbitrary (continuous + impulse) controls, built from
//    cell-exact oscillatory moments. These are templated on the scalar type;
//    instantiating with Dual gives exact directional derivatives for the
//    waveform optimizer.
#ifndef SUPERRES_FILTER_FUNCTIONS_HPP
#define SUPERRES_FILTER_FUNCTIONS_HPP

#include <cstdint>
#include <vector>

#include "superres/oscint.hpp"
#include "superres/protocols.hpp"
#include "superres/signal_models.hpp"

namespace superres {

struct FFValue {
  double F = 0.0, dF = 0.0, d2F = 0.0;
};

// G[k] = d^k/d omega^k of \int_0^T f(t) e^{i omega t} dt, k = 0..kmax.
void ff_instantaneous_moments(const ControlProtocol& protocol, double omega, int kmax,
                              Cx<double>* G);
FFValue ff_instantaneous(const ControlProtocol& protocol, double omega);
// Fourth omega-derivative of F (needed for the Delta-omega^4 expansion term).
double ff_instantaneous_d4(const ControlProtocol& protocol, double omega);

double ff_free_closed(double kappa, double omega_c, double omega);
double ff_cpmg_closed(std::int64_t kappa, double omega_c, double omega);
double ff_qns_closed(int m_teeth, double duration, double omega);

// ---- generalized filter functions ----------------------------------------

template <class T>
struct PhaseSegT {
  double t0 = 0.0, h = 0.0;
  T theta0{}, slope{};
};
template <class T>
using ProfileT = std::vector<PhaseSegT<T>>;

ProfileT<double> profile_of(const ControlProtocol& protocol);
// Split every segment so no cell is wider than duration / n_steps. The cell
// integrals are exact for piecewise-constant drives, so refinement changes
// nothing beyond rounding; the knob exists for refinement self-checks.
template <class T>
ProfileT<T> refine_profile(const ProfileT<T>& profile, int n_steps, double duration);

// C[k] += \int cos(2 theta(t)) (i t)^k e^{i omega t} dt and the sin analogue,
// accumulated over all segments; k = 0..kmax (kmax <= 2 supported here).
template <class T>
void continuous_cs_moments(const ProfileT<T>& profile, double omega, int kmax,
                           Cx<T>* C, Cx<T>* S);

template <class T>
struct FF2T {
  T F{}, dF{}, d2F{};
};
template <class T>
FF2T<T> ff2_eval(const ProfileT<T>& profile, double omega);
template <class T>
T ff4_eval(const ProfileT<T>& profile, double omega1, double omega2);

FFValue ff_continuous_order2(const ControlProtocol& protocol, double omega, int n_steps = 0);
double ff_continuous_order4(const ControlProtocol& protocol, double omega1, double omega2,
                            int n_steps = 0);

// ---- overlap integrals ----------------------------------------------------

struct OverlapResult {
  double chi = 0.0;
  std::vector<double> components;  // per delta mass, or per quadrature block
};

// chi = (2/pi) \int_0^inf S(omega) F(omega) d omega for the protocol's filter
// function (second-order generalized FF for non-dephasing-preserving
// controls). White noise: chi = 2 Gamma T exactly.
OverlapResult overlap_chi(const ControlProtocol& protocol, const SpectralModel& model);

enum class SequenceKind { free_evolution, cpmg };

// Dimensionless Lorentzian overlap shape integral f_{kappa, w_tilde}.
double lorentzian_shape_constant(SequenceKind kind, double kappa, double w_tilde);

// Quadrature of \int_R F d omega (window plus analytic omega^-2 tail); the
// Parseval identity pins this to 2 pi T.
double parseval_integral(const ControlProtocol& protocol, double omega_max = 0.0);

// Supremum of F over a scan grid; reference scale for "F(omega_c) = 0" gates.
double ff_sup(const ControlProtocol& protocol);

// ---- template implementations --------------------------------------------

namespace detail {
inline constexpr double kBinom[5][5] = {{1, 0, 0, 0, 0},
                                        {1, 1, 0, 0, 0},
                                        {1, 2, 1, 0, 0},
                                        {1, 3, 3, 1, 0},
                                        {1, 4, 6, 4, 1}};
// Coefficient of the time-ordered part of the fourth-order filter function in
// the sign convention where dephasing-preserving protocols give
// F4(w1, w2) = +3 F(w1) F(w2).
inline constexpr double kF4OrderedCoeff = 3.0;
}  // namespace detail

template <class T>
ProfileT<T> refine_profile(const ProfileT<T>& profile, int n_steps, double duration) {
  if (n_steps <= 0) return profile;
  double hmax = duration / double(n_steps);
  ProfileT<T> out;
  for (const PhaseSegT<T>& s : profile) {
    int pieces = std::max(1, int(std::ceil(s.h / hmax - 1e-12)));
    double h = s.h / double(pieces);
    for (int i = 0; i < pieces; ++i) {
      T theta0 = s.theta0 + T(double(i) * h) * s.slope;
      out.push_back({s.t0 + double(i) * h, h, theta0, s.slope});
    }
  }
  return out;
}

template <class T>
void continuous_cs_moments(const ProfileT<T>& profile, double omega, int kmax,
                           Cx<T>* C, Cx<T>* S) {
  for (int k = 0; k <= kmax; ++k) C[k] = S[k] = Cx<T>{};
  Cx<T> qp[kMaxMoment + 1], qm[kMaxMoment + 1];
  for (const PhaseSegT<T>& seg : profile) {
    T pp = T(omega) + T(2.0) * seg.slope;
    T pm = T(omega) - T(2.0) * seg.slope;
    power_moments(pp, seg.h, kmax, qp);
    power_moments(pm, seg.h, kmax, qm);
    Cx<T> ep = cis(T(2.0) * seg.theta0);
    Cx<T> em = conj(ep);
    Cx<T> rot = cis(T(omega * seg.t0));
    for (int k = 0; k <= kmax; ++k) {
      Cx<T> mc{}, ms{};
      double t0m = 1.0;  // t0^{k-m}, built from the top power down
      for (int m = k; m >= 0; --m) {
        Cx<T> icos = T(0.5) * (ep * qp[m] + em * qm[m]);
        Cx<T> isin = T(0.5) * div_i(ep * qp[m] - em * qm[m]);
        double w = detail::kBinom[k][m] * t0m;
        mc += T(w) * icos;
        ms += T(w) * isin;
        t0m *= seg.t0;
      }
      // (i t)^k contributes i^k; e^{i omega t0} shifts the segment in time.
      Cx<T> phase = rot;
      for (int r = 0; r < k; ++r) phase = rot90(phase);
      C[k] += phase * mc;
      S[k] += phase * ms;
    }
  }
}

template <class T>
FF2T<T> ff2_eval(const ProfileT<T>& profile, double omega) {
  Cx<T> C[3], S[3];
  continuous_cs_moments(profile, omega, 2, C, S);
  FF2T<T> out;
  out.F = abs2(C[0]) + abs2(S[0]);
  out.dF = T(2.0) * ((C[1] * conj(C[0])).re + (S[1] * conj(S[0])).re);
  out.d2F = T(2.0) * ((C[2] * conj(C[0])).re + (S[2] * conj(S[0])).re) +
            T(2.0) * (abs2(C[1]) + abs2(S[1]));
  return out;
}

template <class T>
struct OrderedKernels {
  Cx<T> cc{}, cs{}, sc{}, ss{};
};

// K[f,g](omega) = \int_0^T dt f(t) e^{-i omega t} \int_0^t ds g(s) e^{i omega s}
// for f, g in {cos 2theta, sin 2theta}; single pass with prefix sums plus
// exact same-cell double integrals.
template <class T>
OrderedKernels<T> ordered_kernels(const ProfileT<T>& profile, double omega) {
  OrderedKernels<T> K;
  Cx<T> pc{}, ps{};  // prefix integrals of cos/sin parts
  for (const PhaseSegT<T>& seg : profile) {
    Cx<T> q1[1];
    T pp = T(omega) + T(2.0) * seg.slope;
    T pm = T(omega) - T(2.0) * seg.slope;
    power_moments(pp, seg.h, 0, q1);
    Cx<T> qp0 = q1[0];
    power_moments(pm, seg.h, 0, q1);
    Cx<T> qm0 = q1[0];
    Cx<T> ep = cis(T(2.0) * seg.theta0);
    Cx<T> em = conj(ep);
    Cx<T> rot = cis(T(omega * seg.t0));
    Cx<T> ic = rot * (T(0.5) * (ep * qp0 + em * qm0));
    Cx<T> is = rot * (T(0.5) * div_i(ep * qp0 - em * qm0));

    // Same-cell ordered integrals: expand cos/sin into e^{+/- i 2 theta}.
    Cx<T> e2[2][2];  // [sigma][rho], sigma/rho = 0 -> +1, 1 -> -1
    for (int a = 0; a < 2; ++a) {
      T sa = (a == 0) ? T(1.0) : T(-1.0);
      for (int b = 0; b < 2; ++b) {
        T sb = (b == 0) ? T(1.0) : T(-1.0);
        e2[a][b] = ordered_pair_integral(T(2.0) * seg.slope * sa - T(omega),
                                         T(2.0) * seg.slope * sb + T(omega), seg.h);
      }
    }
    Cx<T> phase4 = cis(T(4.0) * seg.theta0);
    auto pair_phase = [&](int a, int b) -> Cx<T> {
      int s = (a == 0 ? 1 : -1) + (b == 0 ? 1 : -1);
      if (s == 2) return phase4;
      if (s == -2) return conj(phase4);
      return Cx<T>{T(1.0), T()};
    };
    auto alpha_cos = [](int) -> Cx<T> { return {T(0.5), T()}; };
    auto alpha_sin = [](int a) -> Cx<T> { return {T(), T(a == 0 ? -0.5 : 0.5)}; };
    Cx<T> dcc{}, dcs{}, dsc{}, dss{};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        Cx<T> base = pair_phase(a, b) * e2[a][b];
        dcc += alpha_cos(a) * alpha_cos(b) * base;
        dcs += alpha_cos(a) * alpha_sin(b) * base;
        dsc += alpha_sin(a) * alpha_cos(b) * base;
        dss += alpha_sin(a) * alpha_sin(b) * base;
      }
    }

    K.cc += conj(ic) * pc + dcc;
    K.cs += conj(ic) * ps + dcs;
    K.sc += conj(is) * pc + dsc;
    K.ss += conj(is) * ps + dss;
    pc += ic;
    ps += is;
  }
  return K;
}

template <class T>
T ff4_eval(const ProfileT<T>& profile, double omega1, double omega2) {
  Cx<T> C1[1], S1[1], C2[1], S2[1];
  continuous_cs_moments(profile, omega1, 0, C1, S1);
  continuous_cs_moments(profile, omega2, 0, C2, S2);
  T f2a = abs2(C1[0]) + abs2(S1[0]);
  T f2b = abs2(C2[0]) + abs2(S2[0]);
  Cx<T> z1 = C1[0] * C2[0] + S1[0] * S2[0];
  Cx<T> z2 = conj(C1[0]) * C2[0] + conj(S1[0]) * S2[0];
  T unordered = f2a * f2b + abs2(z1) + abs2(z2);

  OrderedKernels<T> ka = ordered_kernels(profile, omega1);
  OrderedKernels<T> kb = ordered_kernels(profile, omega2);
  Cx<T> w1 = ka.sc - ka.cs;
  Cx<T> w2 = kb.sc - kb.cs;
  Cx<T> b1 = w1 * w2;
  Cx<T> b2 = ka.ss * kb.cc - ka.sc * kb.cs - ka.cs * kb.sc + ka.cc * kb.ss;
  Cx<T> b3 = ka.ss * kb.cc - ka.sc * kb.sc - ka.cs * kb.cs + ka.cc * kb.ss;
  return unordered + T(detail::kF4OrderedCoeff) * (b1 + b2 + b3).re;
}

}  // namespace superres

#endif
