// Stable building blocks for oscillatory integrals over short segments.
//
// Everything downstream (filter functions, overlap integrals, the optimizer
// objective) reduces to the moments
//     q_k(p, h) = \int_0^h u^k e^{i p u} du
// and the ordered pair integral
//     E2(p, q, h) = \int_0^h du e^{i p u} \int_0^u dv e^{i q v}.
// Both are evaluated in closed form when the oscillation phase across the
// segment is large enough and by a truncated power series otherwise, so there
// is no catastrophic cancellation near zero frequency.
#ifndef SUPERRES_OSCINT_HPP
#define SUPERRES_OSCINT_HPP

#include <cmath>

#include "superres/dual.hpp"

namespace superres {

template <class T>
struct Cx {
  T re{}, im{};
};

template <class T> Cx<T> operator+(Cx<T> a, Cx<T> b) { return {a.re + b.re, a.im + b.im}; }
template <class T> Cx<T> operator-(Cx<T> a, Cx<T> b) { return {a.re - b.re, a.im - b.im}; }
template <class T> Cx<T> operator-(Cx<T> a) { return {-a.re, -a.im}; }
template <class T> Cx<T> operator*(Cx<T> a, Cx<T> b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T> Cx<T> operator*(T s, Cx<T> a) { return {s * a.re, s * a.im}; }
template <class T> Cx<T>& operator+=(Cx<T>& a, Cx<T> b) { a = a + b; return a; }
template <class T> Cx<T>& operator-=(Cx<T>& a, Cx<T> b) { a = a - b; return a; }
template <class T> Cx<T> conj(Cx<T> a) { return {a.re, -a.im}; }
template <class T> T abs2(Cx<T> a) { return a.re * a.re + a.im * a.im; }
template <class T> Cx<T> rot90(Cx<T> a) { return {-a.im, a.re}; }   // multiply by i
template <class T> Cx<T> div_i(Cx<T> a) { return {a.im, -a.re}; }   // divide by i
template <class T> Cx<T> cis(T x) { using std::sin; using std::cos; return {cos(x), sin(x)}; }
// e^{ix} - 1 without cancellation for small x
template <class T> Cx<T> cis_m1(T x) {
  using std::sin;
  T s = sin(T(0.5) * x);
  return {T(-2.0) * s * s, sin(x)};
}

inline constexpr int kMaxMoment = 24;

// Fills out[0..kmax] with q_k(p, h) = \int_0^h u^k e^{i p u} du.
// Requires kmax <= kMaxMoment.
template <class T>
void power_moments(T p, double h, int kmax, Cx<T>* out) {
  double ph = value_of(p) * h;
  if (std::abs(ph) < 0.6) {
    // q_k = h^{k+1} sum_{n>=0} (i p h)^n / (n! (n+k+1))
    for (int k = 0; k <= kmax; ++k) out[k] = Cx<T>{};
    Cx<T> iph = rot90(Cx<T>{p * T(h), T()});
    Cx<T> s{T(1.0), T()};  // (i p h)^n / n!
    for (int n = 0; n <= 30; ++n) {
      for (int k = 0; k <= kmax; ++k) out[k] += T(1.0 / double(n + k + 1)) * s;
      s = T(1.0 / double(n + 1)) * (s * iph);
      if (mag_of(s.re) + mag_of(s.im) < 1e-20) break;
    }
    double hk = h;
    for (int k = 0; k <= kmax; ++k) {
      out[k] = T(hk) * out[k];
      hk *= h;
    }
    return;
  }
  Cx<T> e = cis(p * T(h));
  T inv_p = T(1.0) / p;
  out[0] = div_i(inv_p * cis_m1(p * T(h)));
  double hk = 1.0;
  for (int k = 1; k <= kmax; ++k) {
    hk *= h;
    out[k] = div_i(inv_p * (T(hk) * e - T(double(k)) * out[k - 1]));
  }
}

// E2(p, q, h) = \int_0^h du e^{i p u} \int_0^u dv e^{i q v}
//             = [q_0(p+q, h) - q_0(p, h)] / (i q),
// with a series in q when |q| h is small:
// E2 = sum_{n>=1} (i q)^{n-1} / n! * q_n(p, h).
template <class T>
Cx<T> ordered_pair_integral(T p, T q, double h) {
  double qh = value_of(q) * h;
  if (std::abs(qh) < 0.5) {
    const int nmax = 18;
    Cx<T> qn[kMaxMoment + 1];
    power_moments(p, h, nmax, qn);
    Cx<T> iq = rot90(Cx<T>{q, T()});
    Cx<T> w{T(1.0), T()};  // (i q)^{n-1} / n!
    Cx<T> acc{};
    for (int n = 1; n <= nmax; ++n) {
      acc += w * qn[n];
      w = T(1.0 / double(n + 1)) * (w * iq);
      if ((mag_of(w.re) + mag_of(w.im)) * std::pow(h, n + 2) < 1e-22) break;
    }
    return acc;
  }
  Cx<T> a[1], b[1];
  power_moments(p + q, h, 0, a);
  power_moments(p, h, 0, b);
  T inv_q = T(1.0) / q;
  return div_i(inv_q * (a[0] - b[0]));
}

}  // namespace superres

#endif
