// Forward-mode scalar with one tangent direction. Used by the waveform
// optimizer to get exact gradients of the discretized objective; everything
// numeric in the continuous-control evaluators is templated on the scalar
// type so the same code path serves double and Dual.
#ifndef SUPERRES_DUAL_HPP
#define SUPERRES_DUAL_HPP

#include <cmath>

namespace superres {

struct Dual {
  double v = 0.0;  // value
  double d = 0.0;  // tangent

  Dual() = default;
  Dual(double value) : v(value), d(0.0) {}  // NOLINT: implicit by design
  Dual(double value, double tangent) : v(value), d(tangent) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
inline Dual operator/(Dual a, Dual b) {
  double inv = 1.0 / b.v;
  return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
}
inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }

inline bool operator<(Dual a, Dual b) { return a.v < b.v; }
inline bool operator>(Dual a, Dual b) { return a.v > b.v; }

inline Dual sin(Dual x) { return {std::sin(x.v), std::cos(x.v) * x.d}; }
inline Dual cos(Dual x) { return {std::cos(x.v), -std::sin(x.v) * x.d}; }
inline Dual sqrt(Dual x) {
  double s = std::sqrt(x.v);
  return {s, 0.5 / s * x.d};
}
inline Dual fabs(Dual x) { return x.v < 0.0 ? Dual{-x.v, -x.d} : x; }

// Accessors that also work for plain double, so templated code can branch on
// magnitudes without caring about the scalar type.
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }
// Magnitude including the tangent: truncation tests must not drop terms whose
// value vanishes but whose derivative does not.
inline double mag_of(double x) { return std::abs(x); }
inline double mag_of(Dual x) { return std::abs(x.v) + std::abs(x.d); }

}  // namespace superres

#endif
