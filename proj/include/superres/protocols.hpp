// Control waveforms: ordered instantaneous x-rotations plus an optional
// piecewise-constant drive amplitude on a uniform grid over [0, T], T = kappa tau
// with tau = 2 pi / omega_c. Constructors cover the canonical families
// (free evolution, CPMG, QNS comb, c1, custom waveforms).
#ifndef SUPERRES_PROTOCOLS_HPP
#define SUPERRES_PROTOCOLS_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace superres {

struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d <= 0 || n <= 0) throw std::invalid_argument("kappa must be a positive rational");
    std::int64_t g = std::gcd(n, d);
    num /= g;
    den /= g;
  }
  double as_double() const { return double(num) / double(den); }
  bool is_integer() const { return den == 1; }
  bool is_even_integer() const { return den == 1 && num % 2 == 0; }
};

struct Impulse {
  double time = 0.0;   // in (0, T)
  double angle = 0.0;  // rotation angle about x, radians
};

struct ControlProtocol {
  std::string kind = "custom";       // free | cpmg | qns | c1 | custom
  Rational kappa{1, 1};
  double omega_c = 1.0;
  double duration = 0.0;             // T = kappa * 2 pi / omega_c (qns: T given directly)
  std::vector<Impulse> impulses;     // strictly increasing times
  std::vector<double> samples;       // piecewise-constant c(t) on a uniform grid; empty if none

  bool has_continuous() const { return !samples.empty(); }
  bool dephasing_preserving() const;
  void validate() const;
};

ControlProtocol make_free(Rational kappa, double omega_c);
ControlProtocol make_cpmg(Rational kappa, double omega_c);  // kappa must be an even integer
ControlProtocol make_qns_comb(int m_teeth, double duration);
ControlProtocol make_c1(Rational kappa, double omega_c);    // kappa must be an integer
ControlProtocol make_custom(Rational kappa, double omega_c, std::vector<double> samples,
                            std::vector<Impulse> impulses = {});

// Switching function f(t) = (-1)^{# pulses before t} for dephasing-preserving
// protocols: segment j covers [breakpoints[j], breakpoints[j+1]) with sign
// (-1)^j; breakpoints include 0 and T.
struct SwitchingFunction {
  std::vector<double> breakpoints;
  int sign_at(double t) const;
};

SwitchingFunction switching_function(const ControlProtocol& protocol);

// theta_c(t) = int_0^t c dt' plus half-angle jumps at impulses, described as
// segments on which theta is linear. Segment boundaries are the continuous
// grid cells split at impulse times; theta0 applies just after any jump at t0.
struct PhaseSegment {
  double t0 = 0.0, h = 0.0;
  double theta0 = 0.0;
  double slope = 0.0;
};

struct PhaseProfile {
  std::vector<PhaseSegment> segments;
  double duration = 0.0;
  double theta_end = 0.0;

  double theta_at(double t) const;
};

// n_steps only matters when the protocol has no continuous part and a caller
// wants a denser segment list; for piecewise-constant waveforms the profile is
// exact regardless.
PhaseProfile phase_profile(const ControlProtocol& protocol);

// Grid samples of theta_c at n_steps + 1 uniform points on [0, T]; points that
// coincide with an impulse report the post-jump value.
std::vector<double> phase_accumulator(const ControlProtocol& protocol, int n_steps);

std::string protocol_to_json(const ControlProtocol& protocol);
ControlProtocol protocol_from_json(const std::string& text);

}  // namespace superres

#endif
