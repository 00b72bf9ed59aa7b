#include "superres/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace superres {

namespace {
constexpr double kPi = std::numbers::pi;

bool is_pi_angle(double angle) { return std::abs(angle - kPi) < 1e-12; }
}  // namespace

bool ControlProtocol::dephasing_preserving() const {
  if (has_continuous()) {
    // An all-zero sample list is still a dephasing-preserving protocol.
    for (double c : samples)
      if (c != 0.0) return false;
  }
  for (const Impulse& imp : impulses)
    if (!is_pi_angle(imp.angle)) return false;
  return true;
}

void ControlProtocol::validate() const {
  if (duration <= 0.0) throw std::invalid_argument("protocol: duration must be > 0");
  if (omega_c <= 0.0) throw std::invalid_argument("protocol: omega_c must be > 0");
  double prev = 0.0;
  for (const Impulse& imp : impulses) {
    if (imp.time <= prev || imp.time >= duration)
      throw std::invalid_argument("protocol: impulse times must be strictly increasing inside (0, T)");
    prev = imp.time;
  }
}

ControlProtocol make_free(Rational kappa, double omega_c) {
  ControlProtocol p;
  p.kind = "free";
  p.kappa = kappa;
  p.omega_c = omega_c;
  p.duration = kappa.as_double() * 2.0 * kPi / omega_c;
  p.validate();
  return p;
}

ControlProtocol make_cpmg(Rational kappa, double omega_c) {
  if (!kappa.is_even_integer())
    throw std::invalid_argument("cpmg: kappa must be an even positive integer");
  ControlProtocol p;
  p.kind = "cpmg";
  p.kappa = kappa;
  p.omega_c = omega_c;
  double tau = 2.0 * kPi / omega_c;
  p.duration = kappa.as_double() * tau;
  for (std::int64_t j = 0; j < kappa.num; ++j)
    p.impulses.push_back({(2.0 * double(j) + 1.0) * 0.5 * tau, kPi});
  p.validate();
  return p;
}

ControlProtocol make_qns_comb(int m_teeth, double duration) {
  if (m_teeth < 1) throw std::invalid_argument("qns: M must be >= 1");
  if (duration <= 0.0) throw std::invalid_argument("qns: duration must be > 0");
  ControlProtocol p;
  p.kind = "qns";
  p.omega_c = 1.0;
  p.kappa = Rational{1, 1};
  p.duration = duration;
  for (int j = 1; j <= 2 * m_teeth; ++j)
    p.impulses.push_back({(2.0 * double(j) - 1.0) * duration / (4.0 * double(m_teeth)), kPi});
  p.validate();
  return p;
}

ControlProtocol make_c1(Rational kappa, double omega_c) {
  if (!kappa.is_integer())
    throw std::invalid_argument("c1: kappa must be a positive integer");
  ControlProtocol p;
  p.kind = "c1";
  p.kappa = kappa;
  p.omega_c = omega_c;
  p.duration = kappa.as_double() * 2.0 * kPi / omega_c;
  p.samples.assign(1, -0.5);  // constant drive; one cell is exact
  p.impulses.push_back({0.5 * p.duration, kPi});
  p.validate();
  return p;
}

ControlProtocol make_custom(Rational kappa, double omega_c, std::vector<double> samples,
                            std::vector<Impulse> impulses) {
  ControlProtocol p;
  p.kind = "custom";
  p.kappa = kappa;
  p.omega_c = omega_c;
  p.duration = kappa.as_double() * 2.0 * kPi / omega_c;
  p.samples = std::move(samples);
  p.impulses = std::move(impulses);
  std::sort(p.impulses.begin(), p.impulses.end(),
            [](const Impulse& a, const Impulse& b) { return a.time < b.time; });
  p.validate();
  return p;
}

int SwitchingFunction::sign_at(double t) const {
  // breakpoints = {0, t_1, ..., t_M, T}; sign flips at each interior breakpoint
  int flips = 0;
  for (std::size_t i = 1; i + 1 < breakpoints.size(); ++i)
    if (breakpoints[i] <= t) ++flips;
  return (flips % 2 == 0) ? 1 : -1;
}

SwitchingFunction switching_function(const ControlProtocol& protocol) {
  if (!protocol.dephasing_preserving())
    throw std::invalid_argument(
        "switching_function: protocol is not dephasing-preserving; use phase_profile instead");
  SwitchingFunction f;
  f.breakpoints.push_back(0.0);
  for (const Impulse& imp : protocol.impulses) f.breakpoints.push_back(imp.time);
  f.breakpoints.push_back(protocol.duration);
  return f;
}

PhaseProfile phase_profile(const ControlProtocol& protocol) {
  protocol.validate();
  const double T = protocol.duration;
  // Boundaries: continuous grid cells, split at impulse times.
  std::vector<double> bounds;
  std::size_t n_cells = protocol.has_continuous() ? protocol.samples.size() : 1;
  double dt = T / double(n_cells);
  for (std::size_t j = 0; j <= n_cells; ++j) bounds.push_back(double(j) * dt);
  for (const Impulse& imp : protocol.impulses) bounds.push_back(imp.time);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               bounds.end());

  PhaseProfile profile;
  profile.duration = T;
  double theta = 0.0;
  std::size_t next_impulse = 0;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    double t0 = bounds[j];
    double h = bounds[j + 1] - t0;
    while (next_impulse < protocol.impulses.size() &&
           protocol.impulses[next_impulse].time <= t0 + 1e-14) {
      theta += 0.5 * protocol.impulses[next_impulse].angle;
      ++next_impulse;
    }
    double slope = 0.0;
    if (protocol.has_continuous()) {
      auto cell = std::size_t((t0 + 0.5 * h) / dt);
      if (cell >= protocol.samples.size()) cell = protocol.samples.size() - 1;
      slope = protocol.samples[cell];
    }
    profile.segments.push_back({t0, h, theta, slope});
    theta += slope * h;
  }
  while (next_impulse < protocol.impulses.size()) {
    theta += 0.5 * protocol.impulses[next_impulse].angle;
    ++next_impulse;
  }
  profile.theta_end = theta;
  return profile;
}

double PhaseProfile::theta_at(double t) const {
  if (segments.empty()) return 0.0;
  // Walk from the back so a query at a segment boundary reports the
  // post-jump value.
  for (auto it = segments.rbegin(); it != segments.rend(); ++it)
    if (t >= it->t0 - 1e-15)
      return it->theta0 + it->slope * (std::min(t, it->t0 + it->h) - it->t0);
  return segments.front().theta0;
}

std::vector<double> phase_accumulator(const ControlProtocol& protocol, int n_steps) {
  if (n_steps < 2) throw std::invalid_argument("phase_accumulator: n_steps must be >= 2");
  PhaseProfile profile = phase_profile(protocol);
  std::vector<double> theta(std::size_t(n_steps) + 1);
  for (int i = 0; i <= n_steps; ++i) {
    double t = protocol.duration * double(i) / double(n_steps);
    theta[std::size_t(i)] = (i == n_steps) ? profile.theta_end : profile.theta_at(t);
  }
  return theta;
}

std::string protocol_to_json(const ControlProtocol& protocol) {
  nlohmann::json j;
  j["kind"] = protocol.kind;
  j["kappa"] = {protocol.kappa.num, protocol.kappa.den};
  j["omega_c"] = protocol.omega_c;
  j["duration"] = protocol.duration;
  j["impulses"] = nlohmann::json::array();
  for (const Impulse& imp : protocol.impulses)
    j["impulses"].push_back({imp.time, imp.angle});
  j["samples"] = protocol.samples;
  return j.dump();
}

ControlProtocol protocol_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ControlProtocol p;
  p.kind = j.value("kind", "custom");
  if (j.contains("kappa")) {
    if (j["kappa"].is_array())
      p.kappa = Rational{j["kappa"][0].get<std::int64_t>(), j["kappa"][1].get<std::int64_t>()};
    else if (j["kappa"].is_number_integer())
      p.kappa = Rational{j["kappa"].get<std::int64_t>(), 1};
    else {
      // Decimal kappa: interpret with denominator 10^6 and reduce.
      double k = j["kappa"].get<double>();
      p.kappa = Rational{std::int64_t(std::llround(k * 1e6)), 1000000};
    }
  }
  p.omega_c = j.value("omega_c", 1.0);
  p.duration = j.value("duration", p.kappa.as_double() * 2.0 * std::numbers::pi / p.omega_c);
  if (j.contains("impulses"))
    for (const auto& e : j["impulses"])
      p.impulses.push_back({e[0].get<double>(), e[1].get<double>()});
  if (j.contains("samples")) p.samples = j["samples"].get<std::vector<double>>();
  p.validate();
  return p;
}

}  // namespace superres
