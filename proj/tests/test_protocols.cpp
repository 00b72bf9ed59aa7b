#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "superres/protocols.hpp"

using namespace superres;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("free evolution construction") {
  ControlProtocol p = make_free(Rational{2, 1}, 1.0);
  CHECK(p.duration == doctest::Approx(4.0 * kPi));
  CHECK(p.impulses.empty());
  CHECK(p.dephasing_preserving());

  ControlProtocol q = make_free(Rational{5, 2}, 1.0);
  CHECK(q.duration == doctest::Approx(5.0 * kPi));
  CHECK(q.dephasing_preserving());
}

TEST_CASE("cpmg construction and constraints") {
  // One pi pulse per period, at odd multiples of half the period.
  ControlProtocol p = make_cpmg(Rational{2, 1}, 1.0);
  REQUIRE(p.impulses.size() == 2);
  CHECK(p.impulses[0].time == doctest::Approx(kPi));
  CHECK(p.impulses[1].time == doctest::Approx(3.0 * kPi));
  for (const Impulse& imp : p.impulses) CHECK(imp.angle == doctest::Approx(kPi));
  SwitchingFunction f = switching_function(p);
  CHECK(f.breakpoints.size() == 4);  // 0, two flips, T
  CHECK(make_cpmg(Rational{4, 1}, 1.0).impulses.size() == 4);

  CHECK_THROWS(make_cpmg(Rational{3, 1}, 1.0));
  CHECK_THROWS(make_cpmg(Rational{5, 2}, 1.0));
}

TEST_CASE("qns comb construction") {
  ControlProtocol p1 = make_qns_comb(1, 4.0);
  REQUIRE(p1.impulses.size() == 2);
  CHECK(p1.impulses[0].time == doctest::Approx(1.0));
  CHECK(p1.impulses[1].time == doctest::Approx(3.0));

  ControlProtocol p2 = make_qns_comb(2, 8.0);
  REQUIRE(p2.impulses.size() == 4);
  CHECK(p2.impulses[0].time == doctest::Approx(1.0));
  CHECK(p2.impulses[3].time == doctest::Approx(7.0));

  for (int m : {1, 2, 3, 5}) CHECK(make_qns_comb(m, 3.0).impulses.size() == std::size_t(2 * m));
}

TEST_CASE("c1 construction") {
  ControlProtocol p = make_c1(Rational{4, 1}, 1.0);
  CHECK(p.duration == doctest::Approx(8.0 * kPi));
  REQUIRE(p.impulses.size() == 1);
  CHECK(p.impulses[0].time == doctest::Approx(4.0 * kPi));
  CHECK(p.impulses[0].angle == doctest::Approx(kPi));
  REQUIRE(!p.samples.empty());
  for (double c : p.samples) CHECK(c == doctest::Approx(-0.5));
  CHECK(!p.dephasing_preserving());

  PhaseProfile profile = phase_profile(p);
  CHECK(profile.theta_end == doctest::Approx(-0.5 * p.duration + 0.5 * kPi));

  CHECK_THROWS(make_c1(Rational{5, 2}, 1.0));
}

TEST_CASE("switching function values and errors") {
  ControlProtocol fe = make_free(Rational{1, 1}, 1.0);
  SwitchingFunction f = switching_function(fe);
  CHECK(f.sign_at(1.0) == 1);
  CHECK(f.sign_at(6.0) == 1);

  ControlProtocol cp = make_cpmg(Rational{2, 1}, 1.0);
  SwitchingFunction fc = switching_function(cp);
  CHECK(fc.sign_at(0.5) == 1);
  CHECK(fc.sign_at(2.0 * kPi) == -1);  // one pulse (at pi) before it
  CHECK(fc.sign_at(4.0 * kPi) == 1);   // two pulses before it

  CHECK_THROWS(switching_function(make_c1(Rational{2, 1}, 1.0)));
}

TEST_CASE("phase accumulator") {
  ControlProtocol fe = make_free(Rational{2, 1}, 1.0);
  for (double th : phase_accumulator(fe, 16)) CHECK(th == doctest::Approx(0.0));

  ControlProtocol cp = make_cpmg(Rational{2, 1}, 1.0);
  auto theta = phase_accumulator(cp, 64);
  CHECK(theta.back() == doctest::Approx(2.0 * (kPi / 2.0)));

  ControlProtocol c1 = make_c1(Rational{1, 1}, 1.0);
  auto th1 = phase_accumulator(c1, 64);
  CHECK(th1.back() == doctest::Approx(-kPi + kPi / 2.0));
}

TEST_CASE("dephasing-preserving protocols reduce to the switching function") {
  ControlProtocol cp = make_cpmg(Rational{4, 1}, 1.0);
  SwitchingFunction f = switching_function(cp);
  PhaseProfile profile = phase_profile(cp);
  for (int i = 1; i < 200; ++i) {
    double t = cp.duration * (i + 0.13) / 200.5;
    double theta = profile.theta_at(t);
    CHECK(std::cos(2.0 * theta) == doctest::Approx(double(f.sign_at(t))).epsilon(1e-12));
    CHECK(std::sin(2.0 * theta) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("serialization round-trip") {
  for (const ControlProtocol& p :
       {make_free(Rational{5, 2}, 1.0), make_cpmg(Rational{4, 1}, 2.0),
        make_qns_comb(3, 5.5), make_c1(Rational{2, 1}, 1.0),
        make_custom(Rational{3, 1}, 1.0, {0.25, -0.5, 0.1, 0.0},
                    {{2.0, kPi}, {4.0, 0.5 * kPi}})}) {
    ControlProtocol q = protocol_from_json(protocol_to_json(p));
    CHECK(q.kind == p.kind);
    CHECK(q.kappa.num == p.kappa.num);
    CHECK(q.kappa.den == p.kappa.den);
    CHECK(q.duration == doctest::Approx(p.duration).epsilon(1e-14));
    REQUIRE(q.impulses.size() == p.impulses.size());
    for (std::size_t i = 0; i < p.impulses.size(); ++i) {
      CHECK(q.impulses[i].time == doctest::Approx(p.impulses[i].time).epsilon(1e-14));
      CHECK(q.impulses[i].angle == doctest::Approx(p.impulses[i].angle).epsilon(1e-14));
    }
    REQUIRE(q.samples.size() == p.samples.size());
    for (std::size_t i = 0; i < p.samples.size(); ++i)
      CHECK(q.samples[i] == doctest::Approx(p.samples[i]).epsilon(1e-14));
  }
}

TEST_CASE("impulse ordering is maintained by constructors") {
  ControlProtocol p = make_custom(Rational{2, 1}, 1.0, {}, {{5.0, kPi}, {1.0, kPi}});
  REQUIRE(p.impulses.size() == 2);
  CHECK(p.impulses[0].time < p.impulses[1].time);
  p.validate();
}
