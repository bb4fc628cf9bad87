#include <doctest.h>

#include <cmath>
#include <set>

#include "qprob/config.hpp"
#include "qprob/error.hpp"
#include "qprob/format.hpp"
#include "qprob/grid.hpp"
#include "qprob/initial_state.hpp"
#include "qprob/lattice.hpp"
#include "qprob/potential.hpp"
#include "qprob/quadrature.hpp"
#include "qprob/rng.hpp"

using namespace qprob;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

template <class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

}  // namespace

TEST_CASE("lattice units") {
  auto l = make_lattice(3, 0.5, 2.0, 1.5);
  CHECK(l.final_time() == 4.0);
  CHECK(l.length_unit() == doctest::Approx(std::sqrt(1.5 * 0.5 / 2.0)).epsilon(1e-15));
  CHECK(l.energy_unit() == doctest::Approx(1.5 / 0.5).epsilon(1e-15));
  CHECK(l.from_lattice_position(l.to_lattice_position(0.7)) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(l.to_lattice_time(2.0) == doctest::Approx(4.0));
  CHECK(kind_of([] { make_lattice(-1, 1, 1, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { make_lattice(1, 0, 1, 1); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { make_lattice(1, 1, -2, 1); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("grid parsing and alignment") {
  Grid g = parse_grid("-1:1:21");
  CHECK(g.count == 21);
  CHECK(g.step == doctest::Approx(0.1));
  CHECK(g.hi() == doctest::Approx(1.0));
  CHECK(parse_grid(format_grid(g)) == g);
  Grid a = Grid::aligned(-0.95, 1.02, 0.1);
  CHECK(std::abs(a.lo / 0.1 - std::round(a.lo / 0.1)) < 1e-9);
  CHECK(a.lo <= -0.95);
  CHECK(a.hi() >= 1.02);
  CHECK(same_lattice(Grid{-3.0, 0.1, 61}, Grid{-1.0, 0.1, 5}));
  CHECK_FALSE(same_lattice(Grid{-3.0, 0.1, 61}, Grid{-1.05, 0.1, 5}));
  CHECK(kind_of([] { parse_grid("1:0:5"); }) == ErrorKind::InvalidParameter);
  CHECK(kind_of([] { parse_grid("0:1"); }) == ErrorKind::Parse);
}

TEST_CASE("potential grammar") {
  CHECK(Potential::parse("quartic:c=1") == Potential::quartic(1.0));
  CHECK(Potential::parse("free") == Potential::free());
  CHECK(Potential::parse("harmonic:k=0.5") == Potential::harmonic(0.5));
  CHECK(Potential::parse("poly:0,0,0.5") .value(2.0) == doctest::Approx(2.0));
  auto g = Potential::parse("gauss:h=2,w=0.5,x0=1");
  CHECK(g == Potential::gaussian_bump(2.0, 0.5, 1.0));
  auto two = Potential::parse("gauss:h=1,w=1,x0=-2;h=-0.5,w=2,x0=3");
  CHECK(two.family() == Potential::Family::SumOfGaussianBumps);
  CHECK(two.bumps().size() == 2);
  for (auto* s : {"free", "harmonic:k=0.001", "quartic:c=0.25", "poly:1,2,3", "gauss:h=1,w=1,x0=0",
                  "gauss:h=1,w=1,x0=-2;h=-0.5,w=2,x0=3"}) {
    CHECK(Potential::parse(Potential::parse(s).spec()) == Potential::parse(s));
  }
  CHECK(kind_of([] { Potential::parse("cubic:c=1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { Potential::parse("gauss:h=1,w=0,x0=0"); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("potential force and odd phase") {
  auto h = Potential::harmonic(0.3);
  CHECK(h.value(2.0) == doctest::Approx(0.6));
  CHECK(h.force(2.0) == doctest::Approx(-0.6));
  // degree <= 2: g vanishes identically
  CHECK(std::abs(h.odd_phase(1.3, 2.7)) < 1e-14);
  auto q = Potential::quartic(0.7);
  // g = c alpha beta^3 for V = c x^4
  for (double a : {-1.5, 0.3, 2.0}) {
    auto e = q.odd_phase_coefficients(a);
    REQUIRE(e.size() >= 4);
    CHECK(e[3] == doctest::Approx(0.7 * a).epsilon(1e-14));
    CHECK(q.odd_phase(a, 1.1) == doctest::Approx(0.7 * a * std::pow(1.1, 3)).epsilon(1e-12));
  }
  auto b = Potential::gaussian_bump(1.0, 1.0, 0.0);
  const double d = 1e-6;
  CHECK(b.force(0.4) == doctest::Approx(-(b.value(0.4 + d) - b.value(0.4 - d)) / (2 * d)).epsilon(1e-8));
  // max |V'| of h e^{-x^2/2w^2} is h / (w sqrt(e))
  CHECK(b.max_slope() == doctest::Approx(1.0 / std::sqrt(std::exp(1.0))).epsilon(1e-12));
  CHECK(b.odd_phase(0.5, 0.0) == 0.0);
  CHECK(b.odd_phase(0.5, 0.8) == doctest::Approx(b.difference(0.5, 0.8) + b.force(0.5) * 0.8));
}

TEST_CASE("initial states") {
  auto g = InitialState::parse("gaussian:sigma=0.8,x0=1,k0=2");
  double norm = 0.0;
  for (double x = -10; x <= 12; x += 0.01) norm += g.density(x) * 0.01;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.phase(1.25) == doctest::Approx(2.0 * 1.25 - 2 * M_PI * std::round(2.0 * 1.25 / (2 * M_PI))));
  CHECK(g.mean_velocity() == 2.0);
  CHECK(g.support_radius(1e-14) > 0.0);
  CHECK(g.density(1.0 + g.support_radius(1e-14)) < 1e-14);

  auto t = InitialState::parse("twopacket:sigma=0.5,d=6,theta=0.7");
  double n2 = 0.0;
  for (double x = -12; x <= 12; x += 0.005) n2 += t.density(x) * 0.005;
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(InitialState::parse(t.spec()) == t);
  CHECK(kind_of([] { InitialState::parse("gaussian:sigma=0,x0=0,k0=0"); }) == ErrorKind::InvalidParameter);
  // exact cancellation: d = 0 and theta = pi
  CHECK(kind_of([] { InitialState::two_packet(1.0, 0.0, M_PI); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("number formatting round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(parse_double(format_double(v), "v") == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
  auto msg = message_of([] { parse_u64("-5", "trials"); });
  CHECK(msg.find("trials") != std::string::npos);
  CHECK(kind_of([] { parse_double("abc", "x"); }) == ErrorKind::Parse);
}

TEST_CASE("counter-based rng") {
  Rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 3000);
  Rng u(1, 1);
  double mean = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = u.uniform();
    mean += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  mean /= n;
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("quadrature") {
  auto r = integrate_panels([](double x) { return std::complex<double>(std::sin(x), 0.0); }, 0.0, M_PI, 1.0);
  CHECK(r.value.real() == doctest::Approx(2.0).epsilon(1e-12));
  // highly oscillatory: int_0^50 cos(40 x) dx = sin(2000) / 40
  auto o = integrate_panels([](double x) { return std::complex<double>(std::cos(40 * x), 0.0); }, 0.0, 50.0, 40.0);
  CHECK(std::abs(o.value.real() - std::sin(2000.0) / 40.0) < 1e-10);
  auto w = gregory_weights(11, 0.1);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(0.1 * i, 3);
  CHECK(s == doctest::Approx(0.25).epsilon(1e-13));
  QuadratureOptions strict;
  strict.fail_tol = 1e-30;
  strict.max_depth = 2;
  CHECK(kind_of([&] {
          integrate_panels([](double x) { return std::complex<double>(1.0 / std::sqrt(x + 1e-12), 0.0); }, 0.0, 1.0,
                           1.0, strict);
        }) == ErrorKind::QuadratureFailure);
}

TEST_CASE("config parse, defaults and errors") {
  RunConfig empty = parse_config("");
  CHECK(empty == RunConfig{});
  RunConfig c = parse_config("scenario = demo\n[model]\npotential = quartic:c=1\n[mc]\ntrials = 500 # comment\n");
  CHECK(c.scenario == "demo");
  CHECK(Potential::parse(c.potential) == Potential::quartic(1.0));
  CHECK(c.trials == 500);

  auto msg = message_of([] { parse_config("[mc]\ntrials = -5\n"); });
  CHECK(msg.find("trials") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
  auto unknown = message_of([] { parse_config("\n\n[mc]\ntrails = 5\n"); });
  CHECK(unknown.find("line 4") != std::string::npos);
  CHECK(unknown.find("trails") != std::string::npos);
  CHECK(kind_of([] { parse_config("[nope]\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_config("just text\n"); }) == ErrorKind::Parse);

  RunConfig bad;
  bad.potential = "gauss:h=1,w=-1,x0=0";
  auto v = message_of([&] { validate_config(bad); });
  CHECK(v.find("potential") != std::string::npos);
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.scenario = "rt";
  c.n_slices = 7;
  c.epsilon = 0.1;
  c.potential = "gauss:h=1,w=1,x0=0;h=0.3,w=0.7,x0=2.5";
  c.state = "twopacket:sigma=0.5,d=6,theta=0.1";
  c.kernel_alpha = Grid{-1.0 / 3.0, 0.01, 101};
  c.bins = Bins{-2.0, 2.0, 40};
  c.threshold.reset();
  c.events = true;
  c.seed = 18446744073709551615ULL;
  c.tail_tol = 1e-13;
  CHECK(parse_config(serialize_config(c)) == c);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
  RunConfig o;
  set_config_value(o, "mc.trials", "12");
  set_config_value(o, "seed", "9");
  CHECK(o.trials == 12);
  CHECK(o.seed == 9);
  CHECK(kind_of([&] { set_config_value(o, "mc.nothing", "1"); }) == ErrorKind::Parse);
}
