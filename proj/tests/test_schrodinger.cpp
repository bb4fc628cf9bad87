#include <doctest.h>

#include <cmath>

#include "qprob/error.hpp"
#include "qprob/schrodinger.hpp"

using namespace qprob;

namespace {

double max_diff(const Wavefield& a, const Wavefield& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.psi.size(); ++i) m = std::max(m, std::abs(a.psi[i] - b.psi[i]));
  return m;
}

}  // namespace

TEST_CASE("norm is conserved") {
  const auto st = InitialState::gaussian(1.0, -3.0, 1.0);
  const auto pot = Potential::gaussian_bump(1.0, 1.0, 0.0);
  auto traj = propagate(st, pot, 4.0, 400, Grid::aligned(-20, 20, 0.05), {.snapshots = 4});
  REQUIRE(traj.size() == 5);
  for (const auto& f : traj) CHECK(std::abs(f.norm() - 1.0) < 1e-9);
  CHECK(traj.back().time == doctest::Approx(4.0));
}

TEST_CASE("free packet spreads by the closed-form law") {
  const double sigma = 1.0, t = 10.0;
  const auto st = InitialState::gaussian(sigma, 0.0, 0.5);
  auto plan = default_reference_plan(st, Potential::free(), t);
  auto traj = propagate(st, Potential::free(), t, plan.steps, plan.grid);
  const double expect = sigma * std::sqrt(1.0 + std::pow(t / (2 * sigma * sigma), 2));
  CHECK(traj.back().width() == doctest::Approx(expect).epsilon(1e-3));
  CHECK(traj.back().mean_position() == doctest::Approx(0.5 * t).epsilon(1e-3));
}

TEST_CASE("harmonic coherent state oscillates without spreading") {
  const double k = 0.25, omega = std::sqrt(k), x0 = 2.0;
  const double sigma = 1.0 / std::sqrt(2.0 * omega);
  const auto st = InitialState::gaussian(sigma, x0, 0.0);
  const double t = 0.5 * M_PI / omega * 3.0;  // three quarter periods
  auto traj = propagate(st, Potential::harmonic(k), t, 3000, Grid::aligned(-12, 12, 0.03), {.snapshots = 6});
  for (const auto& f : traj) {
    CAPTURE(f.time);
    CHECK(std::abs(f.mean_position() - x0 * std::cos(omega * f.time)) < 1e-3 * x0);
    CHECK(f.width() == doctest::Approx(sigma).epsilon(1e-3));
  }
}

TEST_CASE("harmonic ground state is stationary") {
  const double k = 1.0;
  const auto pot = Potential::harmonic(k);
  auto g = ground_state(pot, Grid::aligned(-8, 8, 0.02));
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.width() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  auto traj = propagate_field(g, pot, 3.0, 600);
  auto r0 = g.density();
  auto r1 = traj.back().density();
  double worst = 0.0;
  for (std::size_t i = 0; i < r0.size(); ++i) worst = std::max(worst, std::abs(r0[i] - r1[i]));
  CHECK(worst < 1e-8);
}

TEST_CASE("momentum") {
  const auto st = InitialState::gaussian(1.0, 0.0, 2.0);
  auto traj = propagate(st, Potential::free(), 3.0, 600, Grid::aligned(-15, 25, 0.02), {.snapshots = 3});
  CHECK(mean_momentum(traj.front()) == doctest::Approx(2.0).epsilon(1e-6));
  for (const auto& f : traj) CHECK(mean_momentum(f) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("crank-nicolson converges at second order in time") {
  const auto st = InitialState::gaussian(1.0, -2.0, 1.0);
  const auto pot = Potential::gaussian_bump(1.0, 1.0, 0.0);
  const Grid g = Grid::aligned(-20, 20, 0.05);
  auto ref = propagate(st, pot, 2.0, 3200, g).back();
  const double e1 = max_diff(propagate(st, pot, 2.0, 50, g).back(), ref);
  const double e2 = max_diff(propagate(st, pot, 2.0, 100, g).back(), ref);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("boundary leakage is reported") {
  const auto st = InitialState::gaussian(1.0, 0.0, 3.0);
  try {
    propagate(st, Potential::free(), 6.0, 600, Grid::aligned(-10, 10, 0.05));
    FAIL("expected DomainTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainTooSmall);
  }
  CHECK_THROWS_AS(propagate(st, Potential::free(), 1.0, 10, Grid::aligned(-3, 3, 0.05)), Error);
}

TEST_CASE("bin averages") {
  const Grid x = Grid::aligned(-1, 1, 0.01);
  std::vector<double> rho(x.count);
  for (std::size_t i = 0; i < x.count; ++i) rho[i] = x.at(i) * x.at(i);
  auto b = bin_average(x, rho, -1, 1, 4);
  // mean of x^2 over [-1,-0.5] is 7/12
  CHECK(b[0] == doctest::Approx(7.0 / 12.0).epsilon(1e-4));
  CHECK(b[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-3));
}
