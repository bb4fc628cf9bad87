#include <doctest.h>

#include <cmath>

#include "qprob/chain.hpp"
#include "qprob/error.hpp"

using namespace qprob;

namespace {

ChainSpec make_spec(const Potential& pot, const InitialState& st, int n) {
  ChainSpec s;
  s.lattice = make_lattice(n, 1.0, 1.0, 1.0);
  s.potential = pot;
  s.state = st;
  s.grid = default_chain_grid(st, pot, n);
  return s;
}

EquivalenceReport run_chain(const ChainSpec& s) {
  auto table = chain_kernel_table(s);
  auto init = chain_phase_density(s);
  return equivalence_report(s, table, init);
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("free chain equals the path sum") {
  const auto st = InitialState::gaussian(1.0, 0.5, 0.7);
  for (int n = 0; n <= 3; ++n) {
    auto r = run_chain(make_spec(Potential::free(), st, n));
    CAPTURE(n);
    CHECK(r.linf < 1e-6);
    CHECK(r.l1 < 1e-6);
  }
}

TEST_CASE("free path sum matches the spreading packet") {
  const double sigma = 1.0, x0 = 0.5, k0 = 0.7;
  const int n = 3;
  auto s = make_spec(Potential::free(), InitialState::gaussian(sigma, x0, k0), n);
  auto f = amplitude_path_sum(s);
  const double t = n + 1;
  const double st = sigma * std::sqrt(1.0 + std::pow(t / (2 * sigma * sigma), 2));
  double worst = 0.0;
  for (std::size_t i = 0; i < f.x.count; ++i) {
    const double z = (f.x.at(i) - x0 - k0 * t) / st;
    worst = std::max(worst, std::abs(f.rho[i] - std::exp(-0.5 * z * z) / (st * std::sqrt(2 * M_PI))));
  }
  CHECK(worst < 1e-8);
  CHECK(f.norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bump chain equals the path sum") {
  const auto pot = Potential::gaussian_bump(1.0, 1.0, 0.0);
  const auto st = InitialState::gaussian(1.0, -2.0, 1.0);
  for (int n = 1; n <= 2; ++n) {
    auto r = run_chain(make_spec(pot, st, n));
    CAPTURE(n);
    CHECK(r.linf < 1e-6);
    CHECK(r.status == "ok");
  }
}

TEST_CASE("two-packet chain equals the path sum") {
  auto r = run_chain(make_spec(Potential::free(), InitialState::two_packet(0.5, 4.0, 0.3), 2));
  CHECK(r.linf < 1e-6);
}

TEST_CASE("chain mean velocity matches the amplitude") {
  const auto pot = Potential::gaussian_bump(1.0, 1.0, 0.0);
  auto s = make_spec(pot, InitialState::gaussian(1.0, -2.0, 1.0), 2);
  auto mv = mean_velocity_chain(s, chain_kernel_table(s), chain_phase_density(s));
  const double oracle = amplitude_mean_velocity(s);
  CHECK(std::abs(mv.total - oracle) < 1e-4);
  CHECK(mv.total == doctest::Approx(mv.classical + mv.vacuum));
  // free motion keeps <v> = k0 and has no vacuum term
  auto f = make_spec(Potential::free(), InitialState::gaussian(1.0, 0.0, 0.6), 2);
  auto fv = mean_velocity_chain(f, chain_kernel_table(f), chain_phase_density(f));
  CHECK(fv.total == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(std::abs(fv.vacuum) < 1e-10);
}

TEST_CASE("chain errors") {
  auto s = make_spec(Potential::free(), InitialState::gaussian(1.0, 0.0, 0.0), 5);
  CHECK(kind_of([&] { amplitude_path_sum(s); }) == ErrorKind::CapExceeded);
  // the report records the failure instead of raising
  auto r = equivalence_report(s, TransitionKernelTable{}, PhaseSpaceDensity{});
  CHECK(r.status.rfind(to_string(ErrorKind::CapExceeded), 0) == 0);
  CHECK(std::isnan(r.l1));
  s.cap = 5;
  s.lattice = make_lattice(1, 1.0, 1.0, 1.0);
  auto other = s;
  other.potential = Potential::harmonic(0.1);
  CHECK(kind_of([&] { chain_density(s, chain_kernel_table(other), chain_phase_density(s)); }) ==
        ErrorKind::Coverage);
  auto narrow = s;
  narrow.grid = Grid::from_bounds(-2.0, 2.0, 41);
  CHECK(kind_of([&] { amplitude_path_sum(narrow); }) == ErrorKind::DomainTooSmall);
}
