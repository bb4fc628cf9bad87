#include <doctest.h>

#include <cmath>

#include "qprob/signed_mc.hpp"

using namespace qprob;

namespace {

struct Setup {
  TransitionKernelTable table;
  PhaseSpaceDensity init;
};

Setup atom_setup(const Potential& pot, const InitialState& st) {
  return {build_table(pot, Grid::from_bounds(-60, 60, 241), Grid{0, 1, 1}),
          build_phase_density(st, default_init_alpha_grid(st), default_init_v_grid(st))};
}

McConfig config(int n, std::uint64_t trials, Bins bins) {
  McConfig c;
  c.n_slices = n;
  c.trials = trials;
  c.seed = 2024;
  c.bins = bins;
  return c;
}

}  // namespace

TEST_CASE("bins") {
  CHECK(parse_bins("-2:2:8") == Bins{-2, 2, 8});
  CHECK(parse_bins(format_bins(Bins{-1.5, 3.25, 19})) == Bins{-1.5, 3.25, 19});
  CHECK_THROWS(parse_bins("2:-2:8"));
  SignedHistogram h(Bins{0, 1, 4});
  h.deposit(0.1, 1.0);
  h.deposit(0.1, -0.25);
  h.deposit(2.0, 1.0);
  h.add_trials(3);
  CHECK(h.signed_sum()[0] == 0.75);
  CHECK(h.abs_sum()[0] == 1.25);
  CHECK(h.outside() == 1);
  CHECK(h.density(0) == doctest::Approx(0.75 / 3 / 0.25));
  CHECK(h.cancellation_ratio(0) == doctest::Approx(0.6));
  CHECK(h.total_signed() == 1.75);
  CHECK(h.to_csv().rfind("bin_lo,bin_hi,signed,abs,pos,neg,density,stderr\n", 0) == 0);
}

TEST_CASE("harmonic step is the difference equation") {
  auto s = atom_setup(Potential::harmonic(0.05), InitialState::gaussian(1, 0, 0));
  Rng rng(1, 2);
  for (double prev : {-1.0, 0.3}) {
    for (double curr : {-2.0, 0.0, 1.7}) {
      auto r = step(prev, curr, s.table, rng);
      CHECK(r.atom);
      CHECK(r.reality == 1);
      CHECK(r.next == doctest::Approx(2 * curr - prev - 0.05 * curr).epsilon(1e-15));
    }
  }
  auto e = step(0.0, 59.9, s.table, rng);
  CHECK_FALSE(e.escaped);
  e = step(0.0, 75.0, s.table, rng);
  CHECK(e.escaped);
}

TEST_CASE("free paths use only atoms and move ballistically") {
  const double x0 = 0.5, k0 = 0.8;
  const int n = 4;
  auto s = atom_setup(Potential::free(), InitialState::gaussian(1.0, x0, k0));
  auto r = run_paths(config(n, 200000, Bins{-15, 20, 70}), s.table, s.init);
  CHECK(r.status == "ok");
  CHECK(r.continuous_draws == 0);
  CHECK(r.atom_draws == 200000ull * n);
  CHECK(r.negative_paths == 0);
  CHECK(r.aborted == 0);
  // alpha_n = alpha_0 + n v_0 for free motion
  REQUIRE(r.mean_trace.size() == n + 2);
  for (int k = 0; k <= n + 1; ++k) {
    CAPTURE(k);
    CHECK(std::abs(r.mean_trace[k] - (x0 + k * k0)) < 5.0 * r.mean_trace_stderr[k]);
  }
  auto path = sample_path(n, 2024, 17, s.table, s.init);
  REQUIRE(path.positions.size() == n + 2);
  const double v0 = path.positions[1] - path.positions[0];
  for (int k = 2; k <= n + 1; ++k) CHECK(path.positions[k] == doctest::Approx(path.positions[0] + k * v0));
}

TEST_CASE("results do not depend on the thread count") {
  auto s = atom_setup(Potential::free(), InitialState::two_packet(0.5, 4.0, 0.0));
  auto c = config(3, 50000, Bins{-20, 20, 80});
  c.snapshot_every = 12500;
  c.record_events = true;
  c.threads = 1;
  auto a = run_paths(c, s.table, s.init);
  c.threads = 4;
  auto b = run_paths(c, s.table, s.init);
  auto serial = run_paths_serial(c, s.table, s.init);
  for (const auto* o : {&b, &serial}) {
    CHECK(o->histogram.signed_sum() == a.histogram.signed_sum());
    CHECK(o->histogram.sq_sum() == a.histogram.sq_sum());
    CHECK(o->mean_trace == a.mean_trace);
    CHECK(o->events.size() == a.events.size());
    CHECK(o->histogram.to_csv() == a.histogram.to_csv());
    CHECK(events_to_csv(o->events) == events_to_csv(a.events));
  }
  CHECK(a.snapshots.size() == 4);
  CHECK(a.events.size() == 50000);
  CHECK(events_to_csv(a.events).rfind("trial,", 0) == 0);
}

TEST_CASE("signed initial density produces negative paths") {
  auto s = atom_setup(Potential::free(), InitialState::two_packet(0.5, 4.0, 0.0));
  auto r = run_paths(config(2, 100000, Bins{-20, 20, 80}), s.table, s.init);
  CHECK(r.negative_paths > 0);
  auto d = sign_diagnostics(r);
  CHECK(d.cancellation_ratio < 1.0);
  CHECK(d.cancellation_ratio > 0.0);
  CHECK(d.ess > 0.0);
  CHECK(d.ess <= 100000.0 * (1 + 1e-12));
  // total signed mass estimates 1
  const double se = std::sqrt(r.histogram.total_sq() / r.histogram.trials());
  CHECK(std::abs(r.histogram.total_signed() / r.histogram.trials() - 1.0) < 5.0 * se / std::sqrt(1e5));
}

TEST_CASE("oscillatory kernel paths carry signs") {
  const auto pot = Potential::quartic(1e-4);
  const auto st = InitialState::gaussian(1.0, 4.0, 0.0);
  auto table = build_table(pot, Grid::aligned(-20, 20, 0.1), Grid::aligned(-1.5, 1.5, 0.005));
  auto init = build_phase_density(st, default_init_alpha_grid(st), default_init_v_grid(st));
  auto r = run_paths(config(2, 20000, Bins{-16, 16, 64}), table, init);
  CHECK(r.continuous_draws > 0);
  CHECK(r.negative_paths > 0);
  CHECK(r.abort_fraction() < 0.01);
}
