// Serial reference vs OpenMP implementation of the three parallel kernels.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "qprob/chain.hpp"
#include "qprob/format.hpp"
#include "qprob/kernel.hpp"
#include "qprob/phase_init.hpp"
#include "qprob/signed_mc.hpp"

using namespace qprob;

namespace {

double time_ms(const std::function<void()>& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %10.1f ms   parallel %10.1f ms   speedup %5.2f\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  std::printf("threads: %d\n", threads);
  const Potential bump = Potential::parse("gauss:h=1,w=1,x0=0");
  const InitialState state = InitialState::parse("gaussian:sigma=1,x0=-3,k0=1");
  const Grid alpha = Grid::aligned(-14.0, 14.0, 0.04);
  const Grid y = Grid::aligned(-12.0, 12.0, 0.01);

  TransitionKernelTable table;
  double ts = time_ms([&] { table = build_table_serial(bump, alpha, y); });
  double tp = time_ms([&] { table = build_table(bump, alpha, y); });
  report("kernel table (701 cols)", ts, tp);

  ChainSpec spec{make_lattice(3, 1.0, 1.0, 1.0), bump, state, {}, 4};
  spec.grid = default_chain_grid(state, bump, 3);
  auto kt = chain_kernel_table(spec);
  auto pi = chain_phase_density(spec);
  ts = time_ms([&] { chain_density(spec, kt, pi, 1); });
  tp = time_ms([&] { chain_density(spec, kt, pi, 0); });
  report("chain N=3", ts, tp);

  auto init = build_phase_density(state, default_init_alpha_grid(state), default_init_v_grid(state));
  McConfig cfg;
  cfg.n_slices = 3;
  cfg.trials = 200000;
  cfg.seed = 1;
  cfg.bins = Bins{-12.0, 12.0, 48};
  McResult a, b;
  ts = time_ms([&] { a = run_paths_serial(cfg, table, init); });
  tp = time_ms([&] { b = run_paths(cfg, table, init); });
  report("signed MC 2e5 trials", ts, tp);
  std::printf("histograms identical: %s\n", a.histogram.to_csv() == b.histogram.to_csv() ? "yes" : "no");
  return 0;
}
