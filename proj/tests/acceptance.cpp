// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

#include "qprob/error.hpp"
#include "qprob/format.hpp"
#include "qprob/scenario.hpp"

using namespace qprob;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kChainL1 = 1e-6;
constexpr double kNormTol = 1e-6;
constexpr double kAiryTol = 1e-8;
constexpr double kAiryNegative = -1e-3;
constexpr double kHarmonicL1 = 0.05;
constexpr double kTraceSigmas = 4.0;
constexpr double kMarginalTol = 1e-6;
constexpr double kWignerMassTol = 1e-6;
constexpr double kGaussianTol = 1e-9;
constexpr double kFreeL1 = 0.05;
constexpr double kWidthRel = 1e-3;
constexpr double kTwoPacketL1 = 0.1;
constexpr double kFringeCancel = 0.05;
constexpr double kFringeCounts = 100.0;
constexpr double kFringePeakFraction = 0.25;
constexpr double kUnbiasedSigmas = 3.0;
constexpr double kUnbiasedFraction = 0.95;
constexpr double kMeanVelocityTol = 1e-4;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(ErrorKind::Schema, "missing column " + name);
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t c = col(name);
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  Table t;
  std::string line;
  std::getline(in, line);
  std::stringstream hs(line);
  for (std::string f; std::getline(hs, f, ',');) t.header.push_back(f);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    for (std::string f; std::getline(ls, f, ',');) row.push_back(parse_double(f, path.filename().string()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

fs::path bundle_root() {
  auto p = fs::temp_directory_path() / "qprob_acceptance";
  fs::create_directories(p);
  return p;
}

BundleResult scenario(const std::string& name) {
  RunConfig cfg = preset_config(name);
  cfg.out = (bundle_root() / name).string();
  return run_scenario(cfg);
}

std::vector<double> bin_averaged(const fs::path& density_csv, const Bins& b) {
  Table t = read_csv(density_csv);
  auto x = t.column("x");
  auto rho = t.column("rho");
  Grid g{x.front(), x[1] - x[0], x.size()};
  return bin_average(g, rho, b.lo, b.hi, b.count);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- criteria ---

Outcome chain_identity() {
  double worst = 0.0;
  const Potential pots[] = {Potential::free(), Potential::gaussian_bump(1.0, 1.0, 0.0)};
  const auto st = InitialState::gaussian(1.0, -2.0, 1.0);
  for (const auto& pot : pots) {
    for (int n = 0; n <= 3; ++n) {
      ChainSpec s{make_lattice(n, 1.0, 1.0, 1.0), pot, st, default_chain_grid(st, pot, n), 4};
      auto r = equivalence_report(s, chain_kernel_table(s), chain_phase_density(s));
      if (r.status != "ok") return {false, pot.spec() + " N=" + std::to_string(n) + ": " + r.status};
      worst = std::max(worst, r.l1);
    }
  }
  return {worst <= kChainL1, "max relative L1 " + format_double(worst)};
}

Outcome kernel_normalization() {
  auto quartic = build_table(Potential::quartic(1.0), Grid::from_bounds(0.5, 2.5, 101), Grid::aligned(-16, 16, 0.02));
  auto bump = build_table(Potential::gaussian_bump(1.0, 1.0, 0.0), Grid::from_bounds(-10, 10, 201),
                          Grid::aligned(-14, 14, 0.01));
  double worst = 0.0;
  std::size_t columns = 0;
  for (const auto* t : {&quartic, &bump}) {
    for (const auto& c : t->columns()) {
      worst = std::max(worst, c.normalization_error);
      ++columns;
    }
  }
  return {worst <= kNormTol, std::to_string(columns) + " columns, max |int Pi - 1| " + format_double(worst)};
}

Outcome airy_crosscheck() {
  const auto pot = Potential::quartic(1.0);
  double worst = 0.0, lowest = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const double s = std::cbrt(3.0 * alpha);
    for (int i = 0; i <= 400; ++i) {
      const double y = -10.0 + 0.05 * i;
      const double v = kernel_value(pot, y, alpha).continuous;
      worst = std::max(worst, std::abs(v - boost::math::airy_ai(y / s) / s));
      lowest = std::min(lowest, v);
    }
  }
  return {worst <= kAiryTol && lowest < kAiryNegative,
          "max error " + format_double(worst) + ", min Pi " + format_double(lowest)};
}

Outcome zero_noise() {
  // free: every draw is the atom
  RunConfig fc = preset_config("free-spread");
  fc.trials = 100000;
  Model fm = make_model(fc);
  auto free_res = run_paths(make_mc_config(fc, fm), make_mc_table(fc, fm), make_initial_density(fc, fm));

  auto b = scenario("harmonic-coherent");
  RunConfig hc = preset_config("harmonic-coherent");
  Model hm = make_model(hc);
  auto res = run_paths(make_mc_config(hc, hm), make_mc_table(hc, hm), make_initial_density(hc, hm));
  const bool atoms = free_res.continuous_draws == 0 && res.continuous_draws == 0 && free_res.atom_draws > 0 &&
                     res.atom_draws > 0;
  // mean of alpha_n obeys a_{n+1} = (2 - k) a_n - a_{n-1}, a_0 = a_1 = x0
  const double k = 0.001;
  const double x0 = hm.state.mean_position();
  const double w = std::acos(1.0 - 0.5 * k);
  const double bcoef = x0 * (1.0 - std::cos(w)) / std::sin(w);
  std::size_t outside = 0;
  double worst = 0.0;
  for (std::size_t n = 0; n < res.mean_trace.size(); ++n) {
    const double classical = x0 * std::cos(w * n) + bcoef * std::sin(w * n);
    const double z = std::abs(res.mean_trace[n] - classical) / std::max(res.mean_trace_stderr[n], 1e-300);
    worst = std::max(worst, z);
    if (z > kTraceSigmas) ++outside;
  }
  const double l1 = b.compare ? b.compare->l1 : NAN;
  return {atoms && outside == 0 && l1 <= kHarmonicL1,
          "continuous draws " + std::to_string(free_res.continuous_draws + res.continuous_draws) +
              ", max trace deviation " + format_double(worst) + " se, L1 " + format_double(l1)};
}

Outcome wigner_marginals() {
  const double sigma = 1.0;
  const auto st = InitialState::gaussian(sigma, 0.0, 0.0);
  auto d = build_phase_density(st, default_init_alpha_grid(st), default_init_v_grid(st));
  double worst = 0.0;
  for (std::size_t i = 0; i < d.alpha_grid().count; ++i) {
    const double a = d.alpha_grid().at(i);
    for (std::size_t j = 0; j < d.v_grid().count; ++j) {
      const double v = d.v_grid().at(j);
      const double exact = std::exp(-a * a / (2 * sigma * sigma) - 2 * sigma * sigma * v * v) / M_PI;
      worst = std::max(worst, std::abs(d.value(i, j) - exact));
    }
  }
  auto two = InitialState::two_packet(0.5, 6.0, 0.0);
  auto d2 = build_phase_density(two, default_init_alpha_grid(two), default_init_v_grid(two));
  const double marg = std::max(d.marginal_error(), d2.marginal_error());
  const double mass = std::max(d.normalization_error(), d2.normalization_error());
  return {worst <= kGaussianTol && marg <= kMarginalTol && mass <= kWignerMassTol,
          "closed form " + format_double(worst) + ", marginal " + format_double(marg) + ", mass " +
              format_double(mass)};
}

Outcome free_spreading() {
  auto b = scenario("free-spread");
  RunConfig cfg = preset_config("free-spread");
  Model m = make_model(cfg);
  auto traj = run_reference(cfg, m);
  const double s = m.state.sigma();
  const double t = traj.back().time;
  const double expect = s * std::sqrt(1.0 + t * t / (4.0 * s * s * s * s));
  const double rel = std::abs(traj.back().width() / expect - 1.0);
  const double l1 = b.compare ? b.compare->l1 : NAN;
  return {l1 <= kFreeL1 && rel <= kWidthRel,
          "L1 " + format_double(l1) + ", width relative error " + format_double(rel)};
}

Outcome interference() {
  auto b = scenario("two-packet");
  RunConfig cfg = preset_config("two-packet");
  const fs::path dir = cfg.out = (bundle_root() / "two-packet").string();
  Table h = read_csv(dir / "mc_hist.csv");
  auto sgn = h.column("signed");
  auto abs = h.column("abs");
  auto pos = h.column("pos");
  auto neg = h.column("neg");
  const Bins bins = *cfg.bins;
  auto ref = bin_averaged(dir / "reference.csv", bins);
  const double peak = *std::max_element(ref.begin(), ref.end());
  std::size_t minima = 0, good = 0;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < ref.size(); ++i) {
    if (!(ref[i] < ref[i - 1] && ref[i] < ref[i + 1])) continue;
    std::size_t l = i, r = i;
    while (l > 0 && ref[l - 1] > ref[l]) --l;
    while (r + 1 < ref.size() && ref[r + 1] > ref[r]) ++r;
    if (std::min(ref[l], ref[r]) < kFringePeakFraction * peak) continue;
    ++minima;
    const double ratio = std::abs(sgn[i]) / abs[i];
    worst = std::max(worst, ratio);
    if (ratio <= kFringeCancel && pos[i] + neg[i] > kFringeCounts) ++good;
  }
  const double l1 = b.compare ? b.compare->l1 : NAN;
  return {l1 <= kTwoPacketL1 && minima > 0 && good == minima,
          "L1 " + format_double(l1) + ", " + std::to_string(good) + "/" + std::to_string(minima) +
              " fringe minima cancel, worst ratio " + format_double(worst)};
}

Outcome unbiasedness() {
  scenario("gauss-barrier");
  RunConfig cfg = preset_config("gauss-barrier");
  const fs::path dir = (bundle_root() / "gauss-barrier");
  Table h = read_csv(dir / "mc_hist.csv");
  auto dens = h.column("density");
  auto se = h.column("stderr");
  auto chain = bin_averaged(dir / "chain.csv", *cfg.bins);
  std::size_t within = 0;
  for (std::size_t i = 0; i < dens.size(); ++i)
    if (std::abs(dens[i] - chain[i]) <= kUnbiasedSigmas * se[i]) ++within;
  const double frac = static_cast<double>(within) / static_cast<double>(dens.size());
  return {frac >= kUnbiasedFraction,
          std::to_string(within) + "/" + std::to_string(dens.size()) + " bins within 3 se"};
}

Outcome mean_velocity() {
  const auto pot = Potential::gaussian_bump(1.0, 1.0, 0.0);
  const auto st = InitialState::gaussian(1.0, -3.0, 1.0);
  ChainSpec s{make_lattice(2, 1.0, 1.0, 1.0), pot, st, default_chain_grid(st, pot, 2), 4};
  auto mv = mean_velocity_chain(s, chain_kernel_table(s), chain_phase_density(s));
  const double oracle = amplitude_mean_velocity(s);
  const double err = std::abs(mv.total - oracle);
  return {err <= kMeanVelocityTol,
          "total " + format_double(mv.total) + " vs oracle " + format_double(oracle) + " (classical " +
              format_double(mv.classical) + ", vacuum " + format_double(mv.vacuum) + ")"};
}

Outcome reproducibility() {
  RunConfig cfg = preset_config("gauss-barrier");
  cfg.trials = 200000;
  cfg.events = true;
  Model m = make_model(cfg);
  auto table = make_mc_table(cfg, m);
  auto init = make_initial_density(cfg, m);
  std::string hist, events;
  bool same = true;
  for (int threads : {1, 4, 16}) {
    McConfig mc = make_mc_config(cfg, m);
    mc.threads = threads;
    auto r = run_paths(mc, table, init);
    std::string h = r.histogram.to_csv(), e = events_to_csv(r.events);
    if (threads == 1) {
      hist = h;
      events = e;
    } else {
      same = same && h == hist && e == events;
    }
  }
  return {same, "threads 1/4/16, " + std::to_string(hist.size() + events.size()) + " bytes compared"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "chain-amplitude identity", chain_identity},
      {2, "kernel normalization", kernel_normalization},
      {3, "Airy cross-check", airy_crosscheck},
      {4, "free/harmonic zero noise", zero_noise},
      {5, "Wigner marginals", wigner_marginals},
      {6, "free-packet spreading", free_spreading},
      {7, "interference cancellation", interference},
      {8, "MC unbiasedness", unbiasedness},
      {9, "mean velocity", mean_velocity},
      {10, "reproducibility", reproducibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string(to_string(e.kind())) + ": " + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
