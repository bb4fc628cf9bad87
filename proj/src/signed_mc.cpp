#include "qprob/signed_mc.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

Bins parse_bins(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 3) fail(ErrorKind::Parse, "bins must be lo:hi:count, got '" + std::string(text) + "'");
  Bins b{parse_double(parts[0], "bins lo"), parse_double(parts[1], "bins hi"), 0};
  auto n = parse_int(parts[2], "bins count");
  if (n < 1 || !(b.hi > b.lo)) fail(ErrorKind::InvalidParameter, "bins need hi > lo and count >= 1");
  b.count = static_cast<std::size_t>(n);
  return b;
}

std::string format_bins(const Bins& b) {
  return format_double(b.lo) + ":" + format_double(b.hi) + ":" + std::to_string(b.count);
}

StepResult step(double prev, double curr, const TransitionKernelTable& kernel, Rng& rng) {
  StepResult r;
  if (!kernel.contains(curr)) {
    r.escaped = true;
    return r;
  }
  NoiseDraw d = kernel.sample(curr, rng);
  r.noise = d.y;
  r.reality = d.sign;
  r.mass = d.mass;
  r.atom = d.atom;
  r.next = 2.0 * curr - prev + kernel.potential().force(curr) + d.y;
  return r;
}

namespace {

struct TrialOutcome {
  double x = 0.0;
  double value = 0.0;  // W * weight
  int reality = 1;
  double weight = 0.0;
  bool aborted = false;
  std::uint32_t atom_draws = 0;
  std::uint32_t continuous_draws = 0;
};

// positions must hold N+2 entries
TrialOutcome simulate(int n_slices, std::uint64_t seed, std::uint64_t trial, const TransitionKernelTable& kernel,
                      const PhaseSpaceDensity& init, double* positions, double* noises, int* reality) {
  Rng rng(seed, trial);
  TrialOutcome out;
  InitialDraw d = sample_initial(init, rng);
  double prev = d.alpha0, curr = d.alpha0 + d.v0;
  positions[0] = prev;
  positions[1] = curr;
  if (reality) reality[0] = d.sign;
  int w = d.sign;
  double weight = d.mass;
  for (int n = 1; n <= n_slices; ++n) {
    StepResult s = step(prev, curr, kernel, rng);
    if (s.escaped) {
      out.aborted = true;
      return out;
    }
    if (s.atom) ++out.atom_draws; else ++out.continuous_draws;
    w *= s.reality;
    weight *= s.mass;
    if (noises) noises[n - 1] = s.noise;
    if (reality) reality[n] = s.reality;
    prev = curr;
    curr = s.next;
    positions[n + 1] = curr;
  }
  out.x = curr;
  out.reality = w;
  out.weight = weight;
  out.value = w * weight;
  return out;
}

void check_config(const McConfig& cfg) {
  if (cfg.trials < 1) fail(ErrorKind::InvalidParameter, "trials must be >= 1");
  if (cfg.n_slices < 0) fail(ErrorKind::InvalidParameter, "N must be >= 0");
  if (cfg.bins.count < 1 || !(cfg.bins.hi > cfg.bins.lo)) fail(ErrorKind::InvalidParameter, "invalid bins");
}

// Serial trial-order accumulation shared by both runners.
struct Reducer {
  const McConfig& cfg;
  McResult& res;
  std::vector<double> trace_sum, trace_sq;
  std::uint64_t done = 0;

  Reducer(const McConfig& c, McResult& r)
      : cfg(c), res(r), trace_sum(static_cast<std::size_t>(c.n_slices) + 2, 0.0), trace_sq(trace_sum) {}

  void add(std::uint64_t trial, const TrialOutcome& t, const double* pos) {
    if (!t.aborted) {
      for (std::size_t n = 0; n < trace_sum.size(); ++n) {
        const double v = t.value * pos[n];
        trace_sum[n] += v;
        trace_sq[n] += v * v;
      }
    }
    res.histogram.add_trials(1);
    res.atom_draws += t.atom_draws;
    res.continuous_draws += t.continuous_draws;
    if (t.aborted) {
      ++res.aborted;
    } else {
      res.histogram.deposit(t.x, t.value);
      if (t.reality < 0) ++res.negative_paths;
      if (cfg.record_events) res.events.push_back(Event{trial, t.x, t.reality, t.weight});
    }
    ++done;
    if (cfg.snapshot_every > 0 && done % cfg.snapshot_every == 0) res.snapshots.push_back(res.histogram);
  }

  void finish() {
    const double T = static_cast<double>(cfg.trials);
    res.mean_trace.resize(trace_sum.size());
    res.mean_trace_stderr.resize(trace_sum.size());
    for (std::size_t n = 0; n < trace_sum.size(); ++n) {
      double m = trace_sum[n] / T;
      res.mean_trace[n] = m;
      double var = std::max(trace_sq[n] / T - m * m, 0.0);
      res.mean_trace_stderr[n] = T > 1 ? std::sqrt(var / (T - 1)) : 0.0;
    }
    if (res.abort_fraction() > 0.01) {
      res.failed = true;
      res.status = "abort fraction " + format_double(res.abort_fraction()) + " exceeds 1% (paths left the kernel table)";
    }
  }
};

}  // namespace

PathSample sample_path(int n_slices, std::uint64_t seed, std::uint64_t trial, const TransitionKernelTable& kernel,
                       const PhaseSpaceDensity& init) {
  PathSample p;
  p.positions.assign(n_slices + 2, std::nan(""));
  p.noises.assign(n_slices, std::nan(""));
  p.reality.assign(n_slices + 1, 1);
  TrialOutcome t = simulate(n_slices, seed, trial, kernel, init, p.positions.data(), p.noises.data(), p.reality.data());
  p.aborted = t.aborted;
  p.reality_number = t.aborted ? 0 : t.reality;
  p.weight = t.weight;
  p.atom_draws = t.atom_draws;
  return p;
}

SignedHistogram::SignedHistogram(Bins bins)
    : bins_(bins), signed_(bins.count, 0.0), abs_(bins.count, 0.0), sq_(bins.count, 0.0),
      pos_(bins.count, 0), neg_(bins.count, 0) {}

void SignedHistogram::deposit(double x, double value) {
  total_signed_ += value;
  total_abs_ += std::abs(value);
  total_sq_ += value * value;
  if (!(x >= bins_.lo && x < bins_.hi)) {
    ++outside_;
    return;
  }
  std::size_t i = std::min(static_cast<std::size_t>((x - bins_.lo) / bins_.width()), bins_.count - 1);
  signed_[i] += value;
  abs_[i] += std::abs(value);
  sq_[i] += value * value;
  if (value >= 0) ++pos_[i]; else ++neg_[i];
}

double SignedHistogram::density(std::size_t i) const {
  return trials_ ? signed_[i] / (static_cast<double>(trials_) * bins_.width()) : 0.0;
}

double SignedHistogram::standard_error(std::size_t i) const {
  if (trials_ < 2) return 0.0;
  const double T = static_cast<double>(trials_);
  double m = signed_[i] / T;
  double var = std::max(sq_[i] / T - m * m, 0.0);
  return std::sqrt(var / (T - 1)) / bins_.width();
}

double SignedHistogram::cancellation_ratio(std::size_t i) const {
  return abs_[i] > 0 ? std::abs(signed_[i]) / abs_[i] : 1.0;
}

std::string SignedHistogram::to_csv() const {
  std::string s = "bin_lo,bin_hi,signed,abs,pos,neg,density,stderr\n";
  for (std::size_t i = 0; i < bins_.count; ++i) {
    s += format_double(bin_lo(i)) + ',' + format_double(bin_hi(i)) + ',' + format_double(signed_[i]) + ',' +
         format_double(abs_[i]) + ',' + std::to_string(pos_[i]) + ',' + std::to_string(neg_[i]) + ',' +
         format_double(density(i)) + ',' + format_double(standard_error(i)) + '\n';
  }
  return s;
}

std::string events_to_csv(const std::vector<Event>& events) {
  std::string s = "trial,x,reality,weight\n";
  for (auto& e : events) {
    s += std::to_string(e.trial) + ',' + format_double(e.x) + ',' + std::to_string(e.reality) + ',' +
         format_double(e.weight) + '\n';
  }
  return s;
}

McResult run_paths(const McConfig& cfg, const TransitionKernelTable& kernel, const PhaseSpaceDensity& init) {
  check_config(cfg);
  auto t0 = std::chrono::steady_clock::now();
  McResult res;
  res.histogram = SignedHistogram(cfg.bins);
  Reducer red{cfg, res};
  const std::size_t np = static_cast<std::size_t>(cfg.n_slices) + 2;
  const std::uint64_t chunk = 4096;
  const std::uint64_t chunks_per_batch = 64;
  const std::uint64_t n_chunks = (cfg.trials + chunk - 1) / chunk;
  const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();

  std::vector<TrialOutcome> outcomes(chunk * chunks_per_batch);
  std::vector<double> positions(np * chunk * chunks_per_batch);
  for (std::uint64_t c0 = 0; c0 < n_chunks; c0 += chunks_per_batch) {
    const std::uint64_t c1 = std::min(n_chunks, c0 + chunks_per_batch);
#pragma omp parallel for num_threads(nt) schedule(dynamic)
    for (std::uint64_t c = c0; c < c1; ++c) {
      const std::uint64_t t_end = std::min(cfg.trials, (c + 1) * chunk);
      for (std::uint64_t t = c * chunk; t < t_end; ++t) {
        const std::uint64_t k = t - c0 * chunk;
        outcomes[k] = simulate(cfg.n_slices, cfg.seed, t, kernel, init, &positions[k * np], nullptr, nullptr);
      }
    }
    const std::uint64_t t_end = std::min(cfg.trials, c1 * chunk);
    for (std::uint64_t t = c0 * chunk; t < t_end; ++t) {
      const std::uint64_t k = t - c0 * chunk;
      red.add(t, outcomes[k], &positions[k * np]);
    }
  }
  red.finish();
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

McResult run_paths_serial(const McConfig& cfg, const TransitionKernelTable& kernel, const PhaseSpaceDensity& init) {
  check_config(cfg);
  auto t0 = std::chrono::steady_clock::now();
  McResult res;
  res.histogram = SignedHistogram(cfg.bins);
  Reducer red{cfg, res};
  const std::size_t np = static_cast<std::size_t>(cfg.n_slices) + 2;
  std::vector<double> pos(np);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    TrialOutcome o = simulate(cfg.n_slices, cfg.seed, t, kernel, init, pos.data(), nullptr, nullptr);
    red.add(t, o, pos.data());
  }
  red.finish();
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

SignDiagnostics sign_diagnostics(const McResult& result) {
  SignDiagnostics d;
  const auto& h = result.histogram;
  d.cancellation_ratio = h.total_abs() > 0 ? std::abs(h.total_signed()) / h.total_abs() : 1.0;
  d.ess = h.total_sq() > 0 ? h.total_abs() * h.total_abs() / h.total_sq() : 0.0;
  for (std::size_t i = 0; i < h.bins().count; ++i) d.bin_cancellation.push_back(h.cancellation_ratio(i));
  for (auto& s : result.snapshots)
    d.snapshot_cancellation.push_back(s.total_abs() > 0 ? std::abs(s.total_signed()) / s.total_abs() : 1.0);
  const auto& c = d.snapshot_cancellation;
  if (c.size() < 2) {
    d.trend = "n/a";
  } else {
    bool up = true, down = true;
    for (std::size_t i = 1; i < c.size(); ++i) {
      up = up && c[i] >= c[i - 1];
      down = down && c[i] <= c[i - 1];
    }
    d.trend = up && down ? "constant" : up ? "non-decreasing" : down ? "non-increasing" : "mixed";
  }
  return d;
}

std::vector<double> cancellation_vs_slices(McConfig cfg, const std::vector<int>& slice_counts,
                                           const TransitionKernelTable& kernel, const PhaseSpaceDensity& init) {
  std::vector<double> out;
  for (int n : slice_counts) {
    cfg.n_slices = n;
    out.push_back(sign_diagnostics(run_paths(cfg, kernel, init)).cancellation_ratio);
  }
  return out;
}

}  // namespace qprob
