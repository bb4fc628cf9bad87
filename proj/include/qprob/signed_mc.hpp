#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qprob/kernel.hpp"
#include "qprob/phase_init.hpp"
#include "qprob/rng.hpp"

namespace qprob {

struct Bins {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 1;
  double width() const { return (hi - lo) / static_cast<double>(count); }
  friend bool operator==(const Bins&, const Bins&) = default;
};

Bins parse_bins(std::string_view text);  // lo:hi:count
std::string format_bins(const Bins& b);

// One realized trajectory alpha_0..alpha_{N+1}.
struct PathSample {
  std::vector<double> positions;
  std::vector<double> noises;   // y_1..y_N
  std::vector<int> reality;     // w_0 (initial sign), w_1..w_N
  int reality_number = 1;       // product of all indices
  double weight = 1.0;          // (p+ + p-) prod M_tot
  bool aborted = false;
  std::size_t atom_draws = 0;
};

struct StepResult {
  double next = 0.0;
  int reality = 1;
  double mass = 1.0;
  double noise = 0.0;
  bool atom = true;
  bool escaped = false;
};

// alpha_{n+1} = 2 alpha_n - alpha_{n-1} + f(alpha_n) + y with y drawn from the kernel at alpha_n.
StepResult step(double prev, double curr, const TransitionKernelTable& kernel, Rng& rng);

// Full trajectory of one trial using the trial's own stream.
PathSample sample_path(int n_slices, std::uint64_t seed, std::uint64_t trial, const TransitionKernelTable& kernel,
                       const PhaseSpaceDensity& init);

class SignedHistogram {
 public:
  SignedHistogram() = default;
  explicit SignedHistogram(Bins bins);

  void deposit(double x, double value);
  void add_trials(std::uint64_t n) { trials_ += n; }

  const Bins& bins() const { return bins_; }
  std::uint64_t trials() const { return trials_; }
  const std::vector<double>& signed_sum() const { return signed_; }
  const std::vector<double>& abs_sum() const { return abs_; }
  const std::vector<double>& sq_sum() const { return sq_; }
  const std::vector<std::uint64_t>& pos_count() const { return pos_; }
  const std::vector<std::uint64_t>& neg_count() const { return neg_; }
  std::uint64_t outside() const { return outside_; }

  double bin_lo(std::size_t i) const { return bins_.lo + bins_.width() * static_cast<double>(i); }
  double bin_hi(std::size_t i) const { return bins_.lo + bins_.width() * static_cast<double>(i + 1); }
  double density(std::size_t i) const;
  double standard_error(std::size_t i) const;
  double cancellation_ratio(std::size_t i) const;

  // totals over every deposit, inside the bins or not
  double total_signed() const { return total_signed_; }
  double total_abs() const { return total_abs_; }
  double total_sq() const { return total_sq_; }

  std::string to_csv() const;

 private:
  Bins bins_;
  std::uint64_t trials_ = 0;
  std::vector<double> signed_, abs_, sq_;
  std::vector<std::uint64_t> pos_, neg_;
  std::uint64_t outside_ = 0;
  double total_signed_ = 0.0, total_abs_ = 0.0, total_sq_ = 0.0;
};

struct Event {
  std::uint64_t trial = 0;
  double x = 0.0;
  int reality = 1;
  double weight = 0.0;
};

std::string events_to_csv(const std::vector<Event>& events);

struct McConfig {
  int n_slices = 0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  Bins bins;
  std::uint64_t snapshot_every = 0;  // 0 = no snapshots
  bool record_events = false;
  int threads = 0;
};

struct SignDiagnostics {
  double cancellation_ratio = 1.0;  // |sum signed| / sum |signed| over all deposits
  double ess = 0.0;                 // (sum |w|)^2 / sum w^2
  std::vector<double> bin_cancellation;
  std::vector<double> snapshot_cancellation;
  std::string trend;  // of the cancellation ratio across snapshots
};

struct McResult {
  SignedHistogram histogram;
  std::vector<SignedHistogram> snapshots;
  std::vector<Event> events;
  // signed estimate of <alpha_n> for n = 0..N+1 and its standard error
  std::vector<double> mean_trace;
  std::vector<double> mean_trace_stderr;
  std::uint64_t aborted = 0;
  std::uint64_t atom_draws = 0;
  std::uint64_t continuous_draws = 0;
  std::uint64_t negative_paths = 0;
  bool failed = false;
  std::string status = "ok";
  double wall_ms = 0.0;

  double abort_fraction() const {
    return histogram.trials() ? static_cast<double>(aborted) / static_cast<double>(histogram.trials()) : 0.0;
  }
};

// Trials are generated in parallel in fixed-size chunks; histogram, snapshots and events are
// reduced in trial order, so results do not depend on the number of workers.
McResult run_paths(const McConfig& cfg, const TransitionKernelTable& kernel, const PhaseSpaceDensity& init);
// Single loop reference implementation.
McResult run_paths_serial(const McConfig& cfg, const TransitionKernelTable& kernel, const PhaseSpaceDensity& init);

SignDiagnostics sign_diagnostics(const McResult& result);

// Cancellation ratio of the same configuration at several slice counts.
std::vector<double> cancellation_vs_slices(McConfig cfg, const std::vector<int>& slice_counts,
                                           const TransitionKernelTable& kernel, const PhaseSpaceDensity& init);

}  // namespace qprob
