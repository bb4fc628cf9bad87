#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qprob/grid.hpp"
#include "qprob/signed_mc.hpp"

namespace qprob {

// Flat `key = value` configuration with `[block]` headers. Grids are lo:hi:count, "auto" leaves
// a grid to be derived from the state and potential.
struct RunConfig {
  std::string scenario = "custom";
  std::string out = "out";
  std::uint64_t seed = 1;
  int threads = 0;

  // [lattice]
  int n_slices = 0;
  double epsilon = 1.0;
  double mass = 1.0;
  double hbar = 1.0;

  // [model]
  std::string potential = "free";
  std::string state = "gaussian:sigma=1,x0=0,k0=0";

  // [kernel]
  std::optional<Grid> kernel_alpha;
  std::optional<Grid> kernel_y;
  double tail_tol = 1e-12;

  // [init]
  std::optional<Grid> init_alpha;
  std::optional<Grid> init_v;

  // [chain]
  std::optional<Grid> chain_grid;
  int chain_cap = 4;

  // [mc]
  std::uint64_t trials = 100000;
  std::optional<Bins> bins;
  std::uint64_t snapshot_every = 0;
  bool events = false;

  // [reference]
  std::optional<Grid> reference_grid;
  std::uint64_t reference_steps = 0;  // 0 = auto
  std::uint64_t reference_snapshots = 4;

  // [compare]
  std::string compare_against = "auto";  // auto | reference | pathsum | none
  std::string metric = "l1";             // l1 | linf | chi2
  std::optional<double> threshold = 0.05;  // none = report only

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string serialize_config(const RunConfig& cfg);

// Applies one `block.key=value` (or top-level `key=value`) override.
void set_config_value(RunConfig& cfg, std::string_view dotted_key, std::string_view value);

// Domain checks (positivity, parseable specs); errors name the field.
void validate_config(const RunConfig& cfg);

}  // namespace qprob
