#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qprob/chain.hpp"
#include "qprob/config.hpp"
#include "qprob/kernel.hpp"
#include "qprob/phase_init.hpp"
#include "qprob/schrodinger.hpp"
#include "qprob/signed_mc.hpp"

namespace qprob {

using Json = nlohmann::json;

std::vector<std::string> scenario_names();
// Config of a bundled scenario; throws InvalidParameter for unknown names.
RunConfig preset_config(const std::string& name);

// Grids used when a config leaves them on "auto".
Grid auto_kernel_alpha(const Potential& pot, const InitialState& state, int n_slices);
Grid auto_kernel_y(const Potential& pot, const Grid& alpha_grid);
Bins auto_bins(const Potential& pot, const InitialState& state, int n_slices);

// Stage builders shared by the subcommands and run_scenario.
struct Model {
  LatticeConfig lattice;
  Potential potential;
  InitialState state;
};
Model make_model(const RunConfig& cfg);
TransitionKernelTable make_mc_table(const RunConfig& cfg, const Model& m);
PhaseSpaceDensity make_initial_density(const RunConfig& cfg, const Model& m);
ChainSpec make_chain_spec(const RunConfig& cfg, const Model& m);
McConfig make_mc_config(const RunConfig& cfg, const Model& m);
std::vector<Wavefield> run_reference(const RunConfig& cfg, const Model& m, ReferencePlan* plan_out = nullptr);

// Serializers. Every number is written with 17 significant digits.
std::string kernel_csv(const TransitionKernelTable& table, std::size_t max_columns = 0);
std::string wigner_csv(const PhaseSpaceDensity& density);
Json wigner_json(const PhaseSpaceDensity& density);
std::string density_csv(const Grid& x, const std::vector<double>& rho);
Json equivalence_json(const EquivalenceReport& report);
std::string meanv_csv(const MeanVelocity& mv, double oracle);
Json mc_json(const RunConfig& cfg, const McResult& result, bool include_wall_time);
Json reference_json(const std::vector<Wavefield>& trajectory, const ReferencePlan& plan);

struct CompareReport {
  std::string file_a;
  std::string file_b;
  std::string schema;  // "histogram", "density" or "histogram-density"
  std::string metric;
  std::size_t points = 0;
  double l1 = 0.0;
  double linf = 0.0;
  std::optional<double> chi2;  // reduced chi-square when error columns are present
  std::size_t dof = 0;
  std::optional<double> threshold;
  bool pass = true;
};
CompareReport compare_files(const std::string& file_a, const std::string& file_b, const std::string& metric,
                            std::optional<double> threshold);
Json to_json(const CompareReport& report);

struct ManifestEntry {
  std::string path;  // relative to the bundle directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};
struct BundleResult {
  std::string directory;
  std::vector<ManifestEntry> files;
  std::optional<CompareReport> compare;
  bool threshold_failed = false;
};
// kernel -> init -> chain (N <= cap) -> mc -> reference -> compare. Writes manifest.json listing
// every artifact with its hash; wall times go to timing.json, which the manifest leaves out.
BundleResult run_scenario(const RunConfig& cfg);

}  // namespace qprob
