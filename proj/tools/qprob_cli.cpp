#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "qprob/chain.hpp"
#include "qprob/config.hpp"
#include "qprob/error.hpp"
#include "qprob/format.hpp"
#include "qprob/scenario.hpp"

using namespace qprob;
namespace fs = std::filesystem;

namespace {

constexpr int kExitThreshold = 4;

// Flag values that map onto config keys; applied after the config file.
struct Overrides {
  std::deque<std::pair<std::string, std::optional<std::string>>> entries;  // stable addresses
  std::optional<std::string>& add(const std::string& key) {
    entries.emplace_back(key, std::nullopt);
    return entries.back().second;
  }
};

void add_override(CLI::App* app, Overrides& ov, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app->add_option(flag, ov.add(key), help);
}

struct Context {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::string> seed;
  std::optional<std::string> threads;
  std::vector<std::string> sets;
};

RunConfig resolve(const Context& ctx, const Overrides& ov, RunConfig base) {
  RunConfig cfg = ctx.config_path ? load_config(*ctx.config_path, std::move(base)) : std::move(base);
  if (ctx.out) cfg.out = *ctx.out;
  if (ctx.seed) set_config_value(cfg, "seed", *ctx.seed);
  if (ctx.threads) set_config_value(cfg, "threads", *ctx.threads);
  for (auto& s : ctx.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorKind::Parse, "--set expects block.key=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (auto& [key, value] : ov.entries)
    if (value) set_config_value(cfg, key, *value);
  validate_config(cfg);
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

void write(const fs::path& dir, const std::string& name, const std::string& content) {
  write_text(dir / name, content);
  std::cout << "wrote " << (dir / name).string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signed probability chain and signed Monte Carlo for time-sliced quantum evolution"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--config", ctx.config_path, "config file (key = value with [block] headers)");
  app.add_option("--out", ctx.out, "output directory");
  app.add_option("--seed", ctx.seed, "random seed (u64)");
  app.add_option("--threads", ctx.threads, "worker threads; affects speed only");
  app.add_option("--set", ctx.sets, "override any config key, block.key=value (repeatable)");

  // model flags shared by every pipeline subcommand
  auto model_flags = [](CLI::App* sub, Overrides& ov) {
    add_override(sub, ov, "--N", "lattice.n_slices", "number of slices N");
    add_override(sub, ov, "--potential", "model.potential", "potential spec, e.g. gauss:h=1,w=1,x0=0");
    add_override(sub, ov, "--state", "model.state", "initial state spec, e.g. gaussian:sigma=1,x0=0,k0=0");
  };

  Overrides ov_kernel, ov_wigner, ov_chain, ov_pathsum, ov_meanv, ov_mc, ov_ref, ov_scn;

  auto* kernel = app.add_subcommand("kernel", "tabulate the transition kernel");
  model_flags(kernel, ov_kernel);
  add_override(kernel, ov_kernel, "--alpha-grid", "kernel.alpha", "alpha grid lo:hi:count or auto");
  add_override(kernel, ov_kernel, "--y-grid", "kernel.y", "relative noise grid lo:hi:count or auto");
  add_override(kernel, ov_kernel, "--tail-tol", "kernel.tail_tol", "tail tolerance of the effective range");

  auto* wigner = app.add_subcommand("wigner", "tabulate the initial phase-space density");
  model_flags(wigner, ov_wigner);
  add_override(wigner, ov_wigner, "--alpha-grid", "init.alpha", "alpha grid lo:hi:count or auto");
  add_override(wigner, ov_wigner, "--v-grid", "init.v", "velocity grid lo:hi:count or auto");

  auto* chain = app.add_subcommand("chain", "evaluate the signed probability chain and check it against the path sum");
  model_flags(chain, ov_chain);
  add_override(chain, ov_chain, "--grid", "chain.grid", "chain lattice lo:hi:count or auto");
  add_override(chain, ov_chain, "--cap", "chain.cap", "largest N evaluated densely");

  auto* pathsum = app.add_subcommand("pathsum", "evaluate the amplitude path sum");
  model_flags(pathsum, ov_pathsum);
  add_override(pathsum, ov_pathsum, "--grid", "chain.grid", "lattice lo:hi:count or auto");
  add_override(pathsum, ov_pathsum, "--cap", "chain.cap", "largest N evaluated densely");

  auto* meanv = app.add_subcommand("meanv", "mean endpoint velocity from the chain and from the amplitude");
  model_flags(meanv, ov_meanv);
  add_override(meanv, ov_meanv, "--grid", "chain.grid", "lattice lo:hi:count or auto");
  add_override(meanv, ov_meanv, "--cap", "chain.cap", "largest N evaluated densely");

  auto* mc = app.add_subcommand("mc", "signed Monte Carlo over the probability chain");
  model_flags(mc, ov_mc);
  add_override(mc, ov_mc, "--trials", "mc.trials", "number of trials");
  add_override(mc, ov_mc, "--bins", "mc.bins", "histogram bins lo:hi:count or auto");
  add_override(mc, ov_mc, "--snapshot-every", "mc.snapshot_every", "snapshot interval in trials (0 = none)");
  add_override(mc, ov_mc, "--alpha-grid", "kernel.alpha", "kernel alpha grid");
  add_override(mc, ov_mc, "--y-grid", "kernel.y", "kernel noise grid");
  std::optional<std::string> events_path;
  mc->add_option("--events", events_path, "write the per-trial event stream to PATH");

  auto* reference = app.add_subcommand("reference", "Crank-Nicolson amplitude reference");
  model_flags(reference, ov_ref);
  add_override(reference, ov_ref, "--grid", "reference.grid", "grid lo:hi:count or auto");
  add_override(reference, ov_ref, "--steps", "reference.steps", "time steps (0 = auto)");
  add_override(reference, ov_ref, "--snapshots", "reference.snapshots", "snapshots after t = 0");

  auto* compare = app.add_subcommand("compare", "compare two x,rho or histogram CSV files");
  std::string file_a, file_b, metric = "l1", threshold = "none";
  compare->add_option("file_a", file_a, "first CSV")->required();
  compare->add_option("file_b", file_b, "second CSV")->required();
  compare->add_option("--metric", metric, "l1, linf or chi2");
  compare->add_option("--threshold", threshold, "pass/fail bound on the metric, or none");

  auto* scenario = app.add_subcommand("scenario", "run a bundled scenario end to end");
  std::string scenario_name;
  scenario->add_option("name", scenario_name, "free-spread, harmonic-coherent, two-packet, gauss-barrier, quartic-well")
      ->required();
  model_flags(scenario, ov_scn);
  add_override(scenario, ov_scn, "--trials", "mc.trials", "number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*kernel) {
      RunConfig cfg = resolve(ctx, ov_kernel, {});
      Model m = make_model(cfg);
      auto table = make_mc_table(cfg, m);
      double worst = 0.0;
      for (auto& c : table.columns()) worst = std::max(worst, c.normalization_error);
      write(cfg.out, "kernel.csv", kernel_csv(table));
      write(cfg.out, "kernel.json", Json{{"potential", m.potential.spec()},
                                         {"alpha_grid", format_grid(table.alpha_grid())},
                                         {"y_grid", format_grid(table.y_grid())},
                                         {"max_normalization_error", worst}}
                                            .dump(2) +
                                        "\n");
    } else if (*wigner) {
      RunConfig cfg = resolve(ctx, ov_wigner, {});
      Model m = make_model(cfg);
      auto d = make_initial_density(cfg, m);
      write(cfg.out, "wigner.csv", wigner_csv(d));
      write(cfg.out, "wigner.json", wigner_json(d).dump(2) + "\n");
    } else if (*chain) {
      RunConfig cfg = resolve(ctx, ov_chain, {});
      Model m = make_model(cfg);
      ChainSpec spec = make_chain_spec(cfg, m);
      auto kt = chain_kernel_table(spec, {}, cfg.threads);
      auto pi = chain_phase_density(spec, cfg.threads);
      auto rep = equivalence_report(spec, kt, pi, cfg.threads);
      write(cfg.out, "chain.json", equivalence_json(rep).dump(2) + "\n");
      if (rep.error) fail(*rep.error, rep.status);
      write(cfg.out, "chain.csv", density_csv(rep.x, rep.chain));
      std::cout << "l1 " << format_double(rep.l1) << " linf " << format_double(rep.linf) << "\n";
    } else if (*pathsum) {
      RunConfig cfg = resolve(ctx, ov_pathsum, {});
      Model m = make_model(cfg);
      auto field = amplitude_path_sum(make_chain_spec(cfg, m), EndpointPhase::Include, cfg.threads);
      write(cfg.out, "pathsum.csv", density_csv(field.x, field.rho));
    } else if (*meanv) {
      RunConfig cfg = resolve(ctx, ov_meanv, {});
      Model m = make_model(cfg);
      ChainSpec spec = make_chain_spec(cfg, m);
      auto kt = chain_kernel_table(spec, {}, cfg.threads);
      auto pi = chain_phase_density(spec, cfg.threads);
      auto mv = mean_velocity_chain(spec, kt, pi, cfg.threads);
      write(cfg.out, "meanv.csv", meanv_csv(mv, amplitude_mean_velocity(spec, cfg.threads)));
    } else if (*mc) {
      RunConfig cfg = resolve(ctx, ov_mc, {});
      if (events_path) cfg.events = true;
      Model m = make_model(cfg);
      auto table = make_mc_table(cfg, m);
      auto init = make_initial_density(cfg, m);
      auto r = run_paths(make_mc_config(cfg, m), table, init);
      RunConfig echo = cfg;
      echo.threads = 0;
      write(cfg.out, "mc.json", mc_json(echo, r, true).dump(2) + "\n");
      if (r.failed) fail(ErrorKind::Coverage, r.status);
      write(cfg.out, "mc_hist.csv", r.histogram.to_csv());
      for (std::size_t k = 0; k < r.snapshots.size(); ++k)
        write(cfg.out, "mc_snapshot_" + std::to_string(k) + ".csv", r.snapshots[k].to_csv());
      if (events_path) {
        write_text(*events_path, events_to_csv(r.events));
        std::cout << "wrote " << *events_path << "\n";
      }
    } else if (*reference) {
      RunConfig cfg = resolve(ctx, ov_ref, {});
      Model m = make_model(cfg);
      ReferencePlan plan;
      auto traj = run_reference(cfg, m, &plan);
      for (std::size_t k = 0; k < traj.size(); ++k)
        write(cfg.out, "reference_" + std::to_string(k) + ".csv", density_csv(traj[k].x, traj[k].density()));
      write(cfg.out, "reference.json", reference_json(traj, plan).dump(2) + "\n");
    } else if (*compare) {
      std::optional<double> thr;
      if (threshold != "none") thr = parse_double(threshold, "threshold");
      auto rep = compare_files(file_a, file_b, metric, thr);
      std::string text = to_json(rep).dump(2) + "\n";
      std::cout << text;
      if (ctx.out) write_text(fs::path(*ctx.out) / "compare.json", text);
      if (!rep.pass) return kExitThreshold;
    } else if (*scenario) {
      RunConfig cfg = resolve(ctx, ov_scn, preset_config(scenario_name));
      auto bundle = run_scenario(cfg);
      std::cout << "bundle " << bundle.directory << " (" << bundle.files.size() << " files)\n";
      if (bundle.compare) {
        const auto& c = *bundle.compare;
        std::cout << "compare " << c.file_a << " vs " << c.file_b << ": l1 " << format_double(c.l1) << " linf "
                  << format_double(c.linf) << (c.threshold ? (c.pass ? " PASS" : " FAIL") : " (report only)") << "\n";
      }
      if (bundle.threshold_failed) return kExitThreshold;
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return is_validation_error(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
