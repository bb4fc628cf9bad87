#include "qprob/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include "qprob/error.hpp"
#include "qprob/format.hpp"

namespace qprob {

namespace fs = std::filesystem;

namespace {

double wmin_of(const Potential& pot) {
  double w = 1e300;
  for (auto& b : pot.bumps()) w = std::min(w, b.width);
  return w;
}

// Runs one pipeline stage, tagging errors with the stage name.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    fail(e.kind(), std::string("stage ") + name + ": " + e.what());
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"free-spread", "harmonic-coherent", "two-packet", "gauss-barrier", "quartic-well"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.scenario = name;
  c.out = "out/" + name;
  if (name == "free-spread") {
    c.n_slices = 64;
    c.potential = "free";
    c.state = "gaussian:sigma=4,x0=0,k0=0";
    c.trials = 1000000;
    c.bins = Bins{-40.0, 40.0, 160};
    c.snapshot_every = 250000;
    c.compare_against = "reference";
    c.threshold = 0.05;
  } else if (name == "harmonic-coherent") {
    // coherent width (2 sqrt(k))^{-1/2} for k = 1e-3
    c.n_slices = 64;
    c.potential = "harmonic:k=0.001";
    c.state = "gaussian:sigma=" + format_double(1.0 / std::sqrt(2.0 * std::sqrt(1e-3))) + ",x0=4,k0=0";
    c.trials = 100000;
    c.bins = Bins{-20.0, 20.0, 80};
    c.snapshot_every = 25000;
    c.compare_against = "reference";
    c.threshold = 0.05;
  } else if (name == "two-packet") {
    c.n_slices = 15;
    c.potential = "free";
    c.state = "twopacket:sigma=0.5,d=6,theta=0";
    c.trials = 1000000;
    c.bins = Bins{-60.0, 60.0, 240};
    c.snapshot_every = 250000;
    c.events = true;
    c.compare_against = "reference";
    c.threshold = 0.1;
  } else if (name == "gauss-barrier") {
    c.n_slices = 3;
    c.potential = "gauss:h=1,w=1,x0=0";
    c.state = "gaussian:sigma=1,x0=-3,k0=1";
    c.trials = 1000000;
    c.bins = Bins{-12.0, 12.0, 48};
    c.snapshot_every = 250000;
    c.compare_against = "pathsum";
    c.threshold = 0.1;
  } else if (name == "quartic-well") {
    // Airy-type noise: strong sign problem, so the comparison is reported without a threshold.
    // The dense chain would evaluate the kernel pointwise on the whole lattice and is left out.
    c.n_slices = 2;
    c.potential = "quartic:c=0.0001";
    c.state = "gaussian:sigma=1,x0=4,k0=0";
    c.kernel_alpha = Grid::aligned(-20.0, 20.0, 0.1);
    c.kernel_y = Grid::aligned(-1.5, 1.5, 0.005);
    c.chain_cap = 1;
    c.trials = 1000000;
    c.bins = Bins{-16.0, 16.0, 64};
    c.snapshot_every = 250000;
    c.compare_against = "reference";
    c.threshold.reset();
  } else {
    std::string known;
    for (auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
    fail(ErrorKind::InvalidParameter, "unknown scenario '" + name + "' (known: " + known + ")");
  }
  return c;
}

Grid auto_kernel_alpha(const Potential& pot, const InitialState& state, int n_slices) {
  const double t = n_slices + 1.0;
  double half = state.support_radius(1e-14) + (std::abs(state.mean_velocity()) + state.velocity_radius(1e-14)) * t + 2.0;
  double step = 0.5;
  if (pot.has_vanishing_tails()) {
    half += 0.5 * pot.max_slope() * t * t;
    step = wmin_of(pot) / 25.0;
  } else if (pot.is_polynomial() && pot.coefficients().size() > 3) {
    step = 0.05;
  }
  const double c = state.mean_position();
  return Grid::aligned(c - half, c + half, step);
}

Grid auto_kernel_y(const Potential& pot, const Grid& alpha_grid) {
  if (pot.has_vanishing_tails()) {
    const double w = wmin_of(pot);
    const double u = pot.max_slope() + 12.0 / w;
    double lambda = 0.0;
    for (double a : {alpha_grid.lo, alpha_grid.hi()}) lambda = std::max(lambda, effective_range(pot, a, 1e-12));
    const double step = std::min(0.01 * std::min(1.0, w), 0.9 * 2.0 * M_PI / lambda);
    return Grid::aligned(-u, u, step);
  }
  double width = 0.0;
  for (double a : {alpha_grid.lo, alpha_grid.hi()}) width = std::max(width, kernel_width(pot, a));
  if (width == 0.0) return Grid{0.0, 1.0, 1};
  // decaying side of the Airy-type profile needs about 12 widths
  const double half = 12.0 * width;
  return Grid::aligned(-half, half, std::min(0.01, width / 40.0));
}

Bins auto_bins(const Potential& pot, const InitialState& state, int n_slices) {
  const double t = n_slices + 1.0;
  const double s = state.sigma();
  const double spread = s * std::sqrt(1.0 + t * t / (4.0 * s * s * s * s));
  double half = 6.0 * spread + std::abs(state.mean_velocity()) * t + 0.5 * std::abs(state.separation());
  if (pot.has_vanishing_tails()) half += 0.5 * pot.max_slope() * t * t;
  const double width = std::min(0.5, spread / 4.0);
  const double c = state.mean_position();
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * half / width));
  return Bins{c - half, c - half + width * static_cast<double>(count), count};
}

Model make_model(const RunConfig& cfg) {
  validate_config(cfg);
  return Model{make_lattice(cfg.n_slices, cfg.epsilon, cfg.mass, cfg.hbar), Potential::parse(cfg.potential),
               InitialState::parse(cfg.state)};
}

TransitionKernelTable make_mc_table(const RunConfig& cfg, const Model& m) {
  Grid alpha = cfg.kernel_alpha ? *cfg.kernel_alpha : auto_kernel_alpha(m.potential, m.state, cfg.n_slices);
  Grid y = cfg.kernel_y ? *cfg.kernel_y : auto_kernel_y(m.potential, alpha);
  KernelOptions opt;
  opt.tail_tol = cfg.tail_tol;
  return build_table(m.potential, alpha, y, opt, cfg.threads);
}

PhaseSpaceDensity make_initial_density(const RunConfig& cfg, const Model& m) {
  Grid a = cfg.init_alpha ? *cfg.init_alpha : default_init_alpha_grid(m.state);
  Grid v = cfg.init_v ? *cfg.init_v : default_init_v_grid(m.state);
  return build_phase_density(m.state, a, v, cfg.threads);
}

ChainSpec make_chain_spec(const RunConfig& cfg, const Model& m) {
  ChainSpec spec{m.lattice, m.potential, m.state, {}, cfg.chain_cap};
  spec.grid = cfg.chain_grid ? *cfg.chain_grid : default_chain_grid(m.state, m.potential, cfg.n_slices);
  return spec;
}

McConfig make_mc_config(const RunConfig& cfg, const Model& m) {
  McConfig mc;
  mc.n_slices = cfg.n_slices;
  mc.trials = cfg.trials;
  mc.seed = cfg.seed;
  mc.bins = cfg.bins ? *cfg.bins : auto_bins(m.potential, m.state, cfg.n_slices);
  mc.snapshot_every = cfg.snapshot_every;
  mc.record_events = cfg.events;
  mc.threads = cfg.threads;
  return mc;
}

std::vector<Wavefield> run_reference(const RunConfig& cfg, const Model& m, ReferencePlan* plan_out) {
  const double t = m.lattice.final_time();
  ReferencePlan plan = default_reference_plan(m.state, m.potential, t);
  if (cfg.reference_grid) plan.grid = *cfg.reference_grid;
  if (cfg.reference_steps) plan.steps = cfg.reference_steps;
  if (plan_out) *plan_out = plan;
  PropagationOptions opt;
  opt.snapshots = cfg.reference_snapshots;
  return propagate(m.state, m.potential, t, plan.steps, plan.grid, opt);
}

std::string kernel_csv(const TransitionKernelTable& table, std::size_t max_columns) {
  const auto& cols = table.columns();
  std::size_t stride = 1;
  if (max_columns > 0 && cols.size() > max_columns) stride = (cols.size() + max_columns - 1) / max_columns;
  std::string s = "alpha,y,pi_cont,atom_loc,atom_w,m_pos,m_neg,lambda\n";
  for (std::size_t i = 0; i < cols.size(); i += stride) {
    const KernelColumn& c = cols[i];
    const std::string tail = "," + format_double(c.atom_location) + "," + format_double(c.atom_weight) + "," +
                             format_double(c.pos_mass) + "," + format_double(c.neg_mass) + "," +
                             format_double(c.lambda) + "\n";
    if (c.continuous.empty()) {
      s += format_double(c.alpha) + "," + format_double(c.atom_location) + ",0" + tail;
      continue;
    }
    for (std::size_t k = 0; k < c.continuous.size(); ++k)
      s += format_double(c.alpha) + "," + format_double(c.y_grid.at(k)) + "," + format_double(c.continuous[k]) + tail;
  }
  return s;
}

std::string wigner_csv(const PhaseSpaceDensity& d) {
  std::string s = "alpha,v,p_i\n";
  for (std::size_t i = 0; i < d.alpha_grid().count; ++i)
    for (std::size_t j = 0; j < d.v_grid().count; ++j)
      s += format_double(d.alpha_grid().at(i)) + "," + format_double(d.v_grid().at(j)) + "," +
           format_double(d.value(i, j)) + "\n";
  return s;
}

Json wigner_json(const PhaseSpaceDensity& d) {
  return Json{{"state", d.state().spec()},
              {"alpha_grid", format_grid(d.alpha_grid())},
              {"v_grid", format_grid(d.v_grid())},
              {"p_pos", d.pos_mass()},
              {"p_neg", d.neg_mass()},
              {"marginal_error", d.marginal_error()},
              {"normalization_error", d.normalization_error()}};
}

std::string density_csv(const Grid& x, const std::vector<double>& rho) {
  std::string s = "x,rho\n";
  for (std::size_t i = 0; i < rho.size(); ++i) s += format_double(x.at(i)) + "," + format_double(rho[i]) + "\n";
  return s;
}

Json equivalence_json(const EquivalenceReport& r) {
  return Json{{"l1", r.l1},
              {"linf", r.linf},
              {"n_slices", r.n_slices},
              {"runtime_ms", r.runtime_ms},
              {"status", r.status}};
}

std::string meanv_csv(const MeanVelocity& mv, double oracle) {
  return "term,value\nclassical," + format_double(mv.classical) + "\nvacuum," + format_double(mv.vacuum) +
         "\ntotal," + format_double(mv.total) + "\namplitude," + format_double(oracle) + "\n";
}

Json mc_json(const RunConfig& cfg, const McResult& r, bool include_wall_time) {
  SignDiagnostics d = sign_diagnostics(r);
  Json j{{"config", serialize_config(cfg)},
         {"n_slices", cfg.n_slices},
         {"trials", cfg.trials},
         {"seed", cfg.seed},
         {"bins", format_bins(r.histogram.bins())},
         {"interpolation", TransitionKernelTable::interpolation},
         {"status", r.status},
         {"failed", r.failed},
         {"aborted", r.aborted},
         {"abort_fraction", r.abort_fraction()},
         {"atom_draws", r.atom_draws},
         {"continuous_draws", r.continuous_draws},
         {"negative_paths", r.negative_paths},
         {"outside_bins", r.histogram.outside()},
         {"mean_trace", r.mean_trace},
         {"mean_trace_stderr", r.mean_trace_stderr},
         {"diagnostics",
          {{"cancellation_ratio", d.cancellation_ratio},
           {"ess", d.ess},
           {"snapshot_cancellation", d.snapshot_cancellation},
           {"trend", d.trend}}}};
  if (include_wall_time) j["wall_ms"] = r.wall_ms;
  return j;
}

Json reference_json(const std::vector<Wavefield>& traj, const ReferencePlan& plan) {
  Json snaps = Json::array();
  for (auto& w : traj) {
    snaps.push_back(Json{{"time", w.time},
                         {"norm", w.norm()},
                         {"mean_position", w.mean_position()},
                         {"width", w.width()},
                         {"mean_velocity", mean_momentum(w)}});
  }
  return Json{{"grid", format_grid(plan.grid)}, {"steps", plan.steps}, {"snapshots", snaps}};
}

namespace {

struct Series {
  std::vector<double> x;       // bin centres or nodes
  std::vector<double> lo, hi;  // bin edges (histograms only)
  std::vector<double> value;
  std::vector<double> error;  // empty when absent
  bool histogram = false;
};

Series load_series(const std::string& path) {
  CsvTable t = read_csv(path);
  Series s;
  int blo = t.column("bin_lo"), bhi = t.column("bin_hi"), den = t.column("density"), se = t.column("stderr");
  int x = t.column("x"), rho = t.column("rho");
  if (blo >= 0 && bhi >= 0 && den >= 0) {
    s.histogram = true;
    for (auto& r : t.rows) {
      s.lo.push_back(r[blo]);
      s.hi.push_back(r[bhi]);
      s.x.push_back(0.5 * (r[blo] + r[bhi]));
      s.value.push_back(r[den]);
      if (se >= 0) s.error.push_back(r[se]);
    }
  } else if (x >= 0 && rho >= 0) {
    for (auto& r : t.rows) {
      s.x.push_back(r[x]);
      s.value.push_back(r[rho]);
    }
  } else {
    fail(ErrorKind::Schema, path + ": expected columns x,rho or bin_lo,bin_hi,density");
  }
  if (s.x.size() < 2) fail(ErrorKind::Schema, path + ": needs at least two rows");
  for (std::size_t i = 1; i < s.x.size(); ++i)
    if (!(s.x[i] > s.x[i - 1])) fail(ErrorKind::Schema, path + ": x values must increase");
  return s;
}

double interpolate(const Series& s, double x) {
  if (x < s.x.front() || x > s.x.back()) return 0.0;
  auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  std::size_t i = std::min<std::size_t>(it - s.x.begin(), s.x.size() - 1);
  if (i == 0) return s.value.front();
  double t = (x - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
  return (1.0 - t) * s.value[i - 1] + t * s.value[i];
}

std::vector<double> cell_widths(const Series& s) {
  std::vector<double> w(s.x.size());
  if (s.histogram) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.hi[i] - s.lo[i];
    return w;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    double l = i > 0 ? s.x[i] - s.x[i - 1] : s.x[1] - s.x[0];
    double r = i + 1 < w.size() ? s.x[i + 1] - s.x[i] : l;
    w[i] = i == 0 || i + 1 == w.size() ? 0.5 * (i == 0 ? r : l) : 0.5 * (l + r);
  }
  return w;
}

bool same_nodes(const Series& a, const Series& b) {
  if (a.x.size() != b.x.size()) return false;
  for (std::size_t i = 0; i < a.x.size(); ++i)
    if (std::abs(a.x[i] - b.x[i]) > 1e-12 * (1.0 + std::abs(a.x[i]))) return false;
  return true;
}

// Mean of a node series over [lo, hi] (trapezoid of the linear interpolant on a fine sub-grid).
double cell_average(const Series& s, double lo, double hi) {
  const int n = 64;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    double w = (k == 0 || k == n) ? 0.5 : 1.0;
    acc += w * interpolate(s, lo + (hi - lo) * k / n);
  }
  return acc / n;
}

}  // namespace

CompareReport compare_files(const std::string& file_a, const std::string& file_b, const std::string& metric,
                            std::optional<double> threshold) {
  if (metric != "l1" && metric != "linf" && metric != "chi2")
    fail(ErrorKind::InvalidParameter, "invalid metric: expected l1, linf or chi2");
  Series a = load_series(file_a);
  Series b = load_series(file_b);
  CompareReport r;
  r.file_a = file_a;
  r.file_b = file_b;
  r.metric = metric;
  r.threshold = threshold;

  // put both on one set of nodes
  std::vector<double> va, vb, ea, eb, w;
  if (a.histogram != b.histogram) {
    const Series& h = a.histogram ? a : b;
    const Series& d = a.histogram ? b : a;
    r.schema = "histogram-density";
    std::vector<double> avg(h.x.size());
    for (std::size_t i = 0; i < h.x.size(); ++i) avg[i] = cell_average(d, h.lo[i], h.hi[i]);
    va = a.histogram ? h.value : avg;
    vb = a.histogram ? avg : h.value;
    ea = a.histogram ? h.error : std::vector<double>{};
    eb = a.histogram ? std::vector<double>{} : h.error;
    w = cell_widths(h);
  } else {
    r.schema = a.histogram ? "histogram" : "density";
    if (same_nodes(a, b)) {
      va = a.value;
      vb = b.value;
      ea = a.error;
      eb = b.error;
      w = cell_widths(a);
    } else {
      // linear resampling onto the finer grid
      const bool a_fine = a.x.size() >= b.x.size();
      const Series& fine = a_fine ? a : b;
      const Series& coarse = a_fine ? b : a;
      std::vector<double> res(fine.x.size());
      for (std::size_t i = 0; i < fine.x.size(); ++i) res[i] = interpolate(coarse, fine.x[i]);
      va = a_fine ? fine.value : res;
      vb = a_fine ? res : fine.value;
      ea = a_fine ? fine.error : std::vector<double>{};
      eb = a_fine ? std::vector<double>{} : fine.error;
      w = cell_widths(fine);
    }
  }
  r.points = va.size();
  double chi = 0.0;
  std::size_t dof = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    double d = va[i] - vb[i];
    r.l1 += std::abs(d) * w[i];
    r.linf = std::max(r.linf, std::abs(d));
    double var = (ea.empty() ? 0.0 : ea[i] * ea[i]) + (eb.empty() ? 0.0 : eb[i] * eb[i]);
    if (var > 0.0) {
      chi += d * d / var;
      ++dof;
    }
  }
  if (dof > 0) {
    r.chi2 = chi / static_cast<double>(dof);
    r.dof = dof;
  }
  if (metric == "chi2" && !r.chi2) fail(ErrorKind::Schema, "chi2 needs an error column (stderr) in either file");
  if (threshold) {
    double v = metric == "l1" ? r.l1 : metric == "linf" ? r.linf : *r.chi2;
    r.pass = v <= *threshold;
  }
  return r;
}

Json to_json(const CompareReport& r) {
  Json j{{"file_a", r.file_a}, {"file_b", r.file_b}, {"schema", r.schema}, {"metric", r.metric},
         {"points", r.points}, {"l1", r.l1},         {"linf", r.linf},     {"pass", r.pass}};
  j["chi2"] = r.chi2 ? Json(*r.chi2) : Json(nullptr);
  j["dof"] = r.dof;
  j["threshold"] = r.threshold ? Json(*r.threshold) : Json(nullptr);
  return j;
}

BundleResult run_scenario(const RunConfig& cfg) {
  const Model m = stage("config", [&] { return make_model(cfg); });
  const fs::path dir = cfg.out;
  BundleResult out;
  out.directory = dir.string();
  std::vector<std::string> files;
  Json timing = Json::object();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_text(dir / name, content);
    files.push_back(name);
  };
  auto timed = [&](const char* name, auto&& f) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = stage(name, f);
    timing[name] = elapsed_ms(t0);
    return r;
  };

  // thread count affects speed only and stays out of the hashed files
  RunConfig echo = cfg;
  echo.threads = 0;
  echo.out.clear();
  emit("config.txt", serialize_config(echo));

  auto table = timed("kernel", [&] { return make_mc_table(cfg, m); });
  emit("kernel.csv", kernel_csv(table, 11));
  {
    Json cols = Json::array();
    double worst = 0.0;
    for (auto& c : table.columns()) worst = std::max(worst, c.normalization_error);
    emit("kernel.json", Json{{"potential", m.potential.spec()},
                             {"alpha_grid", format_grid(table.alpha_grid())},
                             {"y_grid", format_grid(table.y_grid())},
                             {"columns", table.columns().size()},
                             {"max_normalization_error", worst}}
                            .dump(2) +
                            "\n");
  }

  auto init = timed("init", [&] { return make_initial_density(cfg, m); });
  emit("wigner.json", wigner_json(init).dump(2) + "\n");

  bool have_chain = false;
  if (cfg.n_slices <= cfg.chain_cap) {
    auto rep = timed("chain", [&] {
      ChainSpec spec = make_chain_spec(cfg, m);
      auto kt = chain_kernel_table(spec, {}, cfg.threads);
      auto pi = chain_phase_density(spec, cfg.threads);
      return equivalence_report(spec, kt, pi, cfg.threads);
    });
    if (rep.status != "ok") fail(ErrorKind::QuadratureFailure, "stage chain: " + rep.status);
    emit("chain.csv", density_csv(rep.x, rep.chain));
    emit("pathsum.csv", density_csv(rep.x, rep.pathsum));
    Json j = equivalence_json(rep);
    j.erase("runtime_ms");
    emit("chain.json", j.dump(2) + "\n");
    have_chain = true;
  }

  McConfig mc = make_mc_config(cfg, m);
  auto result = timed("mc", [&] {
    auto r = run_paths(mc, table, init);
    if (r.failed) fail(ErrorKind::Coverage, r.status);
    return r;
  });
  emit("mc_hist.csv", result.histogram.to_csv());
  for (std::size_t k = 0; k < result.snapshots.size(); ++k)
    emit("mc_snapshot_" + std::to_string(k) + ".csv", result.snapshots[k].to_csv());
  if (cfg.events) emit("mc_events.csv", events_to_csv(result.events));
  emit("mc.json", mc_json(echo, result, false).dump(2) + "\n");

  ReferencePlan plan;
  auto traj = timed("reference", [&] { return run_reference(cfg, m, &plan); });
  for (std::size_t k = 0; k < traj.size(); ++k)
    emit("reference_" + std::to_string(k) + ".csv", density_csv(traj[k].x, traj[k].density()));
  emit("reference.csv", density_csv(traj.back().x, traj.back().density()));
  emit("reference.json", reference_json(traj, plan).dump(2) + "\n");

  std::string against = cfg.compare_against;
  if (against == "auto") against = have_chain ? "pathsum" : "reference";
  if (against == "pathsum" && !have_chain) {
    fail(ErrorKind::InvalidParameter, "invalid against: pathsum needs n_slices <= cap");
  }
  if (against != "none") {
    auto rep = stage("compare", [&] {
      return compare_files((dir / "mc_hist.csv").string(), (dir / (against + ".csv")).string(), cfg.metric,
                           cfg.threshold);
    });
    // bundle-relative names keep the report independent of the output location
    rep.file_a = "mc_hist.csv";
    rep.file_b = against + ".csv";
    emit("compare.json", to_json(rep).dump(2) + "\n");
    out.threshold_failed = !rep.pass;
    out.compare = rep;
  }

  std::sort(files.begin(), files.end());
  Json manifest{{"scenario", cfg.scenario}, {"files", Json::array()}};
  for (auto& f : files) {
    ManifestEntry e{f, sha256_file(dir / f), fs::file_size(dir / f)};
    manifest["files"].push_back(Json{{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    out.files.push_back(e);
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "timing.json", timing.dump(2) + "\n");
  return out;
}

}  // namespace qprob
