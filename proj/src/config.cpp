#include "qprob/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "qprob/error.hpp"
#include "qprob/format.hpp"
#include "qprob/initial_state.hpp"
#include "qprob/lattice.hpp"
#include "qprob/potential.hpp"

namespace qprob {

namespace {

struct Field {
  const char* block;  // "" for top level
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::string fmt_grid(const std::optional<Grid>& g) { return g ? format_grid(*g) : "auto"; }
std::optional<Grid> get_grid(std::string_view v) {
  if (trim(v) == "auto") return std::nullopt;
  return parse_grid(v);
}

bool parse_bool(std::string_view v, std::string_view field) {
  v = trim(v);
  if (v == "true") return true;
  if (v == "false") return false;
  fail(ErrorKind::Parse, std::string(field) + ": expected true or false");
}

int parse_small_int(std::string_view v, std::string_view field) {
  auto x = parse_int(v, field);
  if (x < -1000000000 || x > 1000000000) fail(ErrorKind::InvalidParameter, std::string(field) + " out of range");
  return static_cast<int>(x);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"", "scenario", [](auto& c) { return c.scenario; }, [](auto& c, auto v) { c.scenario = std::string(trim(v)); }},
      {"", "out", [](auto& c) { return c.out; }, [](auto& c, auto v) { c.out = std::string(trim(v)); }},
      {"", "seed", [](auto& c) { return std::to_string(c.seed); }, [](auto& c, auto v) { c.seed = parse_u64(v, "seed"); }},
      {"", "threads", [](auto& c) { return std::to_string(c.threads); },
       [](auto& c, auto v) { c.threads = parse_small_int(v, "threads"); }},
      {"lattice", "n_slices", [](auto& c) { return std::to_string(c.n_slices); },
       [](auto& c, auto v) { c.n_slices = parse_small_int(v, "n_slices"); }},
      {"lattice", "epsilon", [](auto& c) { return format_double(c.epsilon); },
       [](auto& c, auto v) { c.epsilon = parse_double(v, "epsilon"); }},
      {"lattice", "mass", [](auto& c) { return format_double(c.mass); }, [](auto& c, auto v) { c.mass = parse_double(v, "mass"); }},
      {"lattice", "hbar", [](auto& c) { return format_double(c.hbar); }, [](auto& c, auto v) { c.hbar = parse_double(v, "hbar"); }},
      {"model", "potential", [](auto& c) { return c.potential; }, [](auto& c, auto v) { c.potential = std::string(trim(v)); }},
      {"model", "state", [](auto& c) { return c.state; }, [](auto& c, auto v) { c.state = std::string(trim(v)); }},
      {"kernel", "alpha", [](auto& c) { return fmt_grid(c.kernel_alpha); }, [](auto& c, auto v) { c.kernel_alpha = get_grid(v); }},
      {"kernel", "y", [](auto& c) { return fmt_grid(c.kernel_y); }, [](auto& c, auto v) { c.kernel_y = get_grid(v); }},
      {"kernel", "tail_tol", [](auto& c) { return format_double(c.tail_tol); },
       [](auto& c, auto v) { c.tail_tol = parse_double(v, "tail_tol"); }},
      {"init", "alpha", [](auto& c) { return fmt_grid(c.init_alpha); }, [](auto& c, auto v) { c.init_alpha = get_grid(v); }},
      {"init", "v", [](auto& c) { return fmt_grid(c.init_v); }, [](auto& c, auto v) { c.init_v = get_grid(v); }},
      {"chain", "grid", [](auto& c) { return fmt_grid(c.chain_grid); }, [](auto& c, auto v) { c.chain_grid = get_grid(v); }},
      {"chain", "cap", [](auto& c) { return std::to_string(c.chain_cap); },
       [](auto& c, auto v) { c.chain_cap = parse_small_int(v, "cap"); }},
      {"mc", "trials", [](auto& c) { return std::to_string(c.trials); }, [](auto& c, auto v) { c.trials = parse_u64(v, "trials"); }},
      {"mc", "bins", [](auto& c) { return c.bins ? format_bins(*c.bins) : std::string("auto"); },
       [](auto& c, auto v) {
         if (trim(v) == "auto") c.bins.reset(); else c.bins = parse_bins(v);
       }},
      {"mc", "snapshot_every", [](auto& c) { return std::to_string(c.snapshot_every); },
       [](auto& c, auto v) { c.snapshot_every = parse_u64(v, "snapshot_every"); }},
      {"mc", "events", [](auto& c) { return std::string(c.events ? "true" : "false"); },
       [](auto& c, auto v) { c.events = parse_bool(v, "events"); }},
      {"reference", "grid", [](auto& c) { return fmt_grid(c.reference_grid); },
       [](auto& c, auto v) { c.reference_grid = get_grid(v); }},
      {"reference", "steps", [](auto& c) { return std::to_string(c.reference_steps); },
       [](auto& c, auto v) { c.reference_steps = parse_u64(v, "reference steps"); }},
      {"reference", "snapshots", [](auto& c) { return std::to_string(c.reference_snapshots); },
       [](auto& c, auto v) { c.reference_snapshots = parse_u64(v, "reference snapshots"); }},
      {"compare", "against", [](auto& c) { return c.compare_against; },
       [](auto& c, auto v) { c.compare_against = std::string(trim(v)); }},
      {"compare", "metric", [](auto& c) { return c.metric; }, [](auto& c, auto v) { c.metric = std::string(trim(v)); }},
      {"compare", "threshold", [](auto& c) { return c.threshold ? format_double(*c.threshold) : std::string("none"); },
       [](auto& c, auto v) {
         if (trim(v) == "none") c.threshold.reset(); else c.threshold = parse_double(v, "threshold");
       }},
  };
  return f;
}

const Field* find_field(std::string_view block, std::string_view key) {
  for (auto& f : fields())
    if (block == f.block && key == f.key) return &f;
  return nullptr;
}

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view dotted_key, std::string_view value) {
  auto dot = dotted_key.find('.');
  std::string_view block = dot == std::string_view::npos ? std::string_view{} : dotted_key.substr(0, dot);
  std::string_view key = dot == std::string_view::npos ? dotted_key : dotted_key.substr(dot + 1);
  const Field* f = find_field(trim(block), trim(key));
  if (!f) fail(ErrorKind::Parse, "unknown config key '" + std::string(dotted_key) + "'");
  f->set(cfg, value);
}

RunConfig parse_config(std::string_view text, RunConfig cfg) {
  std::string block;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorKind::Parse, where + "unterminated block header");
      block = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = block.empty();
      for (auto& f : fields()) known = known || block == f.block;
      if (!known) fail(ErrorKind::Parse, where + "unknown block [" + block + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorKind::Parse, where + "expected key = value");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    const Field* f = find_field(block, key);
    if (!f) {
      fail(ErrorKind::Parse, where + "unknown key '" + std::string(key) + "'" + (block.empty() ? "" : " in [" + block + "]"));
    }
    try {
      f->set(cfg, value);
    } catch (const Error& e) {
      fail(e.kind(), where + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::string s;
  std::string block = "";
  for (auto& f : fields()) {
    if (block != f.block) {
      block = f.block;
      s += "\n[" + block + "]\n";
    }
    s += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return s;
}

void validate_config(const RunConfig& cfg) {
  auto bad = [](const std::string& field, const std::string& why) {
    fail(ErrorKind::InvalidParameter, "invalid " + field + ": " + why);
  };
  if (cfg.trials < 1) bad("trials", "must be >= 1");
  if (cfg.n_slices < 0) bad("n_slices", "must be >= 0");
  if (cfg.threads < 0) bad("threads", "must be >= 0");
  if (cfg.chain_cap < 0) bad("cap", "must be >= 0");
  if (cfg.snapshot_every > 0 && cfg.trials / cfg.snapshot_every > 1000) {
    bad("snapshot_every", "more than 1000 snapshots requested (interval counts trials)");
  }
  if (!(cfg.tail_tol > 0.0)) bad("tail_tol", "must be positive");
  if (cfg.reference_snapshots < 1) bad("reference snapshots", "must be >= 1");
  try {
    make_lattice(cfg.n_slices, cfg.epsilon, cfg.mass, cfg.hbar);
  } catch (const Error& e) {
    bad("lattice", e.what());
  }
  try {
    Potential::parse(cfg.potential);
  } catch (const Error& e) {
    bad("potential", e.what());
  }
  try {
    InitialState::parse(cfg.state);
  } catch (const Error& e) {
    bad("state", e.what());
  }
  if (cfg.compare_against != "auto" && cfg.compare_against != "reference" && cfg.compare_against != "pathsum" &&
      cfg.compare_against != "none") {
    bad("against", "expected auto, reference, pathsum or none");
  }
  if (cfg.metric != "l1" && cfg.metric != "linf" && cfg.metric != "chi2") bad("metric", "expected l1, linf or chi2");
}

}  // namespace qprob
