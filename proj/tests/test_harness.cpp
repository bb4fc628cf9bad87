#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qprob/error.hpp"
#include "qprob/scenario.hpp"

using namespace qprob;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("qprob_harness_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const char* exe = std::getenv("QPROB_CLI");
  REQUIRE_MESSAGE(exe != nullptr, "QPROB_CLI is not set");
  int rc = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("compare identical and shifted files") {
  auto d = scratch("compare");
  write(d / "a.csv", "x,rho\n0,0.1\n1,0.5\n2,0.4\n");
  write(d / "b.csv", "x,rho\n0,0.1\n1,0.4\n2,0.5\n");
  auto same = compare_files((d / "a.csv").string(), (d / "a.csv").string(), "l1", 0.0);
  CHECK(same.l1 == 0.0);
  CHECK(same.linf == 0.0);
  CHECK(same.pass);
  CHECK(same.schema == "density");
  auto diff = compare_files((d / "a.csv").string(), (d / "b.csv").string(), "linf", 0.05);
  CHECK(diff.linf == doctest::Approx(0.1));
  // trapezoid cell widths 0.5, 1, 0.5
  CHECK(diff.l1 == doctest::Approx(0.15));
  CHECK_FALSE(diff.pass);
  write(d / "h.csv", "bin_lo,bin_hi,signed,abs,pos,neg,density,stderr\n0,1,5,5,5,0,0.5,0.05\n1,2,5,5,5,0,0.5,0.05\n");
  write(d / "r.csv", "x,rho\n0,0.5\n1,0.5\n2,0.5\n");
  auto mixed = compare_files((d / "h.csv").string(), (d / "r.csv").string(), "chi2", std::nullopt);
  CHECK(mixed.schema == "histogram-density");
  REQUIRE(mixed.chi2.has_value());
  CHECK(*mixed.chi2 == doctest::Approx(0.0));
  fs::remove_all(d);
}

TEST_CASE("compare rejects unknown schemas") {
  auto d = scratch("schema");
  write(d / "a.csv", "foo,bar\n1,2\n");
  write(d / "b.csv", "x,rho\n0,1\n1,1\n");
  try {
    compare_files((d / "a.csv").string(), (d / "b.csv").string(), "l1", std::nullopt);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
  }
  CHECK_THROWS_AS(compare_files((d / "b.csv").string(), (d / "b.csv").string(), "chi2", std::nullopt), Error);
  CHECK_THROWS_AS(compare_files((d / "missing.csv").string(), (d / "b.csv").string(), "l1", std::nullopt), Error);
  fs::remove_all(d);
}

TEST_CASE("scenario bundles are reproducible") {
  auto d = scratch("bundle");
  RunConfig cfg = preset_config("harmonic-coherent");
  cfg.trials = 20000;
  cfg.snapshot_every = 5000;
  cfg.out = (d / "one").string();
  cfg.threads = 1;
  auto a = run_scenario(cfg);
  cfg.out = (d / "two").string();
  cfg.threads = 4;
  auto b = run_scenario(cfg);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CAPTURE(a.files[i].path);
    CHECK(a.files[i].path == b.files[i].path);
    CHECK(a.files[i].sha256 == b.files[i].sha256);
  }
  CHECK(read(d / "one" / "manifest.json") == read(d / "two" / "manifest.json"));
  CHECK(fs::exists(d / "one" / "timing.json"));
  REQUIRE(a.compare.has_value());
  CHECK(a.compare->points > 0);
  // the echoed config reproduces the run
  RunConfig echo = load_config((d / "one" / "config.txt").string());
  CHECK(echo.trials == 20000);
  CHECK(echo.threads == 0);
  fs::remove_all(d);
}

TEST_CASE("unknown scenario") { CHECK_THROWS_AS(preset_config("nope"), Error); }

TEST_CASE("cli exit codes") {
  auto d = scratch("cli");
  const std::string out = " --out " + (d / "k").string();
  CHECK(cli("--help") == 0);
  CHECK(cli("kernel --potential harmonic:k=0.1 --alpha-grid -2:2:5" + out) == 0);
  CHECK(fs::exists(d / "k" / "kernel.csv"));
  CHECK(cli("kernel --potential bogus" + out) == 2);
  CHECK(cli("kernel --no-such-flag") == 2);
  CHECK(cli("mc --trials -5" + out) == 2);
  CHECK(cli("--set mc.trails=5 mc" + out) == 2);
  CHECK(cli("chain --N 9 --cap 4" + out) == 2);
  CHECK(cli("kernel --potential gauss:h=1,w=1,x0=0 --alpha-grid -1:1:3 --y-grid -0.5:0.5:101" + out) == 3);
  write(d / "a.csv", "x,rho\n0,0.1\n1,0.5\n");
  write(d / "b.csv", "x,rho\n0,0.3\n1,0.5\n");
  const std::string ab = " " + (d / "a.csv").string() + " " + (d / "b.csv").string();
  CHECK(cli("compare" + ab + " --metric linf --threshold 0.5") == 0);
  CHECK(cli("compare" + ab + " --metric linf --threshold 0.1") == 4);
  CHECK(cli("compare" + ab + " --metric chi2") == 2);
  fs::remove_all(d);
}
