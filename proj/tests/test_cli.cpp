#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "replab/config.hpp"
#include "replab/error.hpp"
#include "replab/pipeline.hpp"
#include "replab/report.hpp"
#include "replab/serialize.hpp"

using namespace replab;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"([run]
seed = 3
[map]
name = doubling
[orbit]
length = 100000
[analysis]
recurrence_windows = 3
[entropy]
samples = 50000
n_grid = 1 2 3 4 5 6 7 8
eps_grid = 0.0625 0.03125
[repeller]
windows = 2000
[potentials]
list = x x^2 logdf
)";

PipelineConfig small_config(const std::string& out) {
  std::istringstream in(kSmall);
  PipelineConfig c = parse_config(in);
  c.out = out;
  return c;
}

ErrorKind config_error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::singular_point;  // nothing thrown
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("replab_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_exe(const std::string& args) {
  const std::string cmd = std::string(REPLAB_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = small_config("x");
  CHECK(c.seed == 3);
  CHECK(c.map.kind == "doubling");
  CHECK(c.orbit_length == 100000);
  CHECK(c.n_grid.size() == 8);
  CHECK(c.eps_grid == std::vector<double>{0.0625, 0.03125});
  CHECK(c.potentials == std::vector<std::string>{"x", "x^2", "logdf"});
  CHECK(c.eps == 0.15);

  CHECK(config_error_of("[nope]\na = 1\n") == ErrorKind::config);
  CHECK(config_error_of("[run]\ncolour = red\n") == ErrorKind::config);
  CHECK(config_error_of("[orbit]\nlength = many\n") == ErrorKind::config);
  CHECK(config_error_of("[entropy]\nn_grid = 3 2\n") == ErrorKind::config);
  CHECK(config_error_of("[repeller]\neps = -1\n") == ErrorKind::config);

  std::istringstream custom(R"([map]
name = custom
metric = circle
branch0 = 0 0.5 affine 2 0 [)
branch1 = 0.5 1 affine 2 -1 [)
)");
  const auto cc = parse_config(custom);
  REQUIRE(cc.map.branches.size() == 2);
  CHECK(cc.map.branches[1].b == -1.0);
  CHECK(make_map(cc.map).eval(0.75) == doctest::Approx(0.5));
}

TEST_CASE("epsilon must lie below chi / 3") {
  auto c = small_config("x");
  CHECK_NOTHROW(require_epsilon_below(c, 0.6));
  c.eps = 0.3;
  bool thrown = false;
  try {
    require_epsilon_below(c, std::log(2.0));
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::config;
  }
  CHECK(thrown);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0})
    CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("analyze, entropy, build and verify on a small doubling config") {
  const fs::path dir = scratch("pipeline");
  const auto c = small_config(dir.string());

  const auto a = cmd_analyze(c);
  CHECK(a.exit_code == 0);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "integrability.csv"));

  const auto e = cmd_entropy(c);
  CHECK(e.exit_code == 0);
  CHECK(fs::exists(dir / "entropy_grid.csv"));

  // At this size the Birkhoff part may miss its budget, so only the
  // construction itself is required to finish.
  const auto b = cmd_build(c);
  CHECK((b.exit_code == 0 || b.exit_code == 2));
  CHECK(read_text((dir / "report.txt").string()).find("stage = complete") != std::string::npos);
  REQUIRE(fs::exists(dir / "ifs.txt"));
  const std::string built_verification = read_text((dir / "verification.txt").string());

  // Serialization is a fixed point.
  const auto stored = load_repeller((dir / "ifs.txt").string());
  CHECK(serialize_repeller(stored) == read_text((dir / "ifs.txt").string()));
  CHECK(stored.ifs.branches.size() > 0);
  CHECK(stored.potentials == std::vector<std::string>{"x", "x^2", "logdf"});

  auto vc = c;
  vc.out = (dir / "verify").string();
  const auto v = cmd_verify((dir / "ifs.txt").string(), vc);
  CHECK(v.exit_code == b.exit_code);
  CHECK(read_text((dir / "verify" / "verification.txt").string()) == built_verification);
}

TEST_CASE("tampered IFS files") {
  const fs::path dir = scratch("tamper");
  const auto c = small_config(dir.string());
  cmd_build(c);
  REQUIRE(fs::exists(dir / "ifs.txt"));
  std::string text = read_text((dir / "ifs.txt").string());

  // Dropping a branch line shrinks the IFS and lowers its entropy.
  const auto pos = text.find("\nb0 = ");
  REQUIRE(pos != std::string::npos);
  const auto end = text.find('\n', pos + 1);
  std::string shorter = text;
  shorter.erase(pos, end - pos);
  const auto full = parse_repeller(text);
  const auto cut = parse_repeller(shorter);
  CHECK(cut.ifs.branches.size() + 1 == full.ifs.branches.size());
  CHECK(repeller_entropy(cut.ifs) < repeller_entropy(full.ifs));

  bool thrown = false;
  try {
    parse_repeller("[map]\nname = doubling\n[ifs]\nm = banana\n");
  } catch (const Error& e) {
    thrown = e.kind() == ErrorKind::config;
  }
  CHECK(thrown);
}

TEST_CASE("build stops at the good set stage for the cusp map") {
  const fs::path dir = scratch("cusp");
  auto c = small_config(dir.string());
  c.map = MapSpec{};
  c.map.kind = "cusp";
  c.eps = 0.1;
  const auto r = cmd_build(c);
  CHECK(r.exit_code == 2);
  const std::string report = read_text((dir / "report.txt").string());
  CHECK(report.find("stage = good_set") != std::string::npos);
}

TEST_CASE("executable exit codes") {
  const fs::path dir = scratch("exe");
  const std::string out = " --out " + dir.string();
  CHECK(run_exe("entropy --map doubling --samples 20000 --seed 2" + out) == 0);
  CHECK(run_exe("build --map doubling --eps 0.3 --length 20000" + out) == 1);
  CHECK(run_exe("analyze --config /no/such/file.cfg" + out) == 1);
  CHECK(run_exe("analyze --map no-such-map" + out) == 1);
  CHECK(run_exe("frobnicate") == 1);
  CHECK(run_exe("verify /no/such/ifs.txt" + out) == 1);
}
