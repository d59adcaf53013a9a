// replab: analyze / entropy / build / verify front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "replab/config.hpp"
#include "replab/error.hpp"
#include "replab/kernels.hpp"
#include "replab/pipeline.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  std::optional<std::string> map;
  std::optional<double> param;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::size_t> n;
  std::optional<std::size_t> length;
  std::optional<std::size_t> samples;
  std::optional<std::string> potentials;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "config file (key = value with [sections])");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--map", o.map, "builtin map name");
  cmd->add_option("--param", o.param, "map parameter (quadratic a, linear slope)");
  cmd->add_option("--length", o.length, "orbit length");
  cmd->add_option("--potentials", o.potentials, "space separated potential names");
}

replab::PipelineConfig resolve(const Overrides& o) {
  replab::PipelineConfig c = o.config_path.empty() ? replab::PipelineConfig{} : replab::load_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.workers) c.workers = *o.workers;
  if (o.out) c.out = *o.out;
  if (o.map) {
    c.map = replab::MapSpec{};
    c.map.kind = *o.map;
  }
  if (o.param) c.map.param = *o.param;
  if (o.eps) c.eps = *o.eps;
  if (o.delta) c.delta = *o.delta;
  if (o.n) c.n = *o.n;
  if (o.length) c.orbit_length = *o.length;
  if (o.samples) c.entropy_samples = *o.samples;
  if (o.potentials) {
    c.potentials.clear();
    std::istringstream ss(*o.potentials);
    for (std::string p; ss >> p;) c.potentials.push_back(p);
  }
  replab::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniformly expanding repellers inside non-uniformly expanding interval maps"};
  app.require_subcommand(1);
  Overrides o;

  auto* analyze = app.add_subcommand("analyze", "Lyapunov, integrability and recurrence diagnostics");
  add_common(analyze, o);

  auto* entropy = app.add_subcommand("entropy", "Katok entropy grid from separated sets");
  add_common(entropy, o);
  entropy->add_option("--samples", o.samples, "pool size");

  auto* build = app.add_subcommand("build", "construct the repeller IFS and verify it");
  add_common(build, o);
  build->add_option("--eps", o.eps, "epsilon, must lie in (0, chi/3)");
  build->add_option("--delta", o.delta, "good-set mass deficit");
  build->add_option("-n", o.n, "return-time lower bound");
  build->add_option("--samples", o.samples, "entropy pool size");

  std::string ifs_path;
  auto* verify = app.add_subcommand("verify", "re-run the verification from a saved IFS");
  add_common(verify, o);
  verify->add_option("ifs", ifs_path, "IFS file written by build")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const replab::PipelineConfig config = resolve(o);
    replab::set_worker_count(config.workers);
    replab::CommandResult result;
    if (*analyze)
      result = replab::cmd_analyze(config);
    else if (*entropy)
      result = replab::cmd_entropy(config);
    else if (*build)
      result = replab::cmd_build(config);
    else
      result = replab::cmd_verify(ifs_path, config);
    std::cout << result.summary;
    return result.exit_code;
  } catch (const replab::Error& e) {
    std::cerr << "replab: " << e.what() << '\n';
    const bool user = e.kind() == replab::ErrorKind::config || e.kind() == replab::ErrorKind::io ||
                      e.kind() == replab::ErrorKind::bad_parameter;
    return user ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "replab: " << e.what() << '\n';
    return 1;
  }
}
