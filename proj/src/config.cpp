#include "replab/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

#include "ini.hpp"
#include "replab/error.hpp"
#include "replab/potential.hpp"
#include "replab/report.hpp"

namespace replab {

namespace ini {

Tree parse(std::istream& in, const std::string& origin) {
  Tree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorKind::config, fmt::format("{}: {}", origin, e.message()));
  }
  return tree;
}

double to_double(const std::string& text, const std::string& key) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw Error(ErrorKind::config, fmt::format("{}: '{}' is not a number", key, text));
  return v;
}

std::uint64_t to_unsigned(const std::string& text, const std::string& key) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || text.find('-') != std::string::npos)
    throw Error(ErrorKind::config, fmt::format("{}: '{}' is not a non-negative integer", key, text));
  return v;
}

bool to_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorKind::config, fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string item;
  while (ss >> item) out.push_back(item);
  return out;
}

namespace {

void read_closure(const std::string& token, Branch& b, const std::string& key) {
  if (token.size() != 2 || (token[0] != '[' && token[0] != '(') || (token[1] != ']' && token[1] != ')'))
    throw Error(ErrorKind::config, fmt::format("{}: bad closure '{}'", key, token));
  b.lo_closed = token[0] == '[';
  b.hi_closed = token[1] == ']';
}

Branch read_branch(int id, const std::string& text, const std::string& key) {
  const auto tok = split(text);
  if (tok.size() < 5) throw Error(ErrorKind::config, fmt::format("{}: expected 'lo hi formula params'", key));
  Branch b;
  b.id = id;
  b.lo = to_double(tok[0], key);
  b.hi = to_double(tok[1], key);
  b.a = to_double(tok[3], key);
  b.b = to_double(tok[4], key);
  std::size_t used = 5;
  if (tok[2] == "affine") {
    b.formula = Formula::affine;
  } else if (tok[2] == "power") {
    if (tok.size() < 7) throw Error(ErrorKind::config, fmt::format("{}: power needs a b center exponent", key));
    b.formula = Formula::power;
    b.center = to_double(tok[5], key);
    b.exponent = to_double(tok[6], key);
    used = 7;
  } else {
    throw Error(ErrorKind::config, fmt::format("{}: unknown formula '{}'", key, tok[2]));
  }
  if (tok.size() == used + 1)
    read_closure(tok[used], b, key);
  else if (tok.size() != used)
    throw Error(ErrorKind::config, fmt::format("{}: trailing tokens", key));
  if (!(b.lo < b.hi)) throw Error(ErrorKind::config, fmt::format("{}: empty branch interval", key));
  return b;
}

std::string closure_token(const Branch& b) {
  return std::string(1, b.lo_closed ? '[' : '(') + (b.hi_closed ? ']' : ')');
}

}  // namespace

MapSpec read_map(const Tree& section) {
  MapSpec spec;
  spec.kind = section.get<std::string>("name", spec.kind);
  if (auto v = section.get_optional<std::string>("param")) spec.param = to_double(*v, "map.param");
  if (auto v = section.get_optional<std::string>("max_branches"))
    spec.max_branches = static_cast<int>(to_unsigned(*v, "map.max_branches"));
  if (spec.kind != "custom") return spec;

  if (auto v = section.get_optional<std::string>("lo")) spec.lo = to_double(*v, "map.lo");
  if (auto v = section.get_optional<std::string>("hi")) spec.hi = to_double(*v, "map.hi");
  const auto metric = section.get<std::string>("metric", "interval");
  if (metric == "circle")
    spec.metric = Metric::circle;
  else if (metric != "interval")
    throw Error(ErrorKind::config, fmt::format("map.metric: unknown '{}'", metric));
  if (auto v = section.get_optional<std::string>("singular"))
    for (const auto& s : split(*v)) spec.singular.push_back(to_double(s, "map.singular"));
  if (auto v = section.get_optional<std::string>("beta")) spec.beta = to_double(*v, "map.beta");
  if (auto v = section.get_optional<std::string>("holder_scale"))
    spec.holder_scale = to_double(*v, "map.holder_scale");
  if (auto v = section.get_optional<std::string>("holder_alpha"))
    spec.holder_alpha = to_double(*v, "map.holder_alpha");
  for (int id = 0;; ++id) {
    const std::string key = fmt::format("branch{}", id);
    auto v = section.get_optional<std::string>(key);
    if (!v) break;
    spec.branches.push_back(read_branch(id, *v, "map." + key));
  }
  return spec;
}

std::string map_lines(const MapSpec& spec) {
  std::string out;
  out += fmt::format("name = {}\n", spec.kind);
  out += fmt::format("param = {}\n", format_double(spec.param));
  out += fmt::format("max_branches = {}\n", spec.max_branches);
  if (spec.kind != "custom") return out;
  out += fmt::format("lo = {}\n", format_double(spec.lo));
  out += fmt::format("hi = {}\n", format_double(spec.hi));
  out += fmt::format("metric = {}\n", spec.metric == Metric::circle ? "circle" : "interval");
  std::string singular;
  for (double s : spec.singular) singular += (singular.empty() ? "" : " ") + format_double(s);
  out += fmt::format("singular = {}\n", singular);
  out += fmt::format("beta = {}\n", format_double(spec.beta));
  out += fmt::format("holder_scale = {}\n", format_double(spec.holder_scale));
  out += fmt::format("holder_alpha = {}\n", format_double(spec.holder_alpha));
  for (std::size_t i = 0; i < spec.branches.size(); ++i) {
    const Branch& b = spec.branches[i];
    if (b.formula == Formula::affine)
      out += fmt::format("branch{} = {} {} affine {} {} {}\n", i, format_double(b.lo), format_double(b.hi),
                         format_double(b.a), format_double(b.b), closure_token(b));
    else
      out += fmt::format("branch{} = {} {} power {} {} {} {} {}\n", i, format_double(b.lo), format_double(b.hi),
                         format_double(b.a), format_double(b.b), format_double(b.center),
                         format_double(b.exponent), closure_token(b));
  }
  return out;
}

}  // namespace ini

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"seed", "workers", "out"}},
      {"map", {"name", "param", "max_branches", "lo", "hi", "metric", "singular", "beta", "holder_scale",
               "holder_alpha"}},
      {"orbit", {"length", "burn_in"}},
      {"analysis", {"chi", "drift_threshold", "recurrence_delta", "recurrence_windows", "recurrence_depth",
                    "tail_n_max", "stride"}},
      {"entropy", {"samples", "delta", "n_grid", "eps_grid"}},
      {"repeller", {"eps", "delta", "n", "depth", "windows", "birkhoff_horizon", "rho_quantile"}},
      {"potentials", {"list"}},
      {"verify", {"max_word_length", "pressure_k", "word_cap", "subsample"}},
  };
  return keys;
}

void check_keys(const ini::Tree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw Error(ErrorKind::config, fmt::format("unknown section [{}]", section));
    for (const auto& [key, value] : body) {
      if (section == "map" && key.starts_with("branch")) continue;
      if (!it->second.count(key)) throw Error(ErrorKind::config, fmt::format("unknown key {}.{}", section, key));
    }
  }
}

template <class T>
void read(const ini::Tree& tree, const std::string& path, T& target) {
  auto v = tree.get_optional<std::string>(path);
  if (!v) return;
  if constexpr (std::is_same_v<T, double>)
    target = ini::to_double(*v, path);
  else if constexpr (std::is_same_v<T, bool>)
    target = ini::to_bool(*v, path);
  else if constexpr (std::is_same_v<T, std::string>)
    target = *v;
  else
    target = static_cast<T>(ini::to_unsigned(*v, path));
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : " ") + std::to_string(x);
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : " ") + format_double(x);
  return out;
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
  const ini::Tree tree = ini::parse(in, "config");
  check_keys(tree);
  PipelineConfig c;
  read(tree, "run.seed", c.seed);
  read(tree, "run.workers", c.workers);
  read(tree, "run.out", c.out);
  if (auto m = tree.get_child_optional("map")) c.map = ini::read_map(*m);
  read(tree, "orbit.length", c.orbit_length);
  read(tree, "orbit.burn_in", c.burn_in);
  read(tree, "analysis.chi", c.chi);
  read(tree, "analysis.drift_threshold", c.drift_threshold);
  read(tree, "analysis.recurrence_delta", c.recurrence_delta);
  read(tree, "analysis.recurrence_windows", c.recurrence_windows);
  read(tree, "analysis.recurrence_depth", c.recurrence_depth);
  read(tree, "analysis.tail_n_max", c.tail_n_max);
  read(tree, "analysis.stride", c.stride);
  read(tree, "entropy.samples", c.entropy_samples);
  read(tree, "entropy.delta", c.entropy_delta);
  if (auto v = tree.get_optional<std::string>("entropy.n_grid")) {
    c.n_grid.clear();
    for (const auto& s : ini::split(*v)) c.n_grid.push_back(ini::to_unsigned(s, "entropy.n_grid"));
  }
  if (auto v = tree.get_optional<std::string>("entropy.eps_grid")) {
    c.eps_grid.clear();
    for (const auto& s : ini::split(*v)) c.eps_grid.push_back(ini::to_double(s, "entropy.eps_grid"));
  }
  read(tree, "repeller.eps", c.eps);
  read(tree, "repeller.delta", c.delta);
  read(tree, "repeller.n", c.n);
  read(tree, "repeller.depth", c.depth);
  read(tree, "repeller.windows", c.windows);
  read(tree, "repeller.birkhoff_horizon", c.birkhoff_horizon);
  read(tree, "repeller.rho_quantile", c.rho_quantile);
  if (auto v = tree.get_optional<std::string>("potentials.list")) c.potentials = ini::split(*v);
  read(tree, "verify.max_word_length", c.max_word_length);
  read(tree, "verify.pressure_k", c.pressure_k);
  read(tree, "verify.word_cap", c.word_cap);
  read(tree, "verify.subsample", c.subsample);
  validate(c);
  return c;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, fmt::format("cannot read config '{}'", path));
  return parse_config(in);
}

void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::config, msg); };
  if (c.workers < 1) fail("run.workers must be >= 1");
  if (c.out.empty()) fail("run.out must be set");
  try {
    make_map(c.map);
  } catch (const Error& e) {
    fail(fmt::format("map: {}", e.what()));
  }
  if (c.orbit_length < 2) fail("orbit.length must be >= 2");
  if (c.n_grid.empty()) fail("entropy.n_grid is empty");
  if (c.eps_grid.empty()) fail("entropy.eps_grid is empty");
  for (auto v : c.n_grid)
    if (v < 1) fail("entropy.n_grid entries must be >= 1");
  for (auto v : c.eps_grid)
    if (!(v > 0.0)) fail("entropy.eps_grid entries must be positive");
  for (std::size_t i = 1; i < c.n_grid.size(); ++i)
    if (c.n_grid[i] <= c.n_grid[i - 1]) fail("entropy.n_grid must be strictly increasing");
  if (c.entropy_samples < 1) fail("entropy.samples must be >= 1");
  if (!(c.entropy_delta > 0.0 && c.entropy_delta < 1.0)) fail("entropy.delta must lie in (0,1)");
  if (!(c.delta > 0.0 && c.delta < 0.5)) fail("repeller.delta must lie in (0,1/2)");
  if (!(c.eps > 0.0)) fail("repeller.eps must be positive");
  if (c.n < 1 || c.depth < 1 || c.windows < 1) fail("repeller.n, depth and windows must be >= 1");
  if (!(c.rho_quantile >= 0.0 && c.rho_quantile < 1.0)) fail("repeller.rho_quantile must lie in [0,1)");
  if (c.chi < 0.0) fail("analysis.chi must be >= 0");
  if (c.recurrence_delta < 0.0) fail("analysis.recurrence_delta must be >= 0");
  if (c.stride < 1) fail("analysis.stride must be >= 1");
  if (c.tail_n_max < 1) fail("analysis.tail_n_max must be >= 1");
  if (c.max_word_length < 1 || c.pressure_k < 1) fail("verify word lengths must be >= 1");
  if (!(c.word_cap >= 1.0)) fail("verify.word_cap must be >= 1");
  try {
    for (const auto& p : c.potentials) Potential::parse(p);
  } catch (const Error& e) {
    fail(fmt::format("potentials: {}", e.what()));
  }
  if (c.chi > 0.0) require_epsilon_below(c, c.chi);
}

void require_epsilon_below(const PipelineConfig& c, double chi) {
  if (!(c.eps > 0.0 && 3.0 * c.eps < chi))
    throw Error(ErrorKind::config,
                fmt::format("repeller.eps = {} must lie in (0, chi/3) with chi = {}", format_double(c.eps),
                            format_double(chi)));
}

std::string map_spec_text(const MapSpec& spec) { return ini::map_lines(spec); }

void echo_config(KvWriter& out, const PipelineConfig& c) {
  out.begin("config");
  out.put("seed", c.seed);
  out.begin("map");
  std::istringstream lines(ini::map_lines(c.map));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    out.put(line.substr(0, eq), line.substr(eq + 3));
  }
  out.end();
  out.put("orbit_length", c.orbit_length);
  out.put("burn_in", c.burn_in);
  out.put("chi", c.chi);
  out.put("drift_threshold", c.drift_threshold);
  out.put("recurrence_delta", c.recurrence_delta);
  out.put("recurrence_windows", c.recurrence_windows);
  out.put("recurrence_depth", c.recurrence_depth);
  out.put("tail_n_max", c.tail_n_max);
  out.put("stride", c.stride);
  out.put("entropy_samples", c.entropy_samples);
  out.put("entropy_delta", c.entropy_delta);
  out.put("n_grid", join_sizes(c.n_grid));
  out.put("eps_grid", join_doubles(c.eps_grid));
  out.put("eps", c.eps);
  out.put("delta", c.delta);
  out.put("n", c.n);
  out.put("depth", c.depth);
  out.put("windows", c.windows);
  out.put("birkhoff_horizon", c.birkhoff_horizon);
  out.put("rho_quantile", c.rho_quantile);
  std::string pots;
  for (const auto& p : c.potentials) pots += (pots.empty() ? "" : " ") + p;
  out.put("potentials", pots);
  out.put("max_word_length", c.max_word_length);
  out.put("pressure_k", c.pressure_k);
  out.put("word_cap", c.word_cap);
  out.put("subsample", c.subsample);
  out.end();
}

}  // namespace replab
