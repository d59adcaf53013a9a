#include "replab/serialize.hpp"

#include <sstream>

#include <fmt/format.h>

#include "ini.hpp"
#include "replab/error.hpp"
#include "replab/report.hpp"

namespace replab {

namespace {

std::string need(const ini::Tree& tree, const std::string& path) {
  auto v = tree.get_optional<std::string>(path);
  if (!v) throw Error(ErrorKind::config, fmt::format("IFS file lacks {}", path));
  return *v;
}

double need_double(const ini::Tree& tree, const std::string& path) { return ini::to_double(need(tree, path), path); }

std::size_t need_size(const ini::Tree& tree, const std::string& path) {
  return static_cast<std::size_t>(ini::to_unsigned(need(tree, path), path));
}

}  // namespace

std::string serialize_repeller(const StoredRepeller& s) {
  const RepellerIFS& ifs = s.ifs;
  if (!ifs.map) throw Error(ErrorKind::bad_parameter, "IFS without a map");
  if (s.potentials.size() != s.means.size()) throw Error(ErrorKind::bad_parameter, "one mean per potential");
  std::string out = "; replab repeller\n[map]\n";
  out += ini::map_lines(ifs.map->spec());

  out += "\n[ifs]\n";
  out += fmt::format("m = {}\n", ifs.m);
  out += fmt::format("base_center = {}\n", format_double(ifs.base_center));
  out += fmt::format("base_radius = {}\n", format_double(ifs.base_radius));
  out += fmt::format("rho = {}\n", format_double(ifs.rho));
  out += fmt::format("chi = {}\n", format_double(ifs.chi));
  out += fmt::format("eps = {}\n", format_double(ifs.eps));
  out += fmt::format("contraction_bound = {}\n", format_double(ifs.contraction_bound));
  out += fmt::format("full_shift = {}\n", ifs.full_shift ? "true" : "false");
  out += fmt::format("candidates = {}\n", ifs.candidates);
  out += fmt::format("rejected_escape = {}\n", ifs.rejected.escape);
  out += fmt::format("rejected_containment = {}\n", ifs.rejected.containment);
  out += fmt::format("rejected_diameter = {}\n", ifs.rejected.diameter);
  out += fmt::format("rejected_lipschitz = {}\n", ifs.rejected.lipschitz);
  out += fmt::format("rejected_overlap = {}\n", ifs.rejected.overlap);

  out += "\n[estimates]\n";
  out += fmt::format("h_mu = {}\n", format_double(s.h_mu));
  std::string names;
  for (const auto& p : s.potentials) names += (names.empty() ? "" : " ") + p;
  out += fmt::format("potentials = {}\n", names);
  for (std::size_t i = 0; i < s.means.size(); ++i) out += fmt::format("mean{} = {}\n", i, format_double(s.means[i]));

  out += "\n[verify]\n";
  out += fmt::format("max_word_length = {}\n", s.verify.max_word_length);
  out += fmt::format("pressure_k = {}\n", s.verify.pressure_k);
  out += fmt::format("word_cap = {}\n", format_double(s.verify.pressure.cap));
  out += fmt::format("subsample = {}\n", s.verify.pressure.subsample ? "true" : "false");
  out += fmt::format("seed = {}\n", s.verify.pressure.seed);
  out += fmt::format("modulus_samples = {}\n", s.verify.modulus_samples);

  out += "\n[branches]\n";
  for (std::size_t i = 0; i < ifs.branches.size(); ++i) {
    const IfsBranch& b = ifs.branches[i];
    out += fmt::format("b{} = {}", i, format_double(b.anchor));
    for (int id : b.ids) out += fmt::format(" {}", id);
    out += '\n';
  }
  return out;
}

StoredRepeller parse_repeller(const std::string& text) {
  std::istringstream in(text);
  const ini::Tree tree = ini::parse(in, "IFS file");
  StoredRepeller s;
  RepellerIFS& ifs = s.ifs;
  const auto map_section = tree.get_child_optional("map");
  if (!map_section) throw Error(ErrorKind::config, "IFS file lacks [map]");
  try {
    ifs.map = std::make_shared<const MapSystem>(make_map(ini::read_map(*map_section)));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, fmt::format("IFS map: {}", e.what()));
  }
  ifs.m = need_size(tree, "ifs.m");
  ifs.base_center = need_double(tree, "ifs.base_center");
  ifs.base_radius = need_double(tree, "ifs.base_radius");
  ifs.rho = need_double(tree, "ifs.rho");
  ifs.chi = need_double(tree, "ifs.chi");
  ifs.eps = need_double(tree, "ifs.eps");
  ifs.contraction_bound = need_double(tree, "ifs.contraction_bound");
  ifs.full_shift = ini::to_bool(need(tree, "ifs.full_shift"), "ifs.full_shift");
  ifs.candidates = need_size(tree, "ifs.candidates");
  ifs.rejected.escape = need_size(tree, "ifs.rejected_escape");
  ifs.rejected.containment = need_size(tree, "ifs.rejected_containment");
  ifs.rejected.diameter = need_size(tree, "ifs.rejected_diameter");
  ifs.rejected.lipschitz = need_size(tree, "ifs.rejected_lipschitz");
  ifs.rejected.overlap = need_size(tree, "ifs.rejected_overlap");
  if (ifs.m < 1) throw Error(ErrorKind::config, "IFS m must be >= 1");

  s.h_mu = need_double(tree, "estimates.h_mu");
  s.potentials = ini::split(tree.get<std::string>("estimates.potentials", ""));
  for (std::size_t i = 0; i < s.potentials.size(); ++i)
    s.means.push_back(need_double(tree, fmt::format("estimates.mean{}", i)));

  s.verify.max_word_length = need_size(tree, "verify.max_word_length");
  s.verify.pressure_k = need_size(tree, "verify.pressure_k");
  s.verify.pressure.cap = need_double(tree, "verify.word_cap");
  s.verify.pressure.subsample = ini::to_bool(need(tree, "verify.subsample"), "verify.subsample");
  s.verify.pressure.seed = ini::to_unsigned(need(tree, "verify.seed"), "verify.seed");
  s.verify.modulus_samples = need_size(tree, "verify.modulus_samples");

  // Branch lines are read in file order; a removed line just shrinks the IFS.
  if (auto branches = tree.get_child_optional("branches")) {
    for (const auto& [key, value] : *branches) {
      const auto tok = ini::split(value.data());
      if (tok.size() != ifs.m + 1)
        throw Error(ErrorKind::config, fmt::format("branch {} needs an anchor and {} ids", key, ifs.m));
      IfsBranch b;
      b.anchor = ini::to_double(tok[0], key);
      for (std::size_t t = 1; t < tok.size(); ++t)
        b.ids.push_back(static_cast<int>(ini::to_unsigned(tok[t], key)));
      ifs.branches.push_back(std::move(b));
    }
  }
  if (ifs.branches.empty()) throw Error(ErrorKind::config, "IFS file has no branches");
  rebuild_branches(ifs);
  return s;
}

void save_repeller(const std::string& path, const StoredRepeller& stored) {
  write_text(path, serialize_repeller(stored));
}

StoredRepeller load_repeller(const std::string& path) { return parse_repeller(read_text(path)); }

}  // namespace replab
