#pragma once

// Self-contained text form of a built repeller: the map, the base ball, m,
// every branch as (anchor, ids), the constants and the ergodic estimates the
// verification compares against. Loading retraces each branch from its
// anchor and checks the ids.

#include <string>
#include <vector>

#include "replab/repeller.hpp"

namespace replab {

struct StoredRepeller {
  RepellerIFS ifs;
  double h_mu = 0.0;
  std::vector<std::string> potentials;
  std::vector<double> means;
  VerifyOptions verify;
};

std::string serialize_repeller(const StoredRepeller& stored);
StoredRepeller parse_repeller(const std::string& text);

void save_repeller(const std::string& path, const StoredRepeller& stored);
StoredRepeller load_repeller(const std::string& path);

}  // namespace replab
