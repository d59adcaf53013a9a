#pragma once

// Shared helpers for the INI-style config and IFS files.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "replab/maps.hpp"

namespace replab::ini {

using Tree = boost::property_tree::ptree;

Tree parse(std::istream& in, const std::string& origin);

double to_double(const std::string& text, const std::string& key);
std::uint64_t to_unsigned(const std::string& text, const std::string& key);
bool to_bool(const std::string& text, const std::string& key);
std::vector<std::string> split(const std::string& text);

MapSpec read_map(const Tree& section);
std::string map_lines(const MapSpec& spec);

}  // namespace replab::ini
