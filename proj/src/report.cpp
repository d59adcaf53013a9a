#include "replab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "replab/error.hpp"

namespace replab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

void KvWriter::begin(std::string_view section) {
  text_.append(static_cast<std::size_t>(2 * depth_), ' ');
  text_.append(section);
  text_.append(":\n");
  ++depth_;
}

void KvWriter::end() {
  if (depth_ > 0) --depth_;
}

void KvWriter::put(std::string_view key, std::string_view value) {
  text_.append(static_cast<std::size_t>(2 * depth_), ' ');
  text_.append(key);
  text_.append(" = ");
  text_.append(value);
  text_.push_back('\n');
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvTable::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) throw Error(ErrorKind::io, "csv row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_.push_back(',');
    text_.append(fields[i]);
  }
  text_.push_back('\n');
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, fmt::format("cannot write '{}'", path));
  out << text;
  if (!out) throw Error(ErrorKind::io, fmt::format("write to '{}' failed", path));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace replab
