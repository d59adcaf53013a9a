#pragma once

// Structured text reports: `key = value` lines, nested sections indented by
// two spaces, keys kept in insertion order. Doubles are written in the
// shortest form that reads back to the same value.

#include <concepts>
#include <string>
#include <string_view>
#include <vector>

namespace replab {

std::string format_double(double v);

class KvWriter {
 public:
  void begin(std::string_view section);
  void end();

  void put(std::string_view key, std::string_view value);
  void put(std::string_view key, const char* value) { put(key, std::string_view(value)); }
  void put(std::string_view key, const std::string& value) { put(key, std::string_view(value)); }
  void put(std::string_view key, double value) { put(key, std::string_view(format_double(value))); }
  void put(std::string_view key, bool value) { put(key, std::string_view(value ? "true" : "false")); }
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  void put(std::string_view key, T value) {
    put(key, std::string_view(std::to_string(value)));
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
  int depth_ = 0;
};

// Comma-separated rows with a header; fields are written as given.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  std::string str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

// Writes `text` to `path`, creating parent directories. Throws Io.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace replab
