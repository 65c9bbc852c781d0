#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace enga::csv {

// Shortest round-trip decimal form of a double (no locale, '.' decimal
// separator), so written values parse back bit-exactly.
std::string format_double(double v);

double parse_double(std::string_view field, std::size_t line);  // throws DataError
long parse_long(std::string_view field, std::size_t line);

// Minimal strict CSV: comma-separated, no quoting (none of the emitted
// schemas needs it), one record per line.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);  // throws DataError if unreadable

  // Reads the next row into `fields`; returns false at EOF. Blank
  // trailing line is tolerated.
  bool next(std::vector<std::string>& fields);

  std::size_t line() const { return line_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_ = 0;
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);  // throws DataError if unwritable

  void row(std::initializer_list<std::string_view> fields);
  void row(const std::vector<std::string>& fields);

 private:
  std::ofstream out_;
};

}  // namespace enga::csv
