#include "enga/csv.hpp"

#include <charconv>
#include <system_error>

#include "enga/errors.hpp"

namespace enga::csv {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError("invalid number '" + std::string(field) + "'", line);
  }
  return v;
}

long parse_long(std::string_view field, std::size_t line) {
  long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError("invalid integer '" + std::string(field) + "'", line);
  }
  return v;
}

Reader::Reader(const std::filesystem::path& path) : in_(path), path_(path.string()) {
  if (!in_) throw DataError("cannot open " + path_);
}

bool Reader::next(std::vector<std::string>& fields) {
  std::string row;
  if (!std::getline(in_, row)) return false;
  ++line_;
  if (!row.empty() && row.back() == '\r') row.pop_back();
  fields.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = row.find(',', start);
    if (comma == std::string::npos) {
      fields.emplace_back(row.substr(start));
      break;
    }
    fields.emplace_back(row.substr(start, comma - start));
    start = comma + 1;
  }
  return true;
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw DataError("cannot write " + path.string());
}

void Writer::row(std::initializer_list<std::string_view> fields) {
  bool first = true;
  for (const auto f : fields) {
    if (!first) out_ << ',';
    out_ << f;
    first = false;
  }
  out_ << '\n';
}

void Writer::row(const std::vector<std::string>& fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out_ << ',';
    out_ << f;
    first = false;
  }
  out_ << '\n';
}

}  // namespace enga::csv
