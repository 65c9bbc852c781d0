#include "enga/domain.hpp"

#include <algorithm>
#include <cmath>

#include "enga/csv.hpp"
#include "enga/errors.hpp"

namespace enga {

IdeologyNormalization normalize_ideology(std::vector<DomainInfo>& table) {
  if (table.size() < 2) {
    throw ConfigError("ideology normalization needs at least two domains");
  }
  double lo = table.front().ideology_raw;
  double hi = lo;
  for (const auto& d : table) {
    lo = std::min(lo, d.ideology_raw);
    hi = std::max(hi, d.ideology_raw);
  }
  if (!(hi > lo)) {
    throw ConfigError("ideology normalization is degenerate: all raw scores equal " +
                      csv::format_double(lo));
  }
  const IdeologyNormalization norm{lo, hi};
  for (auto& d : table) d.ideology_norm = norm.to_norm(d.ideology_raw);
  return norm;
}

DomainTable::DomainTable(std::vector<DomainInfo> rows) : rows_(std::move(rows)) {
  norm_ = normalize_ideology(rows_);
  by_id_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto [it, inserted] = by_id_.emplace(rows_[i].domain_id, i);
    if (!inserted) throw DataError("duplicate domain id '" + rows_[i].domain_id + "'");
  }
}

std::optional<std::size_t> DomainTable::index_of(const std::string& domain_id) const {
  const auto it = by_id_.find(domain_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

DomainTable load_domains(const std::filesystem::path& path) {
  csv::Reader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields != std::vector<std::string>{"domain_id", "ideology_raw",
                                                                 "quality"}) {
    throw DataError("expected header 'domain_id,ideology_raw,quality' in " + path.string());
  }
  std::vector<DomainInfo> rows;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) break;  // trailing newline
    if (fields.size() != 3) {
      throw DataError("expected 3 fields, got " + std::to_string(fields.size()), reader.line());
    }
    DomainInfo d;
    d.domain_id = fields[0];
    if (d.domain_id.empty()) throw DataError("empty domain_id", reader.line());
    d.ideology_raw = csv::parse_double(fields[1], reader.line());
    d.quality = csv::parse_double(fields[2], reader.line());
    if (!(d.quality >= 0.0 && d.quality <= 1.0)) {
      throw DataError("quality " + fields[2] + " outside [0,1]", reader.line());
    }
    rows.push_back(std::move(d));
  }
  return DomainTable(std::move(rows));
}

void save_domains(const DomainTable& table, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"domain_id", "ideology_raw", "quality"});
  for (const auto& d : table.rows()) {
    w.row({d.domain_id, csv::format_double(d.ideology_raw), csv::format_double(d.quality)});
  }
}

}  // namespace enga
