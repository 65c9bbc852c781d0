#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "enga/domain.hpp"
#include "enga/table.hpp"

namespace enga::test {

// Domain table whose normalized ideology equals the raw score exactly:
// two anchor domains pin the raw range to [0, 1].
struct DomainSpec {
  std::string id;
  double ideology;  // becomes both raw and normalized
  double quality;
};

inline DomainTable make_domains(const std::vector<DomainSpec>& specs) {
  std::vector<DomainInfo> rows;
  rows.push_back(DomainInfo{"d_anchor_lo", 0.0, 0.0, 0.5});
  rows.push_back(DomainInfo{"d_anchor_hi", 1.0, 0.0, 0.5});
  for (const auto& s : specs) {
    rows.push_back(DomainInfo{s.id, s.ideology, 0.0, s.quality});
  }
  return DomainTable(std::move(rows));
}

struct Row {
  std::string url;
  std::string domain;
  std::int32_t first_month;
  std::int32_t observation_month;
  Action action;
  Ppa ppa;
  double count;
};

inline EngagementTable make_table(const DomainTable& domains, const std::vector<Row>& rows) {
  EngagementTable table;
  for (const auto& row : rows) {
    CountRecord r;
    r.url = table.intern_url(row.url);
    r.domain = static_cast<std::uint32_t>(*domains.index_of(row.domain));
    r.first_month = row.first_month;
    r.observation_month = row.observation_month;
    r.action = row.action;
    r.ppa = row.ppa;
    r.count = row.count;
    table.records().push_back(r);
  }
  return table;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "test_tmp" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                        const std::string& content) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace enga::test
