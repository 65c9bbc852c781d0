#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "enga/domain.hpp"
#include "enga/model.hpp"

namespace enga {

// One released (or true) count cell: engagement of one PPA bucket with one
// URL, for one action, in one observation month. Counts are real-valued
// because release noise can push them below zero; they are stored as-is,
// never rounded or clamped.
struct CountRecord {
  std::uint32_t url = 0;           // index into EngagementTable::url_ids()
  std::uint32_t domain = 0;        // index into the DomainTable used at load
  std::int32_t first_month = 0;    // linear month index (Month::index)
  std::int32_t observation_month = 0;
  Action action = Action::views;
  Ppa ppa = Ppa::zero;
  double count = 0.0;
};

// Sparse panel of engagement counts. Records keep their input order, which
// makes downstream aggregation (and therefore emitted files) reproducible.
// Immutable in practice: all analysis operations take it by const
// reference and return new values.
class EngagementTable {
 public:
  EngagementTable() = default;

  const std::vector<CountRecord>& records() const { return records_; }
  std::vector<CountRecord>& records() { return records_; }
  const std::vector<std::string>& url_ids() const { return url_ids_; }

  std::size_t url_count() const { return url_ids_.size(); }

  // Registers a URL id and returns its index; existing ids are reused.
  std::uint32_t intern_url(const std::string& url_id);

  // Months present, sorted ascending (linear indices).
  std::vector<std::int32_t> observation_months() const;

  double total_count() const;

 private:
  std::vector<std::string> url_ids_;
  std::vector<CountRecord> records_;
  std::unordered_map<std::string, std::uint32_t> url_index_;
};

// Loads the counts CSV. Exact header:
//   url_id,domain_id,first_month,observation_month,action,ppa,count
// with months formatted YYYY-MM, ppa one of {-2,-1,0,1,2,nd} and actions
// in lowercase. An optional trailing `posting_month` column is accepted;
// when present it overrides first_month for age computations (the plain
// first_month column is the release month, i.e. the earliest month the
// URL appears).
//
// Every domain_id must exist in `domains`; unknown domains are collected
// and reported in one error. Duplicate (url, observation_month, action,
// ppa) keys and rows whose url maps to two different domains are errors
// with line numbers. Negative counts are accepted.
EngagementTable load_counts(const std::filesystem::path& path, const DomainTable& domains);

void save_counts(const EngagementTable& table, const DomainTable& domains,
                 const std::filesystem::path& path);

}  // namespace enga
