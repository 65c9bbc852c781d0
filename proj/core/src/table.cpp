#include "enga/table.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "enga/csv.hpp"
#include "enga/errors.hpp"

namespace enga {

std::uint32_t EngagementTable::intern_url(const std::string& url_id) {
  const auto it = url_index_.find(url_id);
  if (it != url_index_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(url_ids_.size());
  url_ids_.push_back(url_id);
  url_index_.emplace(url_id, idx);
  return idx;
}

std::vector<std::int32_t> EngagementTable::observation_months() const {
  std::vector<std::int32_t> months;
  for (const auto& r : records_) months.push_back(r.observation_month);
  std::sort(months.begin(), months.end());
  months.erase(std::unique(months.begin(), months.end()), months.end());
  return months;
}

double EngagementTable::total_count() const {
  double sum = 0.0;
  for (const auto& r : records_) sum += r.count;
  return sum;
}

namespace {

// Dense key for duplicate detection: url (32) | month (18) | action (4) | ppa (3).
std::uint64_t record_key(std::uint32_t url, std::int32_t month, Action a, Ppa p) {
  return (static_cast<std::uint64_t>(url) << 25) ^
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(month)) << 7) ^
         (static_cast<std::uint64_t>(a) << 3) ^ static_cast<std::uint64_t>(p);
}

const std::vector<std::string> kCountsHeader = {"url_id",            "domain_id", "first_month",
                                                "observation_month", "action",    "ppa",
                                                "count"};

}  // namespace

EngagementTable load_counts(const std::filesystem::path& path, const DomainTable& domains) {
  csv::Reader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw DataError("empty counts file " + path.string());
  bool has_posting = false;
  if (fields == kCountsHeader) {
    has_posting = false;
  } else {
    auto extended = kCountsHeader;
    extended.push_back("posting_month");
    if (fields == extended) {
      has_posting = true;
    } else {
      throw DataError("unexpected counts header in " + path.string());
    }
  }
  const std::size_t n_fields = kCountsHeader.size() + (has_posting ? 1 : 0);

  EngagementTable table;
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::int32_t> url_domain;        // domain index per url
  std::vector<std::int32_t> url_first_month;   // first_month per url, for consistency checks
  std::set<std::string> unknown_domains;

  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) break;
    if (fields.size() != n_fields) {
      throw DataError("expected " + std::to_string(n_fields) + " fields, got " +
                          std::to_string(fields.size()),
                      reader.line());
    }
    CountRecord r;
    const std::uint32_t url = table.intern_url(fields[0]);
    r.url = url;

    const auto domain_idx = domains.index_of(fields[1]);
    if (!domain_idx) {
      unknown_domains.insert(fields[1]);
      continue;  // keep scanning so the error lists every offender
    }
    r.domain = static_cast<std::uint32_t>(*domain_idx);

    r.first_month = month_from_string(fields[2]).index();
    r.observation_month = month_from_string(fields[3]).index();
    try {
      r.action = action_from_string(fields[4]);
      r.ppa = ppa_from_string(fields[5]);
    } catch (const DataError& e) {
      throw DataError(e.what(), reader.line());
    }
    r.count = csv::parse_double(fields[6], reader.line());
    if (has_posting) r.first_month = month_from_string(fields[7]).index();

    if (url >= url_domain.size()) {
      url_domain.resize(url + 1, -1);
      url_first_month.resize(url + 1, INT32_MIN);
    }
    if (url_domain[url] == -1) {
      url_domain[url] = static_cast<std::int32_t>(r.domain);
      url_first_month[url] = r.first_month;
    } else if (url_domain[url] != static_cast<std::int32_t>(r.domain)) {
      throw DataError("url '" + fields[0] + "' maps to two domains", reader.line());
    } else if (url_first_month[url] != r.first_month) {
      throw DataError("url '" + fields[0] + "' has inconsistent first_month", reader.line());
    }

    if (!seen.insert(record_key(r.url, r.observation_month, r.action, r.ppa)).second) {
      throw DataError("duplicate (url, observation_month, action, ppa) key for '" + fields[0] +
                          "'",
                      reader.line());
    }
    table.records().push_back(r);
  }

  if (!unknown_domains.empty()) {
    std::string msg = "unknown domain ids:";
    for (const auto& d : unknown_domains) msg += " " + d;
    throw DataError(msg);
  }
  return table;
}

void save_counts(const EngagementTable& table, const DomainTable& domains,
                 const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"url_id", "domain_id", "first_month", "observation_month", "action", "ppa", "count"});
  for (const auto& r : table.records()) {
    w.row({table.url_ids()[r.url], domains.at(r.domain).domain_id,
           to_string(Month::from_index(r.first_month)),
           to_string(Month::from_index(r.observation_month)), to_string(r.action),
           to_string(r.ppa), csv::format_double(r.count)});
  }
}

}  // namespace enga
