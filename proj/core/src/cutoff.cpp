#include "enga/cutoff.hpp"

#include <unordered_map>

#include "enga/errors.hpp"

namespace enga {

void validate(const CutoffPolicy& policy) {
  if (policy.max_age_months < 0) throw ConfigError("max_age_months must be non-negative");
}

std::pair<EngagementTable, RepairReport> apply_cutoff(const EngagementTable& table,
                                                      const CutoffPolicy& policy) {
  validate(policy);
  EngagementTable out;
  RepairReport report;
  // Position of the kept record for each (url, month, action, ppa), so a
  // folded offset -1 row can merge into the month-0 row if one exists.
  std::unordered_map<std::uint64_t, std::size_t> kept;
  kept.reserve(table.records().size());

  auto key = [](const CountRecord& r) {
    return (static_cast<std::uint64_t>(r.url) << 25) ^
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r.observation_month)) << 7) ^
           (static_cast<std::uint64_t>(r.action) << 3) ^ static_cast<std::uint64_t>(r.ppa);
  };

  for (const auto& id : table.url_ids()) out.intern_url(id);

  for (const auto& rec : table.records()) {
    const int offset = rec.observation_month - rec.first_month;
    if (offset <= -2) {
      ++report.rows_dropped_early;
      report.dropped_early_mass += rec.count;
      continue;
    }
    if (offset > policy.max_age_months) {
      ++report.rows_dropped_stale;
      report.dropped_stale_mass += rec.count;
      continue;
    }
    CountRecord r = rec;
    if (offset == -1) {
      // Activity reported for the month before the URL's first month is
      // engagement from the hours around the month boundary; re-time it
      // onto the first month.
      r.observation_month = r.first_month;
      ++report.rows_folded;
      report.folded_mass += r.count;
    }
    // A fold can collide with the genuine month-0 record on either side;
    // merge regardless of which one was seen first.
    const auto [it, inserted] = kept.emplace(key(r), out.records().size());
    if (!inserted) {
      out.records()[it->second].count += r.count;
      continue;
    }
    out.records().push_back(r);
  }
  return {std::move(out), report};
}

}  // namespace enga
