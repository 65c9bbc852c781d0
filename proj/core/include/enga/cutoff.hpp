#pragma once

#include "enga/table.hpp"

namespace enga {

// URL-lifespan restriction: each month's analysis keeps only URLs whose
// first (release or posting) month lies within the preceding
// `max_age_months` months.
struct CutoffPolicy {
  int max_age_months = 3;
};

// What apply_cutoff changed. Count mass is conserved up to the explicitly
// reported drops: sum(out) + dropped_early_mass + dropped_stale_mass ==
// sum(in).
struct RepairReport {
  std::size_t rows_folded = 0;        // offset -1, merged into the first month
  double folded_mass = 0.0;
  std::size_t rows_dropped_early = 0;  // offset <= -2
  double dropped_early_mass = 0.0;
  std::size_t rows_dropped_stale = 0;  // offset > max_age_months
  double dropped_stale_mass = 0.0;
};

// Applies the lifespan cutoff and repairs pre-posting anomalies:
//   - offset := observation_month - first_month
//   - offset == -1 rows are folded into offset 0 (counts added onto the
//     first month's record, which typically is activity from the hours
//     before the month boundary),
//   - offset <= -2 rows are dropped,
//   - offset > max_age_months rows are dropped.
// Record order is preserved; folded rows merge into the first record with
// the same (url, first_month, action, ppa) key, or are re-timed in place
// when no such record exists. Idempotent.
std::pair<EngagementTable, RepairReport> apply_cutoff(const EngagementTable& table,
                                                      const CutoffPolicy& policy);

void validate(const CutoffPolicy& policy);  // throws ConfigError

}  // namespace enga
