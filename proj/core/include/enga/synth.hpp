#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enga/domain.hpp"
#include "enga/metrics.hpp"
#include "enga/noise.hpp"
#include "enga/table.hpp"

namespace enga {

// Piecewise-linear envelope that modulates total engagement over the
// simulated horizon: level `start_level` at month 0, slope slopes[i] on
// the segment between breakpoints[i-1] and breakpoints[i]. These are the
// kinks the change-point detector is expected to recover.
struct TrendSpec {
  double start_level = 100.0;
  std::vector<double> breakpoints;  // strictly increasing month indices
  std::vector<double> slopes;       // breakpoints.size() + 1 entries

  double level(double month) const;
};

// One Gaussian kernel of a group's engagement affinity over normalized
// domain ideology.
struct Kernel {
  double center = 0.5;
  double stddev = 0.08;
  double weight = 1.0;
};

// How strongly a group engages with a domain at normalized ideology x:
// the mixture density sum_k w_k * N(x; c_k, s_k).
struct KernelMixture {
  std::vector<Kernel> kernels;

  double density(double x) const;
};

// Population model for the synthetic panel.
struct PopulationSpec {
  int n_domains = 2000;
  double target_ideology_quality_corr = -0.35;
  double high_quality_share = 0.58;  // target fraction of domains with quality > 0.6
  double ideology_raw_lo = -1.0;     // raw scale emitted before normalization
  double ideology_raw_hi = 1.0;

  // Engagement affinity per user group over normalized ideology.
  std::array<KernelMixture, 4> group_mixture = {
      KernelMixture{{Kernel{0.55, 0.08, 0.6}, Kernel{0.9, 0.08, 0.4}}},  // conservative: bimodal
      KernelMixture{{Kernel{0.35, 0.08, 1.0}}},                          // liberal
      KernelMixture{{Kernel{0.5, 0.08, 1.0}}},                           // centrist
      KernelMixture{{Kernel{0.5, 0.08, 1.0}}},                           // undefined
  };
  // How a group's engagement splits across its buckets.
  double extreme_bucket_share = 0.5;  // weight of +2 within conservatives, -2 within liberals

  // New URLs per month, before scaling.
  double arrivals_lo = 9e4;
  double arrivals_hi = 2e5;
  double arrival_scale = 1.0;

  // Fraction of a URL's lifetime engagement landing at each month offset.
  // Must sum to 1; the first two entries are expected to carry at least
  // `min_first_two_mass`.
  std::vector<double> decay = {0.45, 0.25, 0.13, 0.08, 0.05, 0.04};
  double min_first_two_mass = 0.70;

  // Expected lifetime count per action for an average URL (popularity 1,
  // mixture density 1).
  std::array<double, kActionCount> base_rate = {2000, 500, 120, 300, 150, 35, 60, 25, 80, 10};

  // Log-normal popularity multiplier (mean 1) spreading URL sizes.
  double popularity_sigma = 0.75;
};

void validate(const PopulationSpec& spec);  // throws ConfigError
void validate(const TrendSpec& trend, int horizon_months);

// Timeline of the release decision for one URL.
struct InclusionDecision {
  std::uint32_t url = 0;
  std::int32_t posting_month = 0;
  std::int32_t inclusion_month = 0;  // first month the threshold test passed
  bool included = false;
};

// Everything needed to verify any statistic computed from a synthetic
// panel: the planted trend, the domain scores, the per-month weighted-mean
// truth (computed from the true counts with the same estimator the
// analysis uses), and the seed. The true EngagementTable itself is kept
// alongside; recomputing any derived value from it reproduces the stored
// numbers bit-exactly.
struct GroundTruthManifest {
  std::uint64_t seed = 0;
  TrendSpec trend;
  std::int32_t start_month = 0;  // linear month index of simulation month 0
  int horizon_months = 0;

  struct MonthTruth {
    std::int32_t month = 0;
    std::size_t arrivals = 0;
    std::array<double, 4> ideology_mean{};  // per UserGroup, clicks-weighted
    std::array<double, 4> quality_mean{};
  };
  std::vector<MonthTruth> monthly_truth;
};

// Domain population with the requested ideology-quality correlation.
// Ideology is uniform on the raw scale; quality follows a two-piece
// uniform marginal with P(quality > 0.6) = high_quality_share. The
// dependence is a Gaussian copula whose parameter is calibrated by
// quadrature so the Pearson correlation of the emitted scores hits the
// target. Throws ConfigError for |target| >= 1 or an unattainable target.
DomainTable generate_domains(const PopulationSpec& spec, std::uint64_t seed);

// Synthetic true panel: URLs arrive each month (uniform count in the
// configured range), pick a domain uniformly, draw a popularity
// multiplier, and then produce Poisson counts per (offset, action,
// bucket) with expectation
//   base_rate * popularity * bucket_share * mixture_density(ideology)
//     * decay[offset] * trend_level(month) / trend_level(0).
// All randomness of a posting cohort comes from the sub-seed
// derive_seed(seed, month), so cohorts are independent and could be
// generated concurrently. Records with a drawn count of zero are omitted.
// first_month of every record is the posting month.
std::pair<EngagementTable, GroundTruthManifest> generate_panel(const DomainTable& domains,
                                                               const PopulationSpec& spec,
                                                               const TrendSpec& trend,
                                                               int horizon_months,
                                                               std::int32_t start_month,
                                                               std::uint64_t seed);

// Applies the release mechanism to a true panel:
//   - a URL enters the release at the first month m with
//     shares(m) + Laplace(0, b) >= share_threshold, and stays in for every
//     later month (the threshold is never re-checked);
//   - months before the inclusion month are withheld;
//   - every released count is true count + Gaussian(0, sigma_action),
//     negative results included, never clamped;
//   - released first_month is the inclusion month.
// Per-URL randomness derives from derive_seed(seed, fnv1a(url_id)), so the
// outcome does not depend on record order.
struct ReleaseResult {
  EngagementTable table;
  std::vector<InclusionDecision> decisions;  // one per URL of the true table
};

ReleaseResult apply_privacy_release(const EngagementTable& true_table, const NoiseModel& noise,
                                    std::uint64_t seed);

}  // namespace enga
