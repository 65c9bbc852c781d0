#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "enga/domain.hpp"
#include "enga/noise.hpp"
#include "enga/table.hpp"

namespace enga {

// Which domain score a metric is computed over.
enum class ScoreDim : std::uint8_t { ideology, quality };

std::string_view to_string(ScoreDim d);

// Shared knobs for the ratio metrics.
struct MetricOptions {
  double snr_gate = 16.0;       // minimum denominator SNR before a ratio is reported
  double worst_case_k = 3.0;    // sigma multiplier of the worst-case interval
  int bootstrap_replicates = 1000;
  std::uint64_t bootstrap_seed = 0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
};

struct BootstrapSummary {
  double stddev = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

// ---------------------------------------------------------------------------
// Noise accounting primitives
// ---------------------------------------------------------------------------

// One count that entered an aggregate, with the standard deviation of its
// injected noise.
struct NoisyCell {
  double count = 0.0;
  double sigma = 0.0;
};

// Signal-to-noise ratio of an aggregate of noisy counts:
//   |sum of counts| / sqrt(sum of per-cell sigma^2).
// A noiseless aggregate (all sigmas zero) has infinite SNR and always
// passes the gate; a zero sum with nonzero noise has SNR 0.
double snr(std::span<const NoisyCell> cells);
double snr(double sum, double noise_std);

// Worst-case uncertainty interval of the ratio N/D under +-k sigma
// perturbations of numerator and denominator:
//   lo = (N - k*sigma_N) / (D + k*sigma_D)
//   hi = (N + k*sigma_N) / (D - k*sigma_D)
// Throws GateError when D - k*sigma_D <= 0 (the denominator interval
// crosses zero and the ratio is unbounded).
Interval worst_case_ratio_interval(double numerator, double denominator, double sigma_num,
                                   double sigma_den, double k = 3.0);

// Bootstrap dispersion of a statistic computed from URLs: draws `n_urls`
// indices with replacement per replicate and hands them to `statistic`.
// Resampling whole URLs preserves within-URL correlation across actions
// and buckets. Deterministic: replicate r uses the sub-seed
// derive_seed(seed, r), so replicates can run in any order.
// Requires n_urls >= 2 and replicates >= 2.
BootstrapSummary bootstrap_ci(std::size_t n_urls,
                              const std::function<double(std::span<const std::uint32_t>)>& statistic,
                              int replicates, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Engagement normalized to views (per action, relative to the bucket max)
// ---------------------------------------------------------------------------

// E[a][p] = view_ratio[a][p] / max_p' view_ratio[a][p'] with
// view_ratio[a][p] = C[a][p] / C[views][p]. Rows cover the actions present
// in the input, columns the buckets present; the views row is identically 1.
struct NormalizedEngagement {
  std::vector<Action> actions;  // row order
  std::vector<Ppa> buckets;     // column order
  std::vector<double> e;        // row-major, actions x buckets
  std::vector<double> view_ratio;
  std::vector<double> view_snr;  // per bucket, of the aggregated view baseline

  double e_at(std::size_t row, std::size_t col) const { return e[row * buckets.size() + col]; }
  double ratio_at(std::size_t row, std::size_t col) const {
    return view_ratio[row * buckets.size() + col];
  }
};

// Aggregates counts over the inclusive month range [first_month,
// last_month]. Per bucket, the aggregated view count must be positive and
// its SNR must pass the gate; failures name the offending bucket.
NormalizedEngagement normalized_engagement(const EngagementTable& table, const NoiseModel& noise,
                                           std::int32_t first_month, std::int32_t last_month,
                                           const MetricOptions& opts = {});

// ---------------------------------------------------------------------------
// Binned score distributions
// ---------------------------------------------------------------------------

// A probability distribution over score bins. Negative bin sums (possible
// under count noise) are floored at zero before normalizing; the flag
// records how much absolute mass the flooring removed.
struct Distribution {
  BinSpec bins;
  ScoreDim dim = ScoreDim::ideology;
  std::vector<double> p;      // size bins.count, sums to 1
  double floored_mass = 0.0;
  double total = 0.0;         // positive mass before normalizing
  double raw_total = 0.0;     // signed mass before flooring (the noisy denominator)
  std::size_t n_cells = 0;    // contributing records, for SNR accounting
};

// Distribution of one action's engagement over score bins, restricted to
// `buckets` (all buckets when empty). The span form takes pre-filtered
// records (typically one month); the table form restricts to the
// inclusive month range. Throws DataError when no positive mass remains
// after flooring.
Distribution binned_distribution(std::span<const CountRecord> records,
                                 const DomainTable& domains, Action action, ScoreDim dim,
                                 const BinSpec& bins, std::span<const Ppa> buckets = {});

Distribution binned_distribution(const EngagementTable& table, const DomainTable& domains,
                                 Action action, ScoreDim dim, const BinSpec& bins,
                                 std::int32_t first_month, std::int32_t last_month,
                                 std::span<const Ppa> buckets = {});

// Column-stochastic matrix P(score bin | PPA bucket): one Distribution per
// bucket present in the table.
struct ConditionalDistribution {
  BinSpec bins;
  ScoreDim dim = ScoreDim::ideology;
  std::vector<Ppa> categories;
  std::vector<std::vector<double>> columns;  // columns[c][bin], each sums to 1
  std::vector<double> floored_mass;

  std::vector<double> column(std::size_t c) const { return columns[c]; }
};

ConditionalDistribution conditional_distribution(const EngagementTable& table,
                                                 const DomainTable& domains, Action action,
                                                 ScoreDim dim, const BinSpec& bins,
                                                 std::int32_t first_month, std::int32_t last_month);

// Total variation distance 0.5 * sum |p_k - q_k| between two distributions
// over the same bins. Mismatched axes are a ConfigError.
double total_variation(std::span<const double> p, std::span<const double> q);
double total_variation(const Distribution& p, const Distribution& q);

// ---------------------------------------------------------------------------
// Engagement-weighted score moments
// ---------------------------------------------------------------------------

// Engagement-weighted mean and standard deviation of a domain score for
// one user group, with the full noise-uncertainty companion values.
struct WeightedStats {
  double mean = 0.0;
  double stddev = 0.0;
  double snr = 0.0;              // of the denominator (total group engagement)
  Interval worst_case;           // of the mean
  BootstrapSummary bootstrap;    // of the mean, over URL resamples
  double denominator = 0.0;      // total weight
  std::size_t n_urls = 0;
  std::size_t n_cells = 0;
};

// mean = sum_u s(u) C_u / sum_u C_u over the URLs of one month, where C_u
// sums the action's counts over the group's buckets; stddev is the
// weighted second central moment. Negative noisy counts stay in the sums.
// Throws GateError when the denominator SNR is below the gate and
// DataError when the month has no records for the action/group.
// Bootstrap is degenerate (all zeros around the mean) when only one URL
// contributes.
WeightedStats weighted_moments(std::span<const CountRecord> month_records,
                               const DomainTable& domains, const NoiseModel& noise, Action action,
                               UserGroup group, ScoreDim dim, const MetricOptions& opts = {});

WeightedStats weighted_moments(const EngagementTable& table, const DomainTable& domains,
                               const NoiseModel& noise, Action action, UserGroup group,
                               ScoreDim dim, std::int32_t month, const MetricOptions& opts = {});

// ---------------------------------------------------------------------------
// Segregation and low-quality consumption
// ---------------------------------------------------------------------------

// Absolute gap between the conservative and liberal weighted mean domain
// ideologies; the interval combines both groups' worst-case half-widths.
struct GapPoint {
  double gap = 0.0;
  Interval interval;
  WeightedStats conservative;
  WeightedStats liberal;
};

GapPoint ideology_gap_from(const WeightedStats& conservative, const WeightedStats& liberal);

GapPoint ideology_gap(const EngagementTable& table, const DomainTable& domains,
                      const NoiseModel& noise, Action action, std::int32_t month,
                      const MetricOptions& opts = {});

// Engagement-weighted fraction of the month's counts (all buckets) that
// landed on domains with quality <= t_low.
struct SharePoint {
  double share = 0.0;
  Interval interval;
  double snr = 0.0;
  double denominator = 0.0;
};

SharePoint low_quality_share(std::span<const CountRecord> month_records,
                             const DomainTable& domains, const NoiseModel& noise, Action action,
                             double t_low, const MetricOptions& opts = {});

SharePoint low_quality_share(const EngagementTable& table, const DomainTable& domains,
                             const NoiseModel& noise, Action action, std::int32_t month,
                             double t_low = 0.6, const MetricOptions& opts = {});

// ---------------------------------------------------------------------------
// Timelines
// ---------------------------------------------------------------------------

// Total count of one action per month over `months` (linear indices).
std::vector<double> monthly_totals(const EngagementTable& table, Action action,
                                   std::span<const std::int32_t> months);

}  // namespace enga
