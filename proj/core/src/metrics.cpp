#include "enga/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "enga/errors.hpp"
#include "enga/rng.hpp"

namespace enga {

namespace {

double score_of(const DomainInfo& d, ScoreDim dim) {
  return dim == ScoreDim::ideology ? d.ideology_norm : d.quality;
}

bool in_group(Ppa p, UserGroup g) { return group_of(p) == g; }

// Engagement of one URL summed over the selected buckets of one action.
struct UrlAgg {
  std::uint32_t url = 0;
  std::uint32_t domain = 0;
  double weight = 0.0;
  std::size_t cells = 0;
};

std::vector<UrlAgg> aggregate_urls(std::span<const CountRecord> records, Action action,
                                   std::optional<UserGroup> group) {
  std::vector<UrlAgg> aggs;
  std::unordered_map<std::uint32_t, std::size_t> index;
  for (const auto& r : records) {
    if (r.action != action) continue;
    if (group && !in_group(r.ppa, *group)) continue;
    const auto [it, inserted] = index.emplace(r.url, aggs.size());
    if (inserted) aggs.push_back(UrlAgg{r.url, r.domain, 0.0, 0});
    auto& agg = aggs[it->second];
    agg.weight += r.count;
    ++agg.cells;
  }
  return aggs;
}

std::vector<CountRecord> month_slice(const EngagementTable& table, std::int32_t month) {
  std::vector<CountRecord> out;
  for (const auto& r : table.records()) {
    if (r.observation_month == month) out.push_back(r);
  }
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::string_view to_string(ScoreDim d) {
  return d == ScoreDim::ideology ? "ideology" : "quality";
}

double snr(double sum, double noise_std) {
  if (noise_std == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(sum) / noise_std;
}

double snr(std::span<const NoisyCell> cells) {
  double sum = 0.0;
  double var = 0.0;
  for (const auto& c : cells) {
    sum += c.count;
    var += c.sigma * c.sigma;
  }
  return snr(sum, std::sqrt(var));
}

Interval worst_case_ratio_interval(double numerator, double denominator, double sigma_num,
                                   double sigma_den, double k) {
  const double den_lo = denominator - k * sigma_den;
  if (!(den_lo > 0.0)) {
    throw GateError("worst-case denominator interval crosses zero (D - k*sigma = " +
                        std::to_string(den_lo) + ")",
                    snr(denominator, sigma_den));
  }
  return Interval{(numerator - k * sigma_num) / (denominator + k * sigma_den),
                  (numerator + k * sigma_num) / den_lo};
}

BootstrapSummary bootstrap_ci(std::size_t n_urls,
                              const std::function<double(std::span<const std::uint32_t>)>& statistic,
                              int replicates, std::uint64_t seed) {
  if (n_urls < 2) throw ConfigError("bootstrap needs at least 2 URLs");
  if (replicates < 2) throw ConfigError("bootstrap needs at least 2 replicates");

  std::vector<double> values(static_cast<std::size_t>(replicates));
  std::vector<std::uint32_t> draw(n_urls);
  for (int b = 0; b < replicates; ++b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    for (auto& idx : draw) {
      idx = static_cast<std::uint32_t>(rng.next_int(0, n_urls - 1));
    }
    values[static_cast<std::size_t>(b)] = statistic(draw);
  }

  double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);

  std::sort(values.begin(), values.end());
  return BootstrapSummary{std::sqrt(ss / static_cast<double>(values.size() - 1)),
                          quantile_sorted(values, 0.025), quantile_sorted(values, 0.975)};
}

NormalizedEngagement normalized_engagement(const EngagementTable& table, const NoiseModel& noise,
                                           std::int32_t first_month, std::int32_t last_month,
                                           const MetricOptions& opts) {
  double sums[kActionCount][kPpaCount] = {};
  std::size_t cells[kActionCount][kPpaCount] = {};
  bool action_seen[kActionCount] = {};
  bool bucket_seen[kPpaCount] = {};

  for (const auto& r : table.records()) {
    if (r.observation_month < first_month || r.observation_month > last_month) continue;
    const auto a = static_cast<std::size_t>(r.action);
    const auto p = static_cast<std::size_t>(r.ppa);
    sums[a][p] += r.count;
    ++cells[a][p];
    action_seen[a] = true;
    bucket_seen[p] = true;
  }

  NormalizedEngagement out;
  for (const Ppa p : kAllPpa) {
    if (bucket_seen[static_cast<std::size_t>(p)]) out.buckets.push_back(p);
  }
  for (const Action a : kAllActions) {
    if (action_seen[static_cast<std::size_t>(a)]) out.actions.push_back(a);
  }
  if (out.buckets.empty()) throw DataError("no records in the requested month range");
  if (!action_seen[static_cast<std::size_t>(Action::views)]) {
    throw DataError("views are required as the normalization baseline but are absent");
  }

  constexpr auto kViews = static_cast<std::size_t>(Action::views);
  for (const Ppa p : out.buckets) {
    const auto pi = static_cast<std::size_t>(p);
    const double v = sums[kViews][pi];
    if (!(v > 0.0)) {
      throw DataError("non-positive aggregated view count for bucket " + std::string(to_string(p)));
    }
    const double view_snr =
        snr(v, noise.sigma_of(Action::views) * std::sqrt(static_cast<double>(cells[kViews][pi])));
    if (view_snr < opts.snr_gate) {
      throw GateError("view-count SNR for bucket " + std::string(to_string(p)) + " is " +
                          std::to_string(view_snr) + ", below gate " +
                          std::to_string(opts.snr_gate),
                      view_snr);
    }
  }

  for (const Ppa p : out.buckets) {
    const auto pi = static_cast<std::size_t>(p);
    out.view_snr.push_back(snr(
        sums[kViews][pi],
        noise.sigma_of(Action::views) * std::sqrt(static_cast<double>(cells[kViews][pi]))));
  }

  const std::size_t n_cols = out.buckets.size();
  out.e.assign(out.actions.size() * n_cols, 0.0);
  out.view_ratio.assign(out.actions.size() * n_cols, 0.0);
  for (std::size_t row = 0; row < out.actions.size(); ++row) {
    const auto ai = static_cast<std::size_t>(out.actions[row]);
    double max_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t col = 0; col < n_cols; ++col) {
      const auto pi = static_cast<std::size_t>(out.buckets[col]);
      const double ratio = sums[ai][pi] / sums[kViews][pi];
      out.view_ratio[row * n_cols + col] = ratio;
      max_ratio = std::max(max_ratio, ratio);
    }
    if (!(max_ratio > 0.0)) {
      throw DataError("non-positive engagement aggregate for action " +
                      std::string(to_string(out.actions[row])));
    }
    for (std::size_t col = 0; col < n_cols; ++col) {
      out.e[row * n_cols + col] = out.view_ratio[row * n_cols + col] / max_ratio;
    }
  }
  return out;
}

Distribution binned_distribution(std::span<const CountRecord> records,
                                 const DomainTable& domains, Action action, ScoreDim dim,
                                 const BinSpec& bins, std::span<const Ppa> buckets) {
  validate(bins);
  Distribution out;
  out.bins = bins;
  out.dim = dim;
  std::vector<double> sums(static_cast<std::size_t>(bins.count), 0.0);

  bool bucket_mask[kPpaCount] = {};
  if (buckets.empty()) {
    std::fill(std::begin(bucket_mask), std::end(bucket_mask), true);
  } else {
    for (const Ppa p : buckets) bucket_mask[static_cast<std::size_t>(p)] = true;
  }

  for (const auto& r : records) {
    if (r.action != action) continue;
    if (!bucket_mask[static_cast<std::size_t>(r.ppa)]) continue;
    const int k = bin_of(score_of(domains.at(r.domain), dim), bins);
    sums[static_cast<std::size_t>(k)] += r.count;
    out.raw_total += r.count;
    ++out.n_cells;
  }

  out.p.resize(sums.size());
  double total = 0.0;
  for (std::size_t k = 0; k < sums.size(); ++k) {
    if (sums[k] < 0.0) {
      out.floored_mass += -sums[k];
      out.p[k] = 0.0;
    } else {
      out.p[k] = sums[k];
      total += sums[k];
    }
  }
  if (!(total > 0.0)) {
    throw DataError("no positive " + std::string(to_string(action)) +
                    " mass after flooring negative bins");
  }
  out.total = total;
  for (auto& v : out.p) v /= total;
  return out;
}

Distribution binned_distribution(const EngagementTable& table, const DomainTable& domains,
                                 Action action, ScoreDim dim, const BinSpec& bins,
                                 std::int32_t first_month, std::int32_t last_month,
                                 std::span<const Ppa> buckets) {
  std::vector<CountRecord> in_range;
  for (const auto& r : table.records()) {
    if (r.observation_month >= first_month && r.observation_month <= last_month) {
      in_range.push_back(r);
    }
  }
  return binned_distribution(std::span(in_range), domains, action, dim, bins, buckets);
}

ConditionalDistribution conditional_distribution(const EngagementTable& table,
                                                 const DomainTable& domains, Action action,
                                                 ScoreDim dim, const BinSpec& bins,
                                                 std::int32_t first_month,
                                                 std::int32_t last_month) {
  bool bucket_seen[kPpaCount] = {};
  for (const auto& r : table.records()) {
    if (r.action != action) continue;
    if (r.observation_month < first_month || r.observation_month > last_month) continue;
    bucket_seen[static_cast<std::size_t>(r.ppa)] = true;
  }

  ConditionalDistribution out;
  out.bins = bins;
  out.dim = dim;
  for (const Ppa p : kAllPpa) {
    if (!bucket_seen[static_cast<std::size_t>(p)]) continue;
    const Ppa one[] = {p};
    try {
      Distribution d = binned_distribution(table, domains, action, dim, bins, first_month,
                                           last_month, one);
      out.categories.push_back(p);
      out.columns.push_back(std::move(d.p));
      out.floored_mass.push_back(d.floored_mass);
    } catch (const DataError& e) {
      throw DataError("bucket " + std::string(to_string(p)) + ": " + e.what());
    }
  }
  if (out.categories.empty()) throw DataError("no records for the requested action and months");
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("total variation over mismatched supports");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double total_variation(const Distribution& p, const Distribution& q) {
  if (!(p.bins == q.bins) || p.dim != q.dim) {
    throw ConfigError("total variation over mismatched bin axes");
  }
  return total_variation(std::span(p.p), std::span(q.p));
}

WeightedStats weighted_moments(std::span<const CountRecord> month_records,
                               const DomainTable& domains, const NoiseModel& noise, Action action,
                               UserGroup group, ScoreDim dim, const MetricOptions& opts) {
  const auto urls = aggregate_urls(month_records, action, group);
  const std::string label = "weighted_moments(" + std::string(to_string(action)) + ", " +
                            std::string(to_string(group)) + ", " + std::string(to_string(dim)) +
                            ")";
  if (urls.empty()) throw DataError(label + ": no records");

  WeightedStats stats;
  stats.n_urls = urls.size();

  double den = 0.0;
  double num = 0.0;
  double cell_score_sq = 0.0;
  std::size_t n_cells = 0;
  std::vector<double> scores(urls.size());
  std::vector<double> weights(urls.size());
  for (std::size_t i = 0; i < urls.size(); ++i) {
    const double s = score_of(domains.at(urls[i].domain), dim);
    scores[i] = s;
    weights[i] = urls[i].weight;
    den += urls[i].weight;
    num += s * urls[i].weight;
    cell_score_sq += static_cast<double>(urls[i].cells) * s * s;
    n_cells += urls[i].cells;
  }
  stats.n_cells = n_cells;
  stats.denominator = den;

  const double sigma = noise.sigma_of(action);
  const double sigma_den = sigma * std::sqrt(static_cast<double>(n_cells));
  stats.snr = snr(den, sigma_den);
  if (stats.snr < opts.snr_gate) {
    throw GateError(label + ": denominator SNR " + std::to_string(stats.snr) + " below gate " +
                        std::to_string(opts.snr_gate),
                    stats.snr);
  }
  if (den == 0.0) throw DataError(label + ": zero denominator");

  stats.mean = num / den;
  double wss = 0.0;
  for (std::size_t i = 0; i < urls.size(); ++i) {
    const double d = scores[i] - stats.mean;
    wss += weights[i] * d * d;
  }
  stats.stddev = std::sqrt(std::max(0.0, wss / den));

  const double sigma_num = sigma * std::sqrt(cell_score_sq);
  stats.worst_case = worst_case_ratio_interval(num, den, sigma_num, sigma_den, opts.worst_case_k);

  if (urls.size() >= 2 && opts.bootstrap_replicates >= 2) {
    const double point = stats.mean;
    stats.bootstrap = bootstrap_ci(
        urls.size(),
        [&scores, &weights, point](std::span<const std::uint32_t> idx) {
          double n = 0.0;
          double d = 0.0;
          for (const auto i : idx) {
            n += scores[i] * weights[i];
            d += weights[i];
          }
          return d == 0.0 ? point : n / d;
        },
        opts.bootstrap_replicates, opts.bootstrap_seed);
  } else {
    stats.bootstrap = BootstrapSummary{0.0, stats.mean, stats.mean};
  }
  return stats;
}

WeightedStats weighted_moments(const EngagementTable& table, const DomainTable& domains,
                               const NoiseModel& noise, Action action, UserGroup group,
                               ScoreDim dim, std::int32_t month, const MetricOptions& opts) {
  const auto slice = month_slice(table, month);
  return weighted_moments(std::span(slice), domains, noise, action, group, dim, opts);
}

GapPoint ideology_gap_from(const WeightedStats& conservative, const WeightedStats& liberal) {
  GapPoint out;
  out.conservative = conservative;
  out.liberal = liberal;
  out.gap = std::abs(conservative.mean - liberal.mean);
  const double spread = conservative.worst_case.half_width() + liberal.worst_case.half_width();
  out.interval = Interval{std::max(0.0, out.gap - spread), out.gap + spread};
  return out;
}

GapPoint ideology_gap(const EngagementTable& table, const DomainTable& domains,
                      const NoiseModel& noise, Action action, std::int32_t month,
                      const MetricOptions& opts) {
  const auto slice = month_slice(table, month);
  const auto c = weighted_moments(std::span(slice), domains, noise, action,
                                  UserGroup::conservative, ScoreDim::ideology, opts);
  const auto l = weighted_moments(std::span(slice), domains, noise, action, UserGroup::liberal,
                                  ScoreDim::ideology, opts);
  return ideology_gap_from(c, l);
}

SharePoint low_quality_share(std::span<const CountRecord> month_records,
                             const DomainTable& domains, const NoiseModel& noise, Action action,
                             double t_low, const MetricOptions& opts) {
  const auto urls = aggregate_urls(month_records, action, std::nullopt);
  if (urls.empty()) {
    throw DataError("low_quality_share(" + std::string(to_string(action)) + "): no records");
  }

  double den = 0.0;
  double num = 0.0;
  std::size_t n_cells = 0;
  std::size_t low_cells = 0;
  for (const auto& u : urls) {
    den += u.weight;
    n_cells += u.cells;
    if (domains.at(u.domain).quality <= t_low) {
      num += u.weight;
      low_cells += u.cells;
    }
  }

  SharePoint out;
  out.denominator = den;
  const double sigma = noise.sigma_of(action);
  const double sigma_den = sigma * std::sqrt(static_cast<double>(n_cells));
  out.snr = snr(den, sigma_den);
  if (out.snr < opts.snr_gate) {
    throw GateError("low_quality_share: denominator SNR " + std::to_string(out.snr) +
                        " below gate " + std::to_string(opts.snr_gate),
                    out.snr);
  }
  if (den == 0.0) throw DataError("low_quality_share: zero denominator");

  out.share = num / den;
  const double sigma_num = sigma * std::sqrt(static_cast<double>(low_cells));
  out.interval = worst_case_ratio_interval(num, den, sigma_num, sigma_den, opts.worst_case_k);
  return out;
}

SharePoint low_quality_share(const EngagementTable& table, const DomainTable& domains,
                             const NoiseModel& noise, Action action, std::int32_t month,
                             double t_low, const MetricOptions& opts) {
  const auto slice = month_slice(table, month);
  return low_quality_share(std::span(slice), domains, noise, action, t_low, opts);
}

std::vector<double> monthly_totals(const EngagementTable& table, Action action,
                                   std::span<const std::int32_t> months) {
  std::unordered_map<std::int32_t, std::size_t> index;
  for (std::size_t i = 0; i < months.size(); ++i) index.emplace(months[i], i);
  std::vector<double> totals(months.size(), 0.0);
  for (const auto& r : table.records()) {
    if (r.action != action) continue;
    const auto it = index.find(r.observation_month);
    if (it != index.end()) totals[it->second] += r.count;
  }
  return totals;
}

}  // namespace enga
