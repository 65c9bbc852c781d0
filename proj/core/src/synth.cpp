#include "enga/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>

#include "enga/errors.hpp"
#include "enga/rng.hpp"

namespace enga {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Quantile of the two-piece uniform quality marginal with
// P(quality > 0.6) = high_share.
double quality_quantile(double u, double high_share) {
  const double low_mass = 1.0 - high_share;
  if (u < low_mass) return 0.6 * u / low_mass;
  return 0.6 + 0.4 * (u - low_mass) / high_share;
}

// Pearson correlation between ideology = U1 and quality = g(U2) when
// (U1, U2) are coupled by a Gaussian copula with parameter rho. Uses
// E[Phi(Z1) | Z2 = z] = Phi(rho z / sqrt(2 - rho^2)) and Simpson
// quadrature over z.
double copula_pearson(double rho, double high_share) {
  const double low_mass = 1.0 - high_share;
  const double e_g = low_mass * 0.3 + high_share * 0.8;
  const double e_g2 = low_mass * 0.12 + high_share * (0.36 + 0.24 + 0.16 / 3.0);
  const double sd_g = std::sqrt(e_g2 - e_g * e_g);
  const double sd_u = std::sqrt(1.0 / 12.0);

  const double scale = rho / std::sqrt(2.0 - rho * rho);
  const int n = 2000;  // even
  const double lo = -8.0;
  const double step = 16.0 / n;
  auto f = [&](double z) {
    return std::exp(-0.5 * z * z) / kSqrt2Pi * std_normal_cdf(scale * z) *
           quality_quantile(std_normal_cdf(z), high_share);
  };
  double sum = f(lo) + f(lo + n * step);
  for (int i = 1; i < n; ++i) sum += f(lo + i * step) * (i % 2 == 1 ? 4.0 : 2.0);
  const double e_xy = sum * step / 3.0;

  return (e_xy - 0.5 * e_g) / (sd_u * sd_g);
}

double calibrate_copula_rho(double target, double high_share) {
  const double bound = 0.9999;
  if (target >= copula_pearson(bound, high_share) ||
      target <= copula_pearson(-bound, high_share)) {
    throw ConfigError("target ideology-quality correlation " + std::to_string(target) +
                      " unattainable for the configured marginals");
  }
  double lo = -bound;
  double hi = bound;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (copula_pearson(mid, high_share) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string url_name(int month, std::size_t i) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "u%03d_%06lu", month, static_cast<unsigned long>(i));
  return buf;
}

double bucket_share(Ppa p, const PopulationSpec& spec) {
  switch (p) {
    case Ppa::p2:
    case Ppa::m2:
      return spec.extreme_bucket_share;
    case Ppa::p1:
    case Ppa::m1:
      return 1.0 - spec.extreme_bucket_share;
    default:
      return 1.0;
  }
}

}  // namespace

double TrendSpec::level(double month) const {
  double value = start_level;
  double x = 0.0;
  for (std::size_t seg = 0; seg < slopes.size(); ++seg) {
    const double end =
        seg < breakpoints.size() ? breakpoints[seg] : std::numeric_limits<double>::infinity();
    const double upto = std::min(month, end);
    if (upto > x) {
      value += slopes[seg] * (upto - x);
      x = upto;
    }
    if (month <= end) break;
  }
  return value;
}

double KernelMixture::density(double x) const {
  double sum = 0.0;
  for (const auto& k : kernels) {
    const double z = (x - k.center) / k.stddev;
    sum += k.weight * std::exp(-0.5 * z * z) / (k.stddev * kSqrt2Pi);
  }
  return sum;
}

void validate(const PopulationSpec& spec) {
  if (spec.n_domains < 2) throw ConfigError("n_domains must be at least 2");
  if (!(std::abs(spec.target_ideology_quality_corr) < 1.0)) {
    throw ConfigError("target ideology-quality correlation must lie in (-1, 1)");
  }
  if (!(spec.high_quality_share > 0.0 && spec.high_quality_share < 1.0)) {
    throw ConfigError("high_quality_share must lie in (0, 1)");
  }
  if (!(spec.ideology_raw_hi > spec.ideology_raw_lo)) {
    throw ConfigError("ideology raw range is empty");
  }
  for (const auto& mix : spec.group_mixture) {
    if (mix.kernels.empty()) throw ConfigError("group mixture has no kernels");
    double wsum = 0.0;
    for (const auto& k : mix.kernels) {
      if (!(k.stddev > 0.0)) throw ConfigError("mixture kernel stddev must be positive");
      wsum += k.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw ConfigError("mixture weights must sum to 1");
  }
  if (!(spec.extreme_bucket_share >= 0.0 && spec.extreme_bucket_share <= 1.0)) {
    throw ConfigError("extreme_bucket_share must lie in [0, 1]");
  }
  if (!(spec.arrivals_lo > 0.0) || spec.arrivals_hi < spec.arrivals_lo) {
    throw ConfigError("arrival range must satisfy 0 < lo <= hi");
  }
  if (!(spec.arrival_scale > 0.0)) throw ConfigError("arrival_scale must be positive");
  if (spec.decay.empty()) throw ConfigError("decay profile is empty");
  double dsum = 0.0;
  for (const double d : spec.decay) {
    if (d < 0.0) throw ConfigError("decay fractions must be non-negative");
    dsum += d;
  }
  if (std::abs(dsum - 1.0) > 1e-9) throw ConfigError("decay fractions must sum to 1");
  const double first_two = spec.decay[0] + (spec.decay.size() > 1 ? spec.decay[1] : 0.0);
  if (first_two < spec.min_first_two_mass - 1e-9) {
    throw ConfigError("decay profile places " + std::to_string(first_two) +
                      " of the mass in the first two months, below the configured floor");
  }
  for (const double r : spec.base_rate) {
    if (r < 0.0) throw ConfigError("base rates must be non-negative");
  }
  if (spec.popularity_sigma < 0.0) throw ConfigError("popularity_sigma must be non-negative");
}

void validate(const TrendSpec& trend, int horizon_months) {
  if (trend.slopes.size() != trend.breakpoints.size() + 1) {
    throw ConfigError("trend needs one slope per segment (breakpoints + 1)");
  }
  double prev = 0.0;
  for (const double b : trend.breakpoints) {
    if (!(b > prev) || !(b < horizon_months)) {
      throw ConfigError("trend breakpoints must be strictly increasing inside the horizon");
    }
    prev = b;
  }
  // The envelope is piecewise linear, so positivity on the vertices
  // covers the whole horizon.
  if (!(trend.level(0.0) > 0.0)) throw ConfigError("trend level must stay positive");
  for (const double b : trend.breakpoints) {
    if (!(trend.level(b) > 0.0)) throw ConfigError("trend level must stay positive");
  }
  if (!(trend.level(horizon_months) > 0.0)) throw ConfigError("trend level must stay positive");
}

DomainTable generate_domains(const PopulationSpec& spec, std::uint64_t seed) {
  validate(spec);
  const double rho =
      calibrate_copula_rho(spec.target_ideology_quality_corr, spec.high_quality_share);

  Rng rng(derive_seed(seed, "domains"));
  std::vector<DomainInfo> rows;
  rows.reserve(static_cast<std::size_t>(spec.n_domains));
  const double cross = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < spec.n_domains; ++i) {
    const double z1 = rng.normal();
    const double z2 = rho * z1 + cross * rng.normal();
    const double u1 = std::clamp(std_normal_cdf(z1), 0.0, 1.0);
    const double u2 = std::clamp(std_normal_cdf(z2), 0.0, 1.0);

    DomainInfo d;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%06d", i);
    d.domain_id = buf;
    d.ideology_raw =
        spec.ideology_raw_lo + (spec.ideology_raw_hi - spec.ideology_raw_lo) * u1;
    d.quality = std::clamp(quality_quantile(u2, spec.high_quality_share), 0.0, 1.0);
    rows.push_back(std::move(d));
  }
  return DomainTable(std::move(rows));
}

std::pair<EngagementTable, GroundTruthManifest> generate_panel(const DomainTable& domains,
                                                               const PopulationSpec& spec,
                                                               const TrendSpec& trend,
                                                               int horizon_months,
                                                               std::int32_t start_month,
                                                               std::uint64_t seed) {
  validate(spec);
  validate(trend, horizon_months);
  if (horizon_months < 2) throw ConfigError("horizon must be at least 2 months");
  if (static_cast<std::size_t>(horizon_months) < spec.decay.size()) {
    throw ConfigError("horizon (" + std::to_string(horizon_months) +
                      " months) is shorter than the decay profile (" +
                      std::to_string(spec.decay.size()) + ")");
  }
  if (domains.size() == 0) throw ConfigError("domain table is empty");

  const double env0 = trend.level(0.0);
  const auto arrivals_lo =
      static_cast<std::uint64_t>(std::max(1.0, std::ceil(spec.arrivals_lo * spec.arrival_scale)));
  const auto arrivals_hi = std::max(
      arrivals_lo, static_cast<std::uint64_t>(std::floor(spec.arrivals_hi * spec.arrival_scale)));

  EngagementTable table;
  GroundTruthManifest manifest;
  manifest.seed = seed;
  manifest.trend = trend;
  manifest.start_month = start_month;
  manifest.horizon_months = horizon_months;

  const double pop_mu = -0.5 * spec.popularity_sigma * spec.popularity_sigma;  // mean-1 lognormal

  for (int m = 0; m < horizon_months; ++m) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
    const auto n_new = static_cast<std::size_t>(rng.next_int(arrivals_lo, arrivals_hi));

    GroundTruthManifest::MonthTruth truth;
    truth.month = start_month + m;
    truth.arrivals = n_new;
    manifest.monthly_truth.push_back(truth);

    for (std::size_t i = 0; i < n_new; ++i) {
      const auto url = table.intern_url(url_name(m, i));
      const auto domain = static_cast<std::uint32_t>(rng.next_int(0, domains.size() - 1));
      const double ideology = domains.at(domain).ideology_norm;
      const double popularity = rng.lognormal(pop_mu, spec.popularity_sigma);

      for (std::size_t d = 0; d < spec.decay.size(); ++d) {
        const int obs = m + static_cast<int>(d);
        if (obs >= horizon_months) break;
        const double envelope = trend.level(obs) / env0;
        for (const Ppa p : kAllPpa) {
          const double affinity =
              spec.group_mixture[static_cast<std::size_t>(group_of(p))].density(ideology) *
              bucket_share(p, spec);
          if (affinity <= 0.0) continue;
          for (const Action a : kAllActions) {
            const double lambda = spec.base_rate[static_cast<std::size_t>(a)] * popularity *
                                  affinity * spec.decay[d] * envelope;
            const double count = rng.poisson(lambda);
            if (count > 0.0) {
              table.records().push_back(CountRecord{url, domain, start_month + m,
                                                    start_month + obs, a, p, count});
            }
          }
        }
      }
    }
  }

  // Clicks-weighted score means per group, computed with the same
  // estimator the analysis pipeline uses, so recomputation from the true
  // counts reproduces these bit-exactly.
  MetricOptions truth_opts;
  truth_opts.snr_gate = 0.0;
  truth_opts.bootstrap_replicates = 0;
  const NoiseModel noiseless = NoiseModel::noiseless();
  for (auto& truth : manifest.monthly_truth) {
    for (const UserGroup g : kAllGroups) {
      const auto gi = static_cast<std::size_t>(g);
      try {
        truth.ideology_mean[gi] = weighted_moments(table, domains, noiseless, Action::clicks, g,
                                                   ScoreDim::ideology, truth.month, truth_opts)
                                      .mean;
        truth.quality_mean[gi] = weighted_moments(table, domains, noiseless, Action::clicks, g,
                                                  ScoreDim::quality, truth.month, truth_opts)
                                     .mean;
      } catch (const DataError&) {
        truth.ideology_mean[gi] = std::numeric_limits<double>::quiet_NaN();
        truth.quality_mean[gi] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }

  return {std::move(table), std::move(manifest)};
}

ReleaseResult apply_privacy_release(const EngagementTable& true_table, const NoiseModel& noise,
                                    std::uint64_t seed) {
  validate(noise);
  const auto& records = true_table.records();

  // Per-URL monthly share totals drive the inclusion decision.
  const std::size_t n_urls = true_table.url_count();
  std::vector<std::map<std::int32_t, double>> shares(n_urls);
  std::vector<std::int32_t> first_obs(n_urls, std::numeric_limits<std::int32_t>::max());
  for (const auto& r : records) {
    first_obs[r.url] = std::min(first_obs[r.url], r.observation_month);
    auto& by_month = shares[r.url];
    by_month.try_emplace(r.observation_month, 0.0);
    if (r.action == Action::shares) by_month[r.observation_month] += r.count;
  }

  ReleaseResult result;
  result.decisions.resize(n_urls);
  std::vector<std::int32_t> inclusion_month(n_urls, std::numeric_limits<std::int32_t>::max());

  for (std::uint32_t u = 0; u < n_urls; ++u) {
    auto& decision = result.decisions[u];
    decision.url = u;
    decision.posting_month = first_obs[u];
    const std::uint64_t url_seed = derive_seed(seed, fnv1a(true_table.url_ids()[u]));
    Rng threshold_rng(derive_seed(url_seed, "threshold"));
    // The test runs once per month, in order, until it passes; once a URL
    // is in, it is never removed and the threshold is never re-checked.
    for (const auto& [month, share_count] : shares[u]) {
      if (share_count + threshold_rng.laplace(noise.laplace_scale_b) >= noise.share_threshold) {
        inclusion_month[u] = month;
        decision.included = true;
        decision.inclusion_month = month;
        break;
      }
    }
  }

  auto& out = result.table;
  for (const auto& id : true_table.url_ids()) out.intern_url(id);
  out.records().reserve(records.size());
  const std::uint64_t cell_salt = derive_seed(seed, "count-noise");
  for (const auto& r : records) {
    if (r.observation_month < inclusion_month[r.url]) continue;
    CountRecord released = r;
    released.first_month = inclusion_month[r.url];
    const double sigma = noise.sigma_of(r.action);
    if (sigma > 0.0) {
      // Independent stream per cell, so the draw does not depend on
      // record order.
      const std::uint64_t cell_key =
          (static_cast<std::uint64_t>(r.url) << 28) ^
          (static_cast<std::uint64_t>(static_cast<std::uint32_t>(r.observation_month)) << 10) ^
          (static_cast<std::uint64_t>(r.action) << 4) ^ static_cast<std::uint64_t>(r.ppa);
      Rng cell_rng(derive_seed(cell_salt, cell_key));
      released.count = r.count + sigma * cell_rng.normal();
    }
    out.records().push_back(released);
  }
  return result;
}

void validate(const NoiseModel& model) {
  for (const double s : model.sigma) {
    if (s < 0.0) throw ConfigError("noise sigma must be non-negative");
  }
  if (!(model.laplace_scale_b > 0.0)) throw ConfigError("laplace scale must be positive");
  if (!(model.share_threshold > 0.0)) throw ConfigError("share threshold must be positive");
}

}  // namespace enga
