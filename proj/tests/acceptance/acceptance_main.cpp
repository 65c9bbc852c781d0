// Acceptance suite: one self-contained check per release criterion, each
// printing a PASS/FAIL line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "enga/changepoint.hpp"
#include "enga/cutoff.hpp"
#include "enga/metrics.hpp"
#include "enga/pipeline.hpp"
#include "enga/rng.hpp"
#include "enga/synth.hpp"

using namespace enga;

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared builders
// ---------------------------------------------------------------------------

DomainTable uniform_domains(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DomainInfo> rows;
  rows.push_back(DomainInfo{"anchor_lo", 0.0, 0.0, 0.5});
  rows.push_back(DomainInfo{"anchor_hi", 1.0, 0.0, 0.5});
  for (int i = 0; i < n; ++i) {
    rows.push_back(DomainInfo{"d" + std::to_string(i), rng.next_double(), 0.0,
                              rng.next_double()});
  }
  return DomainTable(std::move(rows));
}

std::vector<double> month_axis(int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  std::iota(t.begin(), t.end(), 0.0);
  return t;
}

std::vector<double> kinked_signal(const std::vector<double>& t, double level,
                                  const std::vector<double>& kinks,
                                  const std::vector<double>& slopes) {
  std::vector<double> y;
  for (const double x : t) {
    double v = level;
    double pos = t.front();
    for (std::size_t s = 0; s < slopes.size(); ++s) {
      const double end = s < kinks.size() ? kinks[s] : t.back();
      const double upto = std::min(x, end);
      if (upto > pos) {
        v += slopes[s] * (upto - pos);
        pos = upto;
      }
      if (x <= end) break;
    }
    y.push_back(v);
  }
  return y;
}

// ---------------------------------------------------------------------------
// 1. Weighted-moment oracle equivalence
// ---------------------------------------------------------------------------

Outcome criterion_weighted_moment_oracle() {
  const auto start = Clock::now();
  const auto domains = uniform_domains(40, 11);
  const std::int32_t month = 600;
  MetricOptions opts;
  opts.bootstrap_replicates = 0;
  opts.snr_gate = 0.0;
  const auto quiet = NoiseModel::noiseless();

  Rng rng(20240501);
  std::size_t compared = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    EngagementTable table;
    const int n_records = 1 + static_cast<int>(rng.next_int(0, 99));
    for (int i = 0; i < n_records; ++i) {
      CountRecord r;
      r.url = table.intern_url("u" + std::to_string(rng.next_int(0, 24)));
      r.domain = static_cast<std::uint32_t>(rng.next_int(0, domains.size() - 1));
      r.first_month = month;
      r.observation_month = month;
      r.action = Action::clicks;
      r.ppa = kAllPpa[rng.next_int(0, 5)];
      r.count = rng.uniform(-2.0, 100.0);
      table.records().push_back(r);
    }
    for (const UserGroup g : kAllGroups) {
      // Direct-summation oracle.
      std::map<std::uint32_t, double> weight;
      std::map<std::uint32_t, double> score;
      for (const auto& r : table.records()) {
        if (group_of(r.ppa) != g) continue;
        weight[r.url] += r.count;
        score[r.url] = domains.at(r.domain).ideology_norm;
      }
      if (weight.empty()) continue;
      double num = 0.0;
      double den = 0.0;
      for (const auto& [u, w] : weight) {
        num += score[u] * w;
        den += w;
      }
      if (std::abs(den) < 1.0) continue;
      const double mean = num / den;
      double wss = 0.0;
      for (const auto& [u, w] : weight) wss += w * (score[u] - mean) * (score[u] - mean);
      const double stddev = std::sqrt(wss / den);

      const auto got = weighted_moments(table, domains, quiet, Action::clicks, g,
                                        ScoreDim::ideology, month, opts);
      worst = std::max(worst, std::abs(got.mean - mean) / std::max(1.0, std::abs(mean)));
      worst = std::max(worst, std::abs(got.stddev - stddev) / std::max(1.0, stddev));
      ++compared;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst <= 1e-12 && compared >= 2000 && elapsed < 10.0;
  return {pass, "1000 tables, " + std::to_string(compared) + " comparisons, worst rel dev " +
                    fmt(worst) + ", " + fmt(elapsed) + " s (limit 10)"};
}

// ---------------------------------------------------------------------------
// 2. Planted change-point recovery
// ---------------------------------------------------------------------------

Outcome criterion_changepoint_recovery() {
  const auto start = Clock::now();
  const auto t = month_axis(48);
  const auto clean = kinked_signal(t, 100.0, {13.0, 39.0}, {-2.0, 3.0, -2.5});
  const auto [lo, hi] = std::minmax_element(clean.begin(), clean.end());
  const double noise_sd = 0.05 * (*hi - *lo);

  int recovered = 0;
  int selected_two = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(5000 + static_cast<std::uint64_t>(seed));
    std::vector<double> y;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      y.push_back(clean[i] + rng.normal(0.0, noise_sd));
    }
    const auto fit = fit_segments(t, y, 2);
    if (std::abs(fit.breakpoints[0] - 13.0) <= 1.0 &&
        std::abs(fit.breakpoints[1] - 39.0) <= 1.0) {
      ++recovered;
    }
    if (select_model(t, y, 3).breakpoints.size() == 2) ++selected_two;
  }
  const double elapsed = seconds_since(start);
  const bool pass = recovered >= 95 && selected_two >= 90 && elapsed < 120.0;
  return {pass, "breakpoints within +-1 month in " + std::to_string(recovered) +
                    "/100 (need 95), order 2 selected in " + std::to_string(selected_two) +
                    "/100 (need 90), " + fmt(elapsed) + " s (limit 120)"};
}

// ---------------------------------------------------------------------------
// 3. Region aggregation around jittered kinks
// ---------------------------------------------------------------------------

Outcome criterion_region_aggregation() {
  const auto t = month_axis(48);
  int ok = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(9000 + static_cast<std::uint64_t>(seed));
    std::vector<SegmentedFit> fits;
    for (int series = 0; series < 8; ++series) {
      const double k1 = 13.0 + rng.uniform(-1.0, 1.0);
      const double k2 = 39.0 + rng.uniform(-1.0, 1.0);
      const auto clean = kinked_signal(t, 80.0, {k1, k2}, {-1.5, 2.5, -2.0});
      std::vector<double> y;
      for (std::size_t i = 0; i < clean.size(); ++i) {
        y.push_back(clean[i] + rng.normal(0.0, 0.8));
      }
      fits.push_back(fit_segments(t, y, 2));
    }
    const auto regions = aggregate_regions(fits, 2.0, 2);
    if (regions.size() == 2 && regions[0].start_month <= 13 && 13 <= regions[0].end_month &&
        regions[1].start_month <= 39 && 39 <= regions[1].end_month) {
      ++ok;
    }
  }
  return {ok >= 95, "exactly 2 regions containing the true kinks in " + std::to_string(ok) +
                        "/100 seeds (need 95)"};
}

// ---------------------------------------------------------------------------
// 4. Generator calibration
// ---------------------------------------------------------------------------

Outcome criterion_generator_calibration() {
  PopulationSpec spec;
  spec.n_domains = 10000;
  spec.target_ideology_quality_corr = -0.35;
  const auto domains = generate_domains(spec, 101);
  double mi = 0.0;
  double mq = 0.0;
  for (const auto& d : domains.rows()) {
    mi += d.ideology_norm;
    mq += d.quality;
  }
  mi /= static_cast<double>(domains.size());
  mq /= static_cast<double>(domains.size());
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (const auto& d : domains.rows()) {
    sxy += (d.ideology_norm - mi) * (d.quality - mq);
    sxx += (d.ideology_norm - mi) * (d.ideology_norm - mi);
    syy += (d.quality - mq) * (d.quality - mq);
  }
  const double corr = sxy / std::sqrt(sxx * syy);

  PopulationSpec panel_spec;
  panel_spec.n_domains = 400;
  panel_spec.arrivals_lo = 800;
  panel_spec.arrivals_hi = 1000;
  const TrendSpec flat{100.0, {}, {0.0}};
  const auto panel_domains = generate_domains(panel_spec, 102);
  const int horizon = 14;
  const auto [table, manifest] = generate_panel(panel_domains, panel_spec, flat, horizon, 0, 103);

  double first_two = 0.0;
  double total = 0.0;
  std::set<std::uint32_t> urls;
  const auto last_full = horizon - static_cast<int>(panel_spec.decay.size());
  for (const auto& r : table.records()) {
    if (r.first_month > last_full) continue;
    urls.insert(r.url);
    total += r.count;
    if (r.observation_month - r.first_month <= 1) first_two += r.count;
  }
  const double share = first_two / total;

  const bool pass = corr >= -0.40 && corr <= -0.30 && urls.size() >= 10000 && share >= 0.67 &&
                    share <= 0.73;
  return {pass, "10k-domain correlation " + fmt(corr) + " (need [-0.40,-0.30]); first-two-month " +
                    "share " + fmt(share) + " over " + std::to_string(urls.size()) +
                    " URLs (need [0.67,0.73])"};
}

// ---------------------------------------------------------------------------
// 5. Privacy-release invariants
// ---------------------------------------------------------------------------

Outcome criterion_release_invariants() {
  // Inclusion monotonicity over 1e5 URLs with share volumes straddling the
  // threshold.
  const int n_urls = 100000;
  const int n_months = 6;
  EngagementTable table;
  Rng rng(404);
  auto domains = uniform_domains(10, 405);
  for (int u = 0; u < n_urls; ++u) {
    const auto url = table.intern_url("s" + std::to_string(u));
    for (int m = 0; m < n_months; ++m) {
      CountRecord r;
      r.url = url;
      r.domain = 0;
      r.first_month = 0;
      r.observation_month = m;
      r.action = Action::shares;
      r.ppa = Ppa::zero;
      r.count = rng.uniform(60.0, 140.0);
      table.records().push_back(r);
    }
  }
  NoiseModel noise = NoiseModel::noiseless();
  noise.laplace_scale_b = 5.0;
  noise.share_threshold = 100.0;
  const auto release = apply_privacy_release(table, noise, 406);

  std::vector<std::int32_t> last_seen(static_cast<std::size_t>(n_urls), -1);
  std::size_t violations = 0;
  // Released months per URL must be the contiguous suffix starting at the
  // inclusion month: present every month after inclusion, absent before.
  std::vector<std::set<std::int32_t>> released(static_cast<std::size_t>(n_urls));
  for (const auto& r : release.table.records()) released[r.url].insert(r.observation_month);
  std::size_t included = 0;
  for (const auto& d : release.decisions) {
    const auto& months = released[d.url];
    if (!d.included) {
      if (!months.empty()) ++violations;
      continue;
    }
    ++included;
    std::set<std::int32_t> expected;
    for (std::int32_t m = d.inclusion_month; m < n_months; ++m) expected.insert(m);
    if (months != expected) ++violations;
  }

  // Unbiased count noise: per action, 1e5 cells.
  EngagementTable noisy_in;
  const int cells_per_action = 100000;
  const int urls2 = cells_per_action / (2 * 6);
  for (int u = 0; u <= urls2; ++u) {
    const auto url = noisy_in.intern_url("n" + std::to_string(u));
    for (int m = 0; m < 2; ++m) {
      for (const Ppa p : kAllPpa) {
        for (const Action a : kAllActions) {
          CountRecord r;
          r.url = url;
          r.domain = 0;
          r.first_month = 0;
          r.observation_month = m;
          r.action = a;
          r.ppa = p;
          r.count = 1000.0;
          noisy_in.records().push_back(r);
        }
      }
    }
  }
  NoiseModel gauss;
  gauss.set_all_sigma(5.0);
  gauss.share_threshold = 1.0;  // everything qualifies
  const auto noisy = apply_privacy_release(noisy_in, gauss, 407);
  std::array<double, kActionCount> sums{};
  std::array<std::size_t, kActionCount> ns{};
  for (const auto& r : noisy.table.records()) {
    sums[static_cast<std::size_t>(r.action)] += r.count - 1000.0;
    ++ns[static_cast<std::size_t>(r.action)];
  }
  double worst_z = 0.0;
  for (const Action a : kAllActions) {
    const auto ai = static_cast<std::size_t>(a);
    const double mean = sums[ai] / static_cast<double>(ns[ai]);
    const double se = 5.0 / std::sqrt(static_cast<double>(ns[ai]));
    worst_z = std::max(worst_z, std::abs(mean) / se);
  }

  const bool pass = violations == 0 && included > 1000 && worst_z <= 4.0;
  return {pass, std::to_string(violations) + " monotonicity violations over 1e5 URLs (" +
                    std::to_string(included) + " included); worst |noise mean| " + fmt(worst_z) +
                    " standard errors (need <= 4)"};
}

// ---------------------------------------------------------------------------
// 6. Noise robustness of the weighted mean
// ---------------------------------------------------------------------------

Outcome criterion_noise_robustness() {
  const auto domains = uniform_domains(500, 601);
  const std::int32_t month = 500;
  MetricOptions opts;
  opts.bootstrap_replicates = 0;
  opts.snr_gate = 1e4;  // the regime under test

  int within = 0;
  double min_snr = std::numeric_limits<double>::infinity();
  for (int seed = 0; seed < 200; ++seed) {
    Rng rng(7000 + static_cast<std::uint64_t>(seed));
    EngagementTable truth;
    for (int u = 0; u < 400; ++u) {
      const auto url = truth.intern_url("u" + std::to_string(u));
      const auto domain = static_cast<std::uint32_t>(rng.next_int(0, domains.size() - 1));
      for (const Ppa p : {Ppa::p1, Ppa::p2}) {
        CountRecord r;
        r.url = url;
        r.domain = domain;
        r.first_month = month;
        r.observation_month = month;
        r.action = Action::clicks;
        r.ppa = p;
        r.count = rng.uniform(80.0, 120.0);
        truth.records().push_back(r);
      }
      CountRecord shares;
      shares.url = url;
      shares.domain = domain;
      shares.first_month = month;
      shares.observation_month = month;
      shares.action = Action::shares;
      shares.ppa = Ppa::zero;
      shares.count = 500.0;  // safely above the inclusion threshold
      truth.records().push_back(shares);
    }

    MetricOptions true_opts = opts;
    true_opts.snr_gate = 0.0;
    const auto true_stats = weighted_moments(truth, domains, NoiseModel::noiseless(),
                                             Action::clicks, UserGroup::conservative,
                                             ScoreDim::ideology, month, true_opts);

    NoiseModel noise;
    noise.set_all_sigma(0.25);
    const auto release =
        apply_privacy_release(truth, noise, 8800 + static_cast<std::uint64_t>(seed));
    const auto noisy_stats = weighted_moments(release.table, domains, noise, Action::clicks,
                                              UserGroup::conservative, ScoreDim::ideology, month,
                                              opts);
    min_snr = std::min(min_snr, noisy_stats.snr);
    if (std::abs(noisy_stats.mean - true_stats.mean) <=
        3.0 * noisy_stats.worst_case.half_width()) {
      ++within;
    }
  }

  // Bootstrap dispersion at 1e4 URLs.
  EngagementTable big;
  Rng rng(9001);
  for (int u = 0; u < 10000; ++u) {
    CountRecord r;
    r.url = big.intern_url("b" + std::to_string(u));
    r.domain = static_cast<std::uint32_t>(rng.next_int(0, domains.size() - 1));
    r.first_month = month;
    r.observation_month = month;
    r.action = Action::clicks;
    r.ppa = Ppa::zero;
    r.count = 100.0 * rng.lognormal(0.0, 0.75);
    big.records().push_back(r);
  }
  MetricOptions boot_opts;
  boot_opts.bootstrap_replicates = 1000;
  boot_opts.bootstrap_seed = 31415;
  boot_opts.snr_gate = 0.0;
  const auto boot = weighted_moments(big, domains, NoiseModel::noiseless(), Action::clicks,
                                     UserGroup::centrist, ScoreDim::ideology, month, boot_opts);

  const bool pass = within >= 198 && min_snr >= 1e4 && boot.bootstrap.stddev < 0.005;
  return {pass, "noisy mean within 3 worst-case half-widths in " + std::to_string(within) +
                    "/200 seeds (need 198), min denominator SNR " + fmt(min_snr) +
                    "; bootstrap std at 1e4 URLs " + fmt(boot.bootstrap.stddev) +
                    " (need < 0.005)"};
}

// ---------------------------------------------------------------------------
// 7. Trivial identities
// ---------------------------------------------------------------------------

Outcome criterion_trivial_identities() {
  const auto domains = uniform_domains(6, 701);
  const std::int32_t month = 400;
  const auto quiet = NoiseModel::noiseless();
  MetricOptions opts;
  opts.bootstrap_replicates = 0;

  auto record = [&domains](EngagementTable& t, const std::string& url, std::size_t domain,
                           std::int32_t m, Action a, Ppa p, double count) {
    CountRecord r;
    r.url = t.intern_url(url);
    r.domain = static_cast<std::uint32_t>(domain);
    r.first_month = m;
    r.observation_month = m;
    r.action = a;
    r.ppa = p;
    r.count = count;
    t.records().push_back(r);
    (void)domains;
  };

  bool ok = true;
  std::string detail;

  // Identical conservative/liberal profiles: gap exactly 0.
  {
    EngagementTable t;
    record(t, "u1", 2, month, Action::clicks, Ppa::p1, 10.0);
    record(t, "u1", 2, month, Action::clicks, Ppa::m1, 10.0);
    record(t, "u2", 3, month, Action::clicks, Ppa::p2, 6.0);
    record(t, "u2", 3, month, Action::clicks, Ppa::m2, 6.0);
    const auto gap = ideology_gap(t, domains, quiet, Action::clicks, month, opts);
    if (gap.gap != 0.0) {
      ok = false;
      detail += " gap=" + fmt(gap.gap);
    }
  }
  // TV(p, p) exactly 0.
  {
    const std::vector<double> p = {0.25, 0.5, 0.25};
    if (total_variation(std::span<const double>(p), std::span<const double>(p)) != 0.0) {
      ok = false;
      detail += " tv!=0";
    }
  }
  // Views row of the normalized engagement profile identically 1.
  {
    EngagementTable t;
    for (const Ppa p : kAllPpa) {
      record(t, "u1", 2, month, Action::views, p, 40.0 + 3.0 * static_cast<double>(p__unused(p)));
    }
    const auto e = normalized_engagement(t, quiet, month, month);
    for (std::size_t c = 0; c < e.buckets.size(); ++c) {
      if (e.e_at(0, c) != 1.0) {
        ok = false;
        detail += " views!=1";
      }
    }
  }
  // Low-quality share exactly 0 and exactly 1.
  {
    DomainTable mixed({{"lo1", 0.0, 0.0, 0.2},
                       {"lo2", 1.0, 0.0, 0.3},
                       {"hi1", 0.5, 0.0, 0.8},
                       {"hi2", 0.25, 0.0, 0.9}});
    EngagementTable all_low;
    record(all_low, "u1", 0, month, Action::clicks, Ppa::zero, 5.0);
    record(all_low, "u2", 1, month, Action::clicks, Ppa::nd, 2.0);
    EngagementTable all_high;
    record(all_high, "u1", 2, month, Action::clicks, Ppa::zero, 5.0);
    record(all_high, "u2", 3, month, Action::clicks, Ppa::m1, 2.0);
    const auto low = low_quality_share(all_low, mixed, quiet, Action::clicks, month, 0.6, opts);
    const auto high = low_quality_share(all_high, mixed, quiet, Action::clicks, month, 0.6, opts);
    if (low.share != 1.0 || high.share != 0.0) {
      ok = false;
      detail += " share in (0,1)";
    }
  }
  return {ok, ok ? "gap identity, TV identity, views row, low-quality indicators all exact"
                 : detail};
}

// ---------------------------------------------------------------------------
// 8. Cutoff robustness
// ---------------------------------------------------------------------------

Outcome criterion_cutoff_robustness() {
  PipelineConfig config;
  config.seed = 808;
  config.horizon_months = 24;
  config.population.n_domains = 400;
  config.population.arrivals_lo = 200;
  config.population.arrivals_hi = 260;
  // 95% of the engagement mass inside the first three months of life,
  // with a small tail beyond the shortest cutoff.
  config.population.decay = {0.66, 0.25, 0.04, 0.02, 0.015, 0.01, 0.005};
  config.trend = TrendSpec{100.0, {}, {0.0}};
  config.noise.set_all_sigma(1.0);
  config.metric_opts.bootstrap_replicates = 10;
  config.max_breakpoints = 2;

  const std::vector<int> ages = {3, 6, 12};
  const auto rows = compare_cutoffs(config, ages);
  double worst_gated = 0.0;
  std::string worst_name = "-";
  std::size_t gated = 0;
  for (const auto& row : rows) {
    if (!row.gated) continue;
    ++gated;
    if (row.divergence > worst_gated) {
      worst_gated = row.divergence;
      worst_name = row.output;
    }
  }
  const bool pass = gated >= 10 && worst_gated <= 0.005;
  return {pass, "worst divergence over cutoffs {3,6,12} across " + std::to_string(gated) +
                    " score-scale outputs: " + fmt(worst_gated) + " (" + worst_name +
                    ", need <= 0.005)"};
}

// ---------------------------------------------------------------------------
// 9. Byte-identical determinism
// ---------------------------------------------------------------------------

Outcome criterion_determinism() {
  PipelineConfig config;
  config.seed = 909;
  config.horizon_months = 12;
  config.population.n_domains = 150;
  config.population.arrivals_lo = 40;
  config.population.arrivals_hi = 60;
  config.population.decay = {0.55, 0.25, 0.12, 0.08};
  config.trend = TrendSpec{100.0, {}, {0.0}};
  config.noise.set_all_sigma(1.0);
  config.metric_opts.bootstrap_replicates = 20;
  config.max_breakpoints = 2;
  config.emit_counts = true;

  const auto base = fs::temp_directory_path() / "enga_acceptance";
  fs::remove_all(base);
  auto run = [&](const fs::path& dir) {
    PipelineConfig c = config;
    c.out_dir = dir;
    const PipelineData data = acquire_data(c);
    write_bundle(analyze(data, c), data, c);
  };
  run(base / "a");
  run(base / "b");

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    ++files;
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(base / "b" / entry.path().filename(), std::ios::binary);
    std::stringstream sa;
    std::stringstream sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str() || sa.str().empty()) {
      return {false, "file " + entry.path().filename().string() + " differs between runs"};
    }
  }
  fs::remove_all(base);
  return {files >= 18, std::to_string(files) + " artifacts byte-identical across two runs"};
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"weighted-moment oracle equivalence", criterion_weighted_moment_oracle},
      {"planted change-point recovery", criterion_changepoint_recovery},
      {"change-region aggregation", criterion_region_aggregation},
      {"generator calibration", criterion_generator_calibration},
      {"privacy-release invariants", criterion_release_invariants},
      {"noise robustness", criterion_noise_robustness},
      {"trivial identities", criterion_trivial_identities},
      {"cutoff robustness", criterion_cutoff_robustness},
      {"determinism", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << i + 1 << " ("
              << criteria[i].first << "): " << outcome.detail << '\n';
  }
  const double total = seconds_since(start);
  std::cout << (failures == 0 ? "PASS" : "FAIL") << "  total: " << criteria.size() - failures
            << "/" << criteria.size() << " criteria in " << fmt(total) << " s (limit 600)\n";
  if (total >= 600.0) ++failures;
  return failures == 0 ? 0 : 1;
}
