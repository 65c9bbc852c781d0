#include "enga/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>

#include "enga/csv.hpp"
#include "enga/errors.hpp"
#include "enga/rng.hpp"

namespace enga {

namespace {

using nlohmann::json;

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const GateError& e) {
    throw PipelineError(name, e.what(), 3);
  } catch (const ConfigError& e) {
    throw PipelineError(name, e.what(), 2);
  } catch (const std::out_of_range& e) {
    throw PipelineError(name, e.what(), 4);
  } catch (const DataError& e) {
    throw PipelineError(name, e.what(), 4);
  }
}

std::string month_name(std::int32_t linear) { return to_string(Month::from_index(linear)); }

json interval_json(const Interval& iv) { return {{"lo", iv.lo}, {"hi", iv.hi}}; }

json stats_json(const WeightedStats& s) {
  return {{"mean", s.mean},
          {"stddev", s.stddev},
          {"snr", s.snr},
          {"worst_case", interval_json(s.worst_case)},
          {"bootstrap",
           {{"stddev", s.bootstrap.stddev}, {"q025", s.bootstrap.q025}, {"q975", s.bootstrap.q975}}},
          {"denominator", s.denominator},
          {"n_urls", s.n_urls},
          {"n_cells", s.n_cells}};
}

void dump_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double distribution_snr(const Distribution& d, const NoiseModel& noise, Action action) {
  return snr(d.raw_total, noise.sigma_of(action) * std::sqrt(static_cast<double>(d.n_cells)));
}

}  // namespace

PipelineData acquire_data(const PipelineConfig& config) {
  validate(config);
  PipelineData data;
  if (config.mode == InputMode::synth) {
    data.domains = stage("generate-domains",
                         [&] { return generate_domains(config.population, config.seed); });
    auto [true_table, manifest] = stage("generate-panel", [&] {
      return generate_panel(data.domains, config.population, config.trend, config.horizon_months,
                            config.start_month, config.seed);
    });
    auto release = stage("privacy-release", [&] {
      return apply_privacy_release(true_table, config.noise, derive_seed(config.seed, "release"));
    });
    data.truth = std::move(manifest);
    data.inclusion = std::move(release.decisions);
    data.true_counts = std::move(true_table);
    data.counts = std::move(release.table);
  } else {
    data.domains = stage("load-domains", [&] { return load_domains(config.domains_path); });
    data.counts =
        stage("load-counts", [&] { return load_counts(config.counts_path, data.domains); });
  }
  return data;
}

ReportBundle analyze(const PipelineData& data, const PipelineConfig& config) {
  ReportBundle bundle;
  bundle.config_hash = config_hash(config);
  bundle.seed = config.seed;
  bundle.min_denominator_snr = std::numeric_limits<double>::infinity();

  auto [table, repair] =
      stage("cutoff", [&] { return apply_cutoff(data.counts, config.cutoff); });
  bundle.repair = repair;

  const auto months = table.observation_months();
  if (months.empty()) throw PipelineError("cutoff", "no records survive the cutoff", 4);
  bundle.months = months;

  // Month slices so the per-month metrics scan only their own records.
  std::unordered_map<std::int32_t, std::size_t> month_index;
  for (std::size_t i = 0; i < months.size(); ++i) month_index.emplace(months[i], i);
  std::vector<std::vector<CountRecord>> slices(months.size());
  for (const auto& r : table.records()) {
    slices[month_index.at(r.observation_month)].push_back(r);
  }

  for (const Action a : kAllActions) {
    bundle.timelines[static_cast<std::size_t>(a)] = monthly_totals(table, a, months);
  }

  bundle.engagement_profile = stage("normalized-engagement", [&] {
    return normalized_engagement(table, config.noise, months.front(), months.back(),
                                 config.metric_opts);
  });
  bundle.ideology_by_bucket = stage("conditional-distribution(ideology)", [&] {
    return conditional_distribution(table, data.domains, config.analysis_action,
                                    ScoreDim::ideology, config.ideology_bins, months.front(),
                                    months.back());
  });
  bundle.quality_by_bucket = stage("conditional-distribution(quality)", [&] {
    return conditional_distribution(table, data.domains, config.analysis_action,
                                    ScoreDim::quality, config.quality_bins, months.front(),
                                    months.back());
  });

  const std::uint64_t boot_master = derive_seed(config.seed, "bootstrap");
  for (std::size_t i = 0; i < months.size(); ++i) {
    const std::string when = month_name(months[i]);
    const std::span<const CountRecord> slice(slices[i]);

    for (const ScoreDim dim : {ScoreDim::ideology, ScoreDim::quality}) {
      const auto di = static_cast<std::size_t>(dim);
      const BinSpec& bins = dim == ScoreDim::ideology ? config.ideology_bins : config.quality_bins;

      for (const UserGroup g : kAllGroups) {
        const auto gi = static_cast<std::size_t>(g);
        MetricOptions opts = config.metric_opts;
        opts.bootstrap_seed = derive_seed(boot_master, (i << 4) | (gi << 1) | di);
        auto stats = stage("weighted-moments(" + std::string(to_string(g)) + ", " +
                               std::string(to_string(dim)) + ") at " + when,
                           [&] {
                             return weighted_moments(slice, data.domains, config.noise,
                                                     config.analysis_action, g, dim, opts);
                           });
        bundle.min_denominator_snr = std::min(bundle.min_denominator_snr, stats.snr);
        bundle.group_stats[di][gi].push_back(stats);

        bundle.violins[di][gi].push_back(
            stage("violin(" + std::string(to_string(g)) + ", " + std::string(to_string(dim)) +
                      ") at " + when,
                  [&] {
                    return binned_distribution(slice, data.domains, config.analysis_action, dim,
                                               bins, buckets_of(g));
                  }));
      }

      auto& monthly = dim == ScoreDim::ideology ? bundle.monthly_ideology : bundle.monthly_quality;
      monthly.push_back(stage(
          "monthly-distribution(" + std::string(to_string(dim)) + ") at " + when, [&] {
            return binned_distribution(slice, data.domains, config.analysis_action, dim, bins);
          }));
    }

    constexpr auto kIdeo = static_cast<std::size_t>(ScoreDim::ideology);
    bundle.gap.push_back(ideology_gap_from(
        bundle.group_stats[kIdeo][static_cast<std::size_t>(UserGroup::conservative)][i],
        bundle.group_stats[kIdeo][static_cast<std::size_t>(UserGroup::liberal)][i]));

    auto share = stage("low-quality-share at " + when, [&] {
      return low_quality_share(slice, data.domains, config.noise, config.analysis_action,
                               config.t_low, config.metric_opts);
    });
    bundle.min_denominator_snr = std::min(bundle.min_denominator_snr, share.snr);
    bundle.low_quality.push_back(share);
  }

  // Change points per action timeline, on a month axis relative to the
  // first analysis month.
  std::vector<double> t(months.size());
  for (std::size_t i = 0; i < months.size(); ++i) {
    t[i] = static_cast<double>(months[i] - months.front());
  }
  for (const Action a : kAllActions) {
    bundle.fits.push_back(stage("changepoint(" + std::string(to_string(a)) + ")", [&] {
      return select_model(t, bundle.timelines[static_cast<std::size_t>(a)],
                          config.max_breakpoints, config.fit_opts);
    }));
  }
  bundle.regions = aggregate_regions(bundle.fits, config.region_window_months,
                                     config.region_min_support);
  return bundle;
}

ReportBundle run_pipeline(const PipelineConfig& config) {
  const PipelineData data = acquire_data(config);
  return analyze(data, config);
}

namespace {

void write_fig3a(const ReportBundle& b, const std::filesystem::path& dir) {
  csv::Writer w(dir / "fig3a.csv");
  std::vector<std::string> header = {"action"};
  for (const Ppa p : b.engagement_profile.buckets) header.emplace_back(to_string(p));
  w.row(header);
  for (std::size_t row = 0; row < b.engagement_profile.actions.size(); ++row) {
    std::vector<std::string> fields = {std::string(to_string(b.engagement_profile.actions[row]))};
    for (std::size_t col = 0; col < b.engagement_profile.buckets.size(); ++col) {
      fields.push_back(csv::format_double(b.engagement_profile.e_at(row, col)));
    }
    w.row(fields);
  }
}

void write_heatmap(const ConditionalDistribution& dist, const std::filesystem::path& path) {
  csv::Writer w(path);
  std::vector<std::string> header = {"bin_center"};
  for (const Ppa p : dist.categories) header.emplace_back(to_string(p));
  w.row(header);
  for (int k = 0; k < dist.bins.count; ++k) {
    std::vector<std::string> fields = {csv::format_double(dist.bins.center(k))};
    for (std::size_t c = 0; c < dist.categories.size(); ++c) {
      fields.push_back(csv::format_double(dist.columns[c][static_cast<std::size_t>(k)]));
    }
    w.row(fields);
  }
}

void write_fig4(const ReportBundle& b, const std::filesystem::path& dir) {
  csv::Writer w(dir / "fig4_timelines.csv");
  std::vector<std::string> header = {"month"};
  for (const Action a : kAllActions) header.emplace_back(to_string(a));
  w.row(header);
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    std::vector<std::string> fields = {month_name(b.months[i])};
    for (const Action a : kAllActions) {
      fields.push_back(csv::format_double(b.timelines[static_cast<std::size_t>(a)][i]));
    }
    w.row(fields);
  }
}

void write_group_stats(const ReportBundle& b, ScoreDim dim, const std::filesystem::path& mean_path,
                       const std::filesystem::path& std_path) {
  csv::Writer means(mean_path);
  means.row({"month", "group", "mean", "lo", "hi", "snr", "boot_std", "boot_q025", "boot_q975"});
  csv::Writer stds(std_path);
  stds.row({"month", "group", "stddev"});
  const auto di = static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    for (const UserGroup g : kAllGroups) {
      const auto& s = b.group_stats[di][static_cast<std::size_t>(g)][i];
      means.row({month_name(b.months[i]), std::string(to_string(g)), csv::format_double(s.mean),
                 csv::format_double(s.worst_case.lo), csv::format_double(s.worst_case.hi),
                 csv::format_double(s.snr), csv::format_double(s.bootstrap.stddev),
                 csv::format_double(s.bootstrap.q025), csv::format_double(s.bootstrap.q975)});
      stds.row({month_name(b.months[i]), std::string(to_string(g)),
                csv::format_double(s.stddev)});
    }
  }
}

void write_fig5c(const ReportBundle& b, const std::filesystem::path& dir) {
  csv::Writer w(dir / "fig5c.csv");
  w.row({"month", "gap", "lo", "hi", "snr_conservative", "snr_liberal"});
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    const auto& g = b.gap[i];
    w.row({month_name(b.months[i]), csv::format_double(g.gap), csv::format_double(g.interval.lo),
           csv::format_double(g.interval.hi), csv::format_double(g.conservative.snr),
           csv::format_double(g.liberal.snr)});
  }
}

void write_fig5f(const ReportBundle& b, const std::filesystem::path& dir) {
  csv::Writer w(dir / "fig5f.csv");
  w.row({"month", "share", "lo", "hi", "snr"});
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    const auto& s = b.low_quality[i];
    w.row({month_name(b.months[i]), csv::format_double(s.share), csv::format_double(s.interval.lo),
           csv::format_double(s.interval.hi), csv::format_double(s.snr)});
  }
}

void write_violins(const ReportBundle& b, ScoreDim dim, const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"month", "group", "bin_center", "weight"});
  const auto di = static_cast<std::size_t>(dim);
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    for (const UserGroup g : kAllGroups) {
      const auto& dist = b.violins[di][static_cast<std::size_t>(g)][i];
      for (int k = 0; k < dist.bins.count; ++k) {
        w.row({month_name(b.months[i]), std::string(to_string(g)),
               csv::format_double(dist.bins.center(k)),
               csv::format_double(dist.p[static_cast<std::size_t>(k)])});
      }
    }
  }
}

void write_fig7(const std::vector<Distribution>& dists, const ReportBundle& b,
                const std::filesystem::path& path) {
  csv::Writer w(path);
  w.row({"month", "bin_center", "share"});
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    const auto& dist = dists[i];
    for (int k = 0; k < dist.bins.count; ++k) {
      w.row({month_name(b.months[i]), csv::format_double(dist.bins.center(k)),
             csv::format_double(dist.p[static_cast<std::size_t>(k)])});
    }
  }
}

json metrics_json(const ReportBundle& b, const PipelineConfig& config) {
  json out = json::array();
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    json groups;
    for (const UserGroup g : kAllGroups) {
      const auto gi = static_cast<std::size_t>(g);
      json violin_snr;
      for (const ScoreDim dim : {ScoreDim::ideology, ScoreDim::quality}) {
        const auto di = static_cast<std::size_t>(dim);
        violin_snr[std::string(to_string(dim))] = distribution_snr(
            b.violins[di][gi][i], config.noise, config.analysis_action);
      }
      groups[std::string(to_string(g))] = {
          {"ideology", stats_json(b.group_stats[0][gi][i])},
          {"quality", stats_json(b.group_stats[1][gi][i])},
          {"violin_snr", violin_snr}};
    }
    const auto& gap = b.gap[i];
    const auto& low = b.low_quality[i];
    out.push_back(
        {{"month", month_name(b.months[i])},
         {"groups", groups},
         {"gap",
          {{"value", gap.gap},
           {"interval", interval_json(gap.interval)},
           {"snr_conservative", gap.conservative.snr},
           {"snr_liberal", gap.liberal.snr}}},
         {"low_quality",
          {{"share", low.share},
           {"interval", interval_json(low.interval)},
           {"snr", low.snr},
           {"t_low", config.t_low}}},
         {"distribution_snr",
          {{"ideology", distribution_snr(b.monthly_ideology[i], config.noise,
                                         config.analysis_action)},
           {"quality",
            distribution_snr(b.monthly_quality[i], config.noise, config.analysis_action)}}}});
  }
  return out;
}

json changepoints_json(const ReportBundle& b) {
  json fits = json::array();
  for (std::size_t a = 0; a < b.fits.size(); ++a) {
    const auto& fit = b.fits[a];
    json segments = json::array();
    for (const auto& s : fit.segments) {
      segments.push_back(
          {{"start", s.start}, {"end", s.end}, {"slope", s.slope}, {"intercept", s.intercept}});
    }
    fits.push_back({{"action", std::string(to_string(static_cast<Action>(a)))},
                    {"breakpoints", fit.breakpoints},
                    {"segments", segments},
                    {"sse", fit.sse},
                    {"bic", fit.bic},
                    {"n_points", fit.n_points}});
  }
  json regions = json::array();
  for (const auto& r : b.regions) {
    regions.push_back({{"start", month_name(b.months.front() + r.start_month)},
                       {"end", month_name(b.months.front() + r.end_month)},
                       {"support", r.support}});
  }
  return {{"axis_origin", month_name(b.months.front())}, {"fits", fits}, {"regions", regions}};
}

json ground_truth_json(const GroundTruthManifest& truth, const DomainTable& domains) {
  json domain_rows = json::array();
  for (const auto& d : domains.rows()) {
    domain_rows.push_back({{"domain_id", d.domain_id},
                           {"ideology_raw", d.ideology_raw},
                           {"ideology_norm", d.ideology_norm},
                           {"quality", d.quality}});
  }
  json monthly = json::array();
  for (const auto& m : truth.monthly_truth) {
    json ideology;
    json quality;
    for (const UserGroup g : kAllGroups) {
      const auto gi = static_cast<std::size_t>(g);
      ideology[std::string(to_string(g))] = m.ideology_mean[gi];
      quality[std::string(to_string(g))] = m.quality_mean[gi];
    }
    monthly.push_back({{"month", month_name(m.month)},
                       {"arrivals", m.arrivals},
                       {"ideology_mean", ideology},
                       {"quality_mean", quality}});
  }
  return {{"seed", truth.seed},
          {"trend",
           {{"start_level", truth.trend.start_level},
            {"breakpoints", truth.trend.breakpoints},
            {"slopes", truth.trend.slopes}}},
          {"domains", domain_rows},
          {"monthly_truth", monthly}};
}

}  // namespace

void write_bundle(const ReportBundle& b, const PipelineData& data, const PipelineConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("no output directory configured");
  std::filesystem::create_directories(config.out_dir);
  const auto& dir = config.out_dir;

  json manifest = {
      {"config_hash", b.config_hash},
      {"seed", b.seed},
      {"config", to_json(config)},
      {"months", {month_name(b.months.front()), month_name(b.months.back())}},
      {"ideology_normalization",
       {{"raw_min", data.domains.normalization().raw_min},
        {"raw_max", data.domains.normalization().raw_max}}},
      {"repair",
       {{"rows_folded", b.repair.rows_folded},
        {"folded_mass", b.repair.folded_mass},
        {"rows_dropped_early", b.repair.rows_dropped_early},
        {"dropped_early_mass", b.repair.dropped_early_mass},
        {"rows_dropped_stale", b.repair.rows_dropped_stale},
        {"dropped_stale_mass", b.repair.dropped_stale_mass}}},
      {"gates",
       {{"snr_gate", config.metric_opts.snr_gate},
        {"min_denominator_snr", b.min_denominator_snr},
        {"all_passed", true}}},
      {"methods",
       {{"snr", "|aggregate| / root-sum-square of per-cell sigmas (reconstruction)"},
        {"worst_case_interval", "k-sigma worst case on numerator and denominator (reconstruction)"},
        {"normalization", "engagement ratios use the views baseline only"}}},
  };
  json view_snr;
  for (std::size_t c = 0; c < b.engagement_profile.buckets.size(); ++c) {
    view_snr[std::string(to_string(b.engagement_profile.buckets[c]))] =
        b.engagement_profile.view_snr[c];
  }
  json floored = {{"fig3b", b.ideology_by_bucket.floored_mass},
                  {"fig3c", b.quality_by_bucket.floored_mass}};
  manifest["diagnostics"] = {{"view_snr", view_snr}, {"floored_mass", floored}};
  dump_json(manifest, dir / "manifest.json");

  write_fig3a(b, dir);
  write_heatmap(b.ideology_by_bucket, dir / "fig3b.csv");
  write_heatmap(b.quality_by_bucket, dir / "fig3c.csv");
  write_fig4(b, dir);
  write_group_stats(b, ScoreDim::ideology, dir / "fig5a.csv", dir / "fig5b.csv");
  write_group_stats(b, ScoreDim::quality, dir / "fig5d.csv", dir / "fig5e.csv");
  write_fig5c(b, dir);
  write_fig5f(b, dir);
  write_violins(b, ScoreDim::ideology, dir / "fig6_ideology.csv");
  write_violins(b, ScoreDim::quality, dir / "fig6_quality.csv");
  write_fig7(b.monthly_ideology, b, dir / "fig7_ideology.csv");
  write_fig7(b.monthly_quality, b, dir / "fig7_quality.csv");
  dump_json(metrics_json(b, config), dir / "metrics.json");
  dump_json(changepoints_json(b), dir / "changepoints.json");

  if (data.truth) {
    dump_json(ground_truth_json(*data.truth, data.domains), dir / "ground_truth.json");
  }
  if (config.emit_counts) {
    save_domains(data.domains, dir / "domains.csv");
    save_counts(data.counts, data.domains, dir / "released_counts.csv");
    if (data.true_counts) {
      save_counts(*data.true_counts, data.domains, dir / "true_counts.csv");
    }
  }
}

namespace {

// Values of every gated (probability/score scale) output, keyed so month
// axes can be joined across cutoff settings.
void collect_outputs(const ReportBundle& b,
                     std::map<std::string, std::map<std::string, double>>& out) {
  auto& fig3a = out["fig3a"];
  for (std::size_t r = 0; r < b.engagement_profile.actions.size(); ++r) {
    for (std::size_t c = 0; c < b.engagement_profile.buckets.size(); ++c) {
      fig3a[std::string(to_string(b.engagement_profile.actions[r])) + "|" +
            std::string(to_string(b.engagement_profile.buckets[c]))] =
          b.engagement_profile.e_at(r, c);
    }
  }
  auto heatmap = [&](const char* name, const ConditionalDistribution& d) {
    auto& table = out[name];
    for (std::size_t c = 0; c < d.categories.size(); ++c) {
      for (std::size_t k = 0; k < d.columns[c].size(); ++k) {
        table[std::string(to_string(d.categories[c])) + "|" + std::to_string(k)] =
            d.columns[c][k];
      }
    }
  };
  heatmap("fig3b", b.ideology_by_bucket);
  heatmap("fig3c", b.quality_by_bucket);

  for (const ScoreDim dim : {ScoreDim::ideology, ScoreDim::quality}) {
    const auto di = static_cast<std::size_t>(dim);
    auto& means = out[dim == ScoreDim::ideology ? "fig5a_means" : "fig5d_means"];
    auto& stds = out[dim == ScoreDim::ideology ? "fig5b_stds" : "fig5e_stds"];
    for (std::size_t i = 0; i < b.months.size(); ++i) {
      for (const UserGroup g : kAllGroups) {
        const auto& s = b.group_stats[di][static_cast<std::size_t>(g)][i];
        const std::string key = month_name(b.months[i]) + "|" + std::string(to_string(g));
        means[key] = s.mean;
        stds[key] = s.stddev;
      }
    }
  }
  auto& gap = out["fig5c_gap"];
  auto& low = out["fig5f_low_quality"];
  for (std::size_t i = 0; i < b.months.size(); ++i) {
    gap[month_name(b.months[i])] = b.gap[i].gap;
    low[month_name(b.months[i])] = b.low_quality[i].share;
  }

  for (const ScoreDim dim : {ScoreDim::ideology, ScoreDim::quality}) {
    const auto di = static_cast<std::size_t>(dim);
    auto& violin = out[dim == ScoreDim::ideology ? "fig6_ideology" : "fig6_quality"];
    for (std::size_t i = 0; i < b.months.size(); ++i) {
      for (const UserGroup g : kAllGroups) {
        const auto& dist = b.violins[di][static_cast<std::size_t>(g)][i];
        for (std::size_t k = 0; k < dist.p.size(); ++k) {
          violin[month_name(b.months[i]) + "|" + std::string(to_string(g)) + "|" +
                 std::to_string(k)] = dist.p[k];
        }
      }
    }
    auto& monthly = out[dim == ScoreDim::ideology ? "fig7_ideology" : "fig7_quality"];
    const auto& dists = dim == ScoreDim::ideology ? b.monthly_ideology : b.monthly_quality;
    for (std::size_t i = 0; i < b.months.size(); ++i) {
      for (std::size_t k = 0; k < dists[i].p.size(); ++k) {
        monthly[month_name(b.months[i]) + "|" + std::to_string(k)] = dists[i].p[k];
      }
    }
  }
}

void collect_timelines(const ReportBundle& b,
                       std::map<std::string, std::map<std::string, double>>& out) {
  for (const Action a : kAllActions) {
    auto& series = out["fig4_" + std::string(to_string(a))];
    for (std::size_t i = 0; i < b.months.size(); ++i) {
      series[month_name(b.months[i])] = b.timelines[static_cast<std::size_t>(a)][i];
    }
  }
}

}  // namespace

std::vector<DivergenceRow> compare_cutoffs(const PipelineConfig& config,
                                           std::span<const int> ages) {
  if (ages.size() < 2) throw ConfigError("compare_cutoffs needs at least two cutoff ages");
  const PipelineData data = acquire_data(config);

  std::vector<std::map<std::string, std::map<std::string, double>>> gated(ages.size());
  std::vector<std::map<std::string, std::map<std::string, double>>> counts(ages.size());
  for (std::size_t i = 0; i < ages.size(); ++i) {
    PipelineConfig cfg = config;
    cfg.cutoff.max_age_months = ages[i];
    const ReportBundle bundle = analyze(data, cfg);
    collect_outputs(bundle, gated[i]);
    collect_timelines(bundle, counts[i]);
  }

  auto divergence = [&](const auto& tables, const std::string& name, bool relative) {
    double worst = 0.0;
    const auto& base = tables[0].at(name);
    for (const auto& [key, base_value] : base) {
      double lo = base_value;
      double hi = base_value;
      bool everywhere = true;
      for (std::size_t i = 1; i < tables.size(); ++i) {
        const auto& t = tables[i].at(name);
        const auto it = t.find(key);
        if (it == t.end()) {
          everywhere = false;
          break;
        }
        lo = std::min(lo, it->second);
        hi = std::max(hi, it->second);
      }
      if (!everywhere) continue;
      double d = hi - lo;
      if (relative) d /= std::max({std::abs(lo), std::abs(hi), 1.0});
      worst = std::max(worst, d);
    }
    return worst;
  };

  std::vector<DivergenceRow> rows;
  for (const auto& [name, values] : gated[0]) {
    rows.push_back(DivergenceRow{name, divergence(gated, name, false), true});
  }
  for (const auto& [name, values] : counts[0]) {
    rows.push_back(DivergenceRow{name, divergence(counts, name, true), false});
  }
  return rows;
}

}  // namespace enga
