#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "enga/changepoint.hpp"
#include "enga/config.hpp"
#include "enga/cutoff.hpp"
#include "enga/metrics.hpp"
#include "enga/synth.hpp"

namespace enga {

// A pipeline stage failed; `stage` names the step and `exit_code` the
// process exit status the CLI should use (2 config, 3 gate, 4 data).
struct PipelineError : std::runtime_error {
  PipelineError(const std::string& stage_name, const std::string& msg, int code)
      : std::runtime_error(stage_name + ": " + msg), stage(stage_name), exit_code(code) {}
  std::string stage;
  int exit_code;
};

// Input data for one run: the domain table plus the pre-cutoff counts
// panel, with ground truth attached in synth mode.
struct PipelineData {
  DomainTable domains;
  EngagementTable counts;                     // released (synth) or loaded (files)
  std::optional<EngagementTable> true_counts;  // synth mode only
  std::optional<GroundTruthManifest> truth;
  std::vector<InclusionDecision> inclusion;
};

// All plot-ready outputs of one run.
struct ReportBundle {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::int32_t> months;  // analysis month axis (linear indices)

  // Raw engagement timelines, one per action, aligned with `months`.
  std::array<std::vector<double>, kActionCount> timelines;

  // Whole-period views-normalized engagement by bucket.
  NormalizedEngagement engagement_profile;

  // Whole-period P(score bin | bucket) heatmaps.
  ConditionalDistribution ideology_by_bucket;
  ConditionalDistribution quality_by_bucket;

  // Weighted score moments per month: [dim][group][month index].
  std::array<std::array<std::vector<WeightedStats>, 4>, 2> group_stats;

  std::vector<GapPoint> gap;            // per month
  std::vector<SharePoint> low_quality;  // per month

  // Monthly engagement distributions over score bins (all buckets).
  std::vector<Distribution> monthly_ideology;
  std::vector<Distribution> monthly_quality;

  // Per-group weighted score histograms per month: [dim][group][month index].
  std::array<std::array<std::vector<Distribution>, 4>, 2> violins;

  std::vector<SegmentedFit> fits;  // aligned with kAllActions
  std::vector<ChangeRegion> regions;

  RepairReport repair;
  double min_denominator_snr = 0.0;  // over every gated ratio emitted
};

// Generates (synth mode) or loads (files mode) the input data.
PipelineData acquire_data(const PipelineConfig& config);

// Cutoff, metrics, change points. Deterministic for a fixed config+seed.
ReportBundle analyze(const PipelineData& data, const PipelineConfig& config);

ReportBundle run_pipeline(const PipelineConfig& config);

// Writes manifest.json plus the per-figure CSVs into config.out_dir
// (created if missing): fig3a.csv, fig3b.csv, fig3c.csv,
// fig4_timelines.csv, fig5a.csv .. fig5f.csv, fig6_ideology.csv,
// fig6_quality.csv, fig7_ideology.csv, fig7_quality.csv, metrics.json,
// changepoints.json, and ground_truth.json in synth mode. Two runs with
// the same config and seed produce byte-identical files.
void write_bundle(const ReportBundle& bundle, const PipelineData& data,
                  const PipelineConfig& config);

// Max divergence of each emitted output across cutoff ages. Outputs on a
// probability/score scale ([0,1]-valued) are compared absolutely and
// marked `gated`; count-scale outputs (raw timelines) are compared
// relative to their largest magnitude and reported for information only.
struct DivergenceRow {
  std::string output;
  double divergence = 0.0;
  bool gated = false;
};

std::vector<DivergenceRow> compare_cutoffs(const PipelineConfig& config,
                                           std::span<const int> ages);

}  // namespace enga
