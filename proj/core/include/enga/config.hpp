#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "enga/changepoint.hpp"
#include "enga/cutoff.hpp"
#include "enga/metrics.hpp"
#include "enga/noise.hpp"
#include "enga/synth.hpp"

namespace enga {

enum class InputMode : std::uint8_t { synth, files };

// Everything one pipeline run depends on. Serialized to and from JSON;
// the canonical dump of the parsed object is hashed into every emitted
// artifact so outputs are traceable to their exact configuration.
struct PipelineConfig {
  InputMode mode = InputMode::synth;
  std::uint64_t seed = 1;

  // files mode
  std::filesystem::path domains_path;
  std::filesystem::path counts_path;

  CutoffPolicy cutoff;
  NoiseModel noise;

  BinSpec ideology_bins{0.0, 0.094, 11};
  BinSpec quality_bins{-0.045, 0.05, 21};  // grid with a bin centered at 0.58

  Action analysis_action = Action::clicks;
  double t_low = 0.6;
  MetricOptions metric_opts{16.0, 3.0, 200, 0};

  int max_breakpoints = 3;
  SegmentedFitOptions fit_opts;
  double region_window_months = 2.0;
  std::size_t region_min_support = 2;

  // synth mode
  std::int32_t start_month = Month{2017, 1}.index();
  int horizon_months = 48;
  PopulationSpec population;
  TrendSpec trend{100.0, {13.0, 39.0}, {-1.5, 2.0, -2.5}};

  std::filesystem::path out_dir;
  bool emit_counts = false;  // write true/released counts CSVs alongside reports
};

// Parses a config JSON object / file over the defaults above; unknown
// keys are a ConfigError (they are usually typos). Validates every
// component and throws ConfigError with the offending key path.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Canonical JSON form of a config (round-trips through parse_config).
nlohmann::json to_json(const PipelineConfig& config);

// FNV-1a hash of the canonical dump, as fixed-width hex.
std::string config_hash(const PipelineConfig& config);

void validate(const PipelineConfig& config);

}  // namespace enga
