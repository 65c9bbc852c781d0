#include "enga/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "enga/csv.hpp"
#include "enga/errors.hpp"
#include "enga/rng.hpp"

namespace enga {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& value) {
  if (j.contains(key)) {
    try {
      j.at(key).get_to(value);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

BinSpec parse_bins(const json& j, const std::string& where) {
  check_keys(j, where, {"origin", "width", "count"});
  BinSpec spec;
  read(j, "origin", spec.origin);
  read(j, "width", spec.width);
  read(j, "count", spec.count);
  return spec;
}

KernelMixture parse_mixture(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of kernels");
  KernelMixture mix;
  mix.kernels.clear();
  for (const auto& kj : j) {
    check_keys(kj, where + ".", {"center", "stddev", "weight"});
    Kernel k;
    read(kj, "center", k.center);
    read(kj, "stddev", k.stddev);
    read(kj, "weight", k.weight);
    mix.kernels.push_back(k);
  }
  return mix;
}

json mixture_to_json(const KernelMixture& mix) {
  json out = json::array();
  for (const auto& k : mix.kernels) {
    out.push_back({{"center", k.center}, {"stddev", k.stddev}, {"weight", k.weight}});
  }
  return out;
}

json bins_to_json(const BinSpec& b) {
  return {{"origin", b.origin}, {"width", b.width}, {"count", b.count}};
}

}  // namespace

PipelineConfig parse_config(const json& j) {
  check_keys(j, "", {"mode", "seed", "paths", "cutoff", "noise", "bins", "analysis",
                     "changepoint", "synth", "out_dir", "emit_counts"});
  PipelineConfig c;

  if (j.contains("mode")) {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "synth") {
      c.mode = InputMode::synth;
    } else if (mode == "files") {
      c.mode = InputMode::files;
    } else {
      throw ConfigError("mode must be 'synth' or 'files', got '" + mode + "'");
    }
  }
  read(j, "seed", c.seed);
  read(j, "emit_counts", c.emit_counts);
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    check_keys(p, "paths.", {"domains", "counts"});
    if (p.contains("domains")) c.domains_path = p.at("domains").get<std::string>();
    if (p.contains("counts")) c.counts_path = p.at("counts").get<std::string>();
  }

  if (j.contains("cutoff")) {
    const auto& p = j.at("cutoff");
    check_keys(p, "cutoff.", {"max_age_months"});
    read(p, "max_age_months", c.cutoff.max_age_months);
  }

  if (j.contains("noise")) {
    const auto& p = j.at("noise");
    check_keys(p, "noise.", {"sigma_default", "sigma", "laplace_scale", "share_threshold"});
    if (p.contains("sigma_default")) c.noise.set_all_sigma(p.at("sigma_default").get<double>());
    if (p.contains("sigma")) {
      for (const auto& [name, sj] : p.at("sigma").items()) {
        c.noise.set_sigma(action_from_string(name), sj.get<double>());
      }
    }
    read(p, "laplace_scale", c.noise.laplace_scale_b);
    read(p, "share_threshold", c.noise.share_threshold);
  }

  if (j.contains("bins")) {
    const auto& p = j.at("bins");
    check_keys(p, "bins.", {"ideology", "quality"});
    if (p.contains("ideology")) c.ideology_bins = parse_bins(p.at("ideology"), "bins.ideology.");
    if (p.contains("quality")) c.quality_bins = parse_bins(p.at("quality"), "bins.quality.");
  }

  if (j.contains("analysis")) {
    const auto& p = j.at("analysis");
    check_keys(p, "analysis.",
               {"action", "t_low", "snr_gate", "worst_case_k", "bootstrap_replicates"});
    if (p.contains("action")) c.analysis_action = action_from_string(p.at("action").get<std::string>());
    read(p, "t_low", c.t_low);
    read(p, "snr_gate", c.metric_opts.snr_gate);
    read(p, "worst_case_k", c.metric_opts.worst_case_k);
    read(p, "bootstrap_replicates", c.metric_opts.bootstrap_replicates);
  }

  if (j.contains("changepoint")) {
    const auto& p = j.at("changepoint");
    check_keys(p, "changepoint.",
               {"max_breakpoints", "grid_step", "min_segment_points", "multistarts",
                "region_window_months", "region_min_support"});
    read(p, "max_breakpoints", c.max_breakpoints);
    read(p, "grid_step", c.fit_opts.grid_step);
    read(p, "min_segment_points", c.fit_opts.min_segment_points);
    read(p, "multistarts", c.fit_opts.multistarts);
    read(p, "region_window_months", c.region_window_months);
    read(p, "region_min_support", c.region_min_support);
  }

  if (j.contains("synth")) {
    const auto& p = j.at("synth");
    check_keys(p, "synth.", {"start_month", "horizon_months", "population", "trend"});
    if (p.contains("start_month")) {
      c.start_month = month_from_string(p.at("start_month").get<std::string>()).index();
    }
    read(p, "horizon_months", c.horizon_months);

    if (p.contains("population")) {
      const auto& q = p.at("population");
      check_keys(q, "synth.population.",
                 {"n_domains", "target_ideology_quality_corr", "high_quality_share",
                  "ideology_raw_lo", "ideology_raw_hi", "group_mixture", "extreme_bucket_share",
                  "arrivals_lo", "arrivals_hi", "arrival_scale", "decay", "min_first_two_mass",
                  "base_rate", "popularity_sigma"});
      auto& pop = c.population;
      read(q, "n_domains", pop.n_domains);
      read(q, "target_ideology_quality_corr", pop.target_ideology_quality_corr);
      read(q, "high_quality_share", pop.high_quality_share);
      read(q, "ideology_raw_lo", pop.ideology_raw_lo);
      read(q, "ideology_raw_hi", pop.ideology_raw_hi);
      if (q.contains("group_mixture")) {
        const auto& m = q.at("group_mixture");
        check_keys(m, "synth.population.group_mixture.",
                   {"conservative", "liberal", "centrist", "undefined"});
        for (const UserGroup g : kAllGroups) {
          const std::string name(to_string(g));
          if (m.contains(name)) {
            pop.group_mixture[static_cast<std::size_t>(g)] =
                parse_mixture(m.at(name), "synth.population.group_mixture." + name);
          }
        }
      }
      read(q, "extreme_bucket_share", pop.extreme_bucket_share);
      read(q, "arrivals_lo", pop.arrivals_lo);
      read(q, "arrivals_hi", pop.arrivals_hi);
      read(q, "arrival_scale", pop.arrival_scale);
      read(q, "decay", pop.decay);
      read(q, "min_first_two_mass", pop.min_first_two_mass);
      if (q.contains("base_rate")) {
        for (const auto& [name, rj] : q.at("base_rate").items()) {
          pop.base_rate[static_cast<std::size_t>(action_from_string(name))] = rj.get<double>();
        }
      }
      read(q, "popularity_sigma", pop.popularity_sigma);
    }

    if (p.contains("trend")) {
      const auto& q = p.at("trend");
      check_keys(q, "synth.trend.", {"start_level", "breakpoints", "slopes"});
      read(q, "start_level", c.trend.start_level);
      read(q, "breakpoints", c.trend.breakpoints);
      read(q, "slopes", c.trend.slopes);
    }
  }

  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const PipelineConfig& c) {
  json sigma;
  for (const Action a : kAllActions) {
    sigma[std::string(to_string(a))] = c.noise.sigma_of(a);
  }
  json base_rate;
  for (const Action a : kAllActions) {
    base_rate[std::string(to_string(a))] = c.population.base_rate[static_cast<std::size_t>(a)];
  }
  json mixtures;
  for (const UserGroup g : kAllGroups) {
    mixtures[std::string(to_string(g))] =
        mixture_to_json(c.population.group_mixture[static_cast<std::size_t>(g)]);
  }
  return json{
      {"mode", c.mode == InputMode::synth ? "synth" : "files"},
      {"seed", c.seed},
      {"paths", {{"domains", c.domains_path.string()}, {"counts", c.counts_path.string()}}},
      {"cutoff", {{"max_age_months", c.cutoff.max_age_months}}},
      {"noise",
       {{"sigma", sigma},
        {"laplace_scale", c.noise.laplace_scale_b},
        {"share_threshold", c.noise.share_threshold}}},
      {"bins", {{"ideology", bins_to_json(c.ideology_bins)}, {"quality", bins_to_json(c.quality_bins)}}},
      {"analysis",
       {{"action", std::string(to_string(c.analysis_action))},
        {"t_low", c.t_low},
        {"snr_gate", c.metric_opts.snr_gate},
        {"worst_case_k", c.metric_opts.worst_case_k},
        {"bootstrap_replicates", c.metric_opts.bootstrap_replicates}}},
      {"changepoint",
       {{"max_breakpoints", c.max_breakpoints},
        {"grid_step", c.fit_opts.grid_step},
        {"min_segment_points", c.fit_opts.min_segment_points},
        {"multistarts", c.fit_opts.multistarts},
        {"region_window_months", c.region_window_months},
        {"region_min_support", c.region_min_support}}},
      {"synth",
       {{"start_month", to_string(Month::from_index(c.start_month))},
        {"horizon_months", c.horizon_months},
        {"population",
         {{"n_domains", c.population.n_domains},
          {"target_ideology_quality_corr", c.population.target_ideology_quality_corr},
          {"high_quality_share", c.population.high_quality_share},
          {"ideology_raw_lo", c.population.ideology_raw_lo},
          {"ideology_raw_hi", c.population.ideology_raw_hi},
          {"group_mixture", mixtures},
          {"extreme_bucket_share", c.population.extreme_bucket_share},
          {"arrivals_lo", c.population.arrivals_lo},
          {"arrivals_hi", c.population.arrivals_hi},
          {"arrival_scale", c.population.arrival_scale},
          {"decay", c.population.decay},
          {"min_first_two_mass", c.population.min_first_two_mass},
          {"base_rate", base_rate},
          {"popularity_sigma", c.population.popularity_sigma}}},
        {"trend",
         {{"start_level", c.trend.start_level},
          {"breakpoints", c.trend.breakpoints},
          {"slopes", c.trend.slopes}}}}},
      {"out_dir", c.out_dir.string()},
      {"emit_counts", c.emit_counts},
  };
}

std::string config_hash(const PipelineConfig& config) {
  const std::uint64_t h = fnv1a(to_json(config).dump());
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate(const PipelineConfig& c) {
  validate(c.cutoff);
  validate(c.noise);
  validate(c.ideology_bins);
  validate(c.quality_bins);
  if (!(c.t_low >= 0.0 && c.t_low <= 1.0)) throw ConfigError("t_low must lie in [0, 1]");
  if (c.metric_opts.snr_gate < 0.0) throw ConfigError("snr_gate must be non-negative");
  if (!(c.metric_opts.worst_case_k > 0.0)) throw ConfigError("worst_case_k must be positive");
  if (c.metric_opts.bootstrap_replicates < 0) {
    throw ConfigError("bootstrap_replicates must be non-negative");
  }
  if (c.max_breakpoints < 0) throw ConfigError("max_breakpoints must be non-negative");
  if (!(c.fit_opts.grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  if (c.fit_opts.min_segment_points < 2) {
    throw ConfigError("min_segment_points must be at least 2");
  }
  if (c.fit_opts.multistarts < 1) throw ConfigError("multistarts must be positive");
  if (!(c.region_window_months >= 0.0)) throw ConfigError("region window must be non-negative");
  if (c.region_min_support < 1) throw ConfigError("region_min_support must be positive");

  if (c.mode == InputMode::files) {
    if (c.domains_path.empty() || c.counts_path.empty()) {
      throw ConfigError("files mode needs paths.domains and paths.counts");
    }
  } else {
    validate(c.population);
    validate(c.trend, c.horizon_months);
    if (c.horizon_months < 2) throw ConfigError("horizon_months must be at least 2");
  }
}

}  // namespace enga
