#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "enga/model.hpp"

namespace enga {

// One news domain with its audience-based ideology score (raw scale as
// imported, plus the min-max normalized value in [0,1]) and its composite
// quality score in [0,1].
struct DomainInfo {
  std::string domain_id;
  double ideology_raw = 0.0;
  double ideology_norm = 0.0;
  double quality = 0.0;
};

// Affine constants of the min-max normalization, kept so downstream
// values can be mapped back to the raw scale.
struct IdeologyNormalization {
  double raw_min = 0.0;
  double raw_max = 1.0;

  double to_norm(double raw) const { return (raw - raw_min) / (raw_max - raw_min); }
  double to_raw(double norm) const { return raw_min + norm * (raw_max - raw_min); }
};

// Rescales ideology_raw onto [0,1] in place: the table minimum maps to 0,
// the maximum to 1, everything else linearly. Idempotent on tables whose
// raw scores already span [0,1]. Throws ConfigError when fewer than two
// rows are present or all raw scores are equal (the affine map would be
// degenerate).
IdeologyNormalization normalize_ideology(std::vector<DomainInfo>& table);

// Immutable, indexable domain table. Safe to share across threads.
class DomainTable {
 public:
  DomainTable() = default;
  // Normalizes ideology scores on construction.
  explicit DomainTable(std::vector<DomainInfo> rows);

  const std::vector<DomainInfo>& rows() const { return rows_; }
  const DomainInfo& at(std::size_t idx) const { return rows_[idx]; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> index_of(const std::string& domain_id) const;
  const IdeologyNormalization& normalization() const { return norm_; }

 private:
  std::vector<DomainInfo> rows_;
  std::unordered_map<std::string, std::size_t> by_id_;
  IdeologyNormalization norm_;
};

// CSV with header `domain_id,ideology_raw,quality`. Quality must lie in
// [0,1]; duplicate domain ids are rejected.
DomainTable load_domains(const std::filesystem::path& path);
void save_domains(const DomainTable& table, const std::filesystem::path& path);

}  // namespace enga
