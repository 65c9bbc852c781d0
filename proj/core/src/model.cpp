#include "enga/model.hpp"

#include <cmath>

#include "enga/errors.hpp"

namespace enga {

namespace {

constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "views", "clicks", "shares", "likes", "comments",
    "angers", "hahas", "wows",   "loves", "sorrys"};

constexpr std::array<std::string_view, kPpaCount> kPpaNames = {"-2", "-1", "0", "1", "2", "nd"};

constexpr std::array<std::string_view, 4> kGroupNames = {"conservative", "liberal", "centrist",
                                                         "undefined"};

}  // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

Action action_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kActionCount; ++i) {
    if (kActionNames[i] == name) return static_cast<Action>(i);
  }
  throw DataError("unknown action '" + std::string(name) + "'");
}

std::string_view to_string(Ppa p) { return kPpaNames[static_cast<std::size_t>(p)]; }

Ppa ppa_from_string(std::string_view token) {
  for (std::size_t i = 0; i < kPpaCount; ++i) {
    if (kPpaNames[i] == token) return static_cast<Ppa>(i);
  }
  throw DataError("ppa bucket '" + std::string(token) + "' not in {-2,-1,0,1,2,nd}");
}

std::string_view to_string(UserGroup g) { return kGroupNames[static_cast<std::size_t>(g)]; }

std::span<const Ppa> buckets_of(UserGroup g) {
  static constexpr std::array<Ppa, 2> kConservative = {Ppa::p1, Ppa::p2};
  static constexpr std::array<Ppa, 2> kLiberal = {Ppa::m2, Ppa::m1};
  static constexpr std::array<Ppa, 1> kCentrist = {Ppa::zero};
  static constexpr std::array<Ppa, 1> kUndefined = {Ppa::nd};
  switch (g) {
    case UserGroup::conservative:
      return kConservative;
    case UserGroup::liberal:
      return kLiberal;
    case UserGroup::centrist:
      return kCentrist;
    case UserGroup::undefined:
    default:
      return kUndefined;
  }
}

UserGroup group_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == name) return static_cast<UserGroup>(i);
  }
  throw DataError("unknown user group '" + std::string(name) + "'");
}

std::string to_string(Month m) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year, m.month);
  return buf;
}

Month month_from_string(std::string_view s) {
  auto fail = [&] { throw DataError("invalid month '" + std::string(s) + "', expected YYYY-MM"); };
  if (s.size() != 7 || s[4] != '-') fail();
  int year = 0;
  int month = 0;
  for (int i = 0; i < 4; ++i) {
    if (s[i] < '0' || s[i] > '9') fail();
    year = year * 10 + (s[i] - '0');
  }
  for (int i = 5; i < 7; ++i) {
    if (s[i] < '0' || s[i] > '9') fail();
    month = month * 10 + (s[i] - '0');
  }
  if (month < 1 || month > 12) fail();
  return Month{year, month};
}

void validate(const BinSpec& spec) {
  if (!(spec.width > 0.0)) throw ConfigError("bin width must be positive");
  if (spec.count < 1) throw ConfigError("bin count must be positive");
  if (!std::isfinite(spec.origin)) throw ConfigError("bin origin must be finite");
}

int bin_of(double score, const BinSpec& spec) {
  validate(spec);
  if (!(score >= spec.origin) || !(score <= spec.upper())) {
    throw std::out_of_range("score " + std::to_string(score) + " outside bin range [" +
                            std::to_string(spec.origin) + ", " + std::to_string(spec.upper()) +
                            "]");
  }
  int k = static_cast<int>(std::floor((score - spec.origin) / spec.width));
  // The top edge belongs to the last bin; floating-point division may also
  // land exactly on `count` for scores a hair under the edge.
  if (k >= spec.count) k = spec.count - 1;
  return k;
}

}  // namespace enga
