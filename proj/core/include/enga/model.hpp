#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace enga {

// The ten engagement actions exposed by the panel. Views and clicks are
// passive consumption; everything else is active engagement.
enum class Action : std::uint8_t {
  views,
  clicks,
  shares,
  likes,
  comments,
  angers,
  hahas,
  wows,
  loves,
  sorrys,
};

inline constexpr std::size_t kActionCount = 10;

inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::views, Action::clicks, Action::shares,  Action::likes, Action::comments,
    Action::angers, Action::hahas, Action::wows,    Action::loves, Action::sorrys,
};

constexpr bool is_passive(Action a) { return a == Action::views || a == Action::clicks; }

std::string_view to_string(Action a);
Action action_from_string(std::string_view name);  // throws DataError

// Political page affinity bucket: five ideology buckets from -2 (most
// liberal) to +2 (most conservative), plus "nd" for users whose affinity
// is not defined. "nd" is distinct from bucket 0.
enum class Ppa : std::uint8_t { m2, m1, zero, p1, p2, nd };

inline constexpr std::size_t kPpaCount = 6;

inline constexpr std::array<Ppa, kPpaCount> kAllPpa = {Ppa::m2,  Ppa::m1, Ppa::zero,
                                                       Ppa::p1, Ppa::p2, Ppa::nd};

std::string_view to_string(Ppa p);             // "-2".."2" or "nd"
Ppa ppa_from_string(std::string_view token);   // throws DataError

// Combined user categories used by the weighted-average metrics.
enum class UserGroup : std::uint8_t { conservative, liberal, centrist, undefined };

inline constexpr std::array<UserGroup, 4> kAllGroups = {
    UserGroup::conservative, UserGroup::liberal, UserGroup::centrist, UserGroup::undefined};

std::string_view to_string(UserGroup g);
UserGroup group_from_string(std::string_view name);

// The buckets that make up a group, in canonical order.
std::span<const Ppa> buckets_of(UserGroup g);

// Buckets +1/+2 merge into conservatives, -1/-2 into liberals, 0 is
// centrist and "nd" forms its own category. Total on all six buckets.
constexpr UserGroup group_of(Ppa p) {
  switch (p) {
    case Ppa::p1:
    case Ppa::p2:
      return UserGroup::conservative;
    case Ppa::m1:
    case Ppa::m2:
      return UserGroup::liberal;
    case Ppa::zero:
      return UserGroup::centrist;
    case Ppa::nd:
    default:
      return UserGroup::undefined;
  }
}

// Calendar month with total order and index arithmetic. `index()` is a
// linear month count (year*12 + month-1), so differences are month
// offsets regardless of any dataset epoch.
struct Month {
  int year = 1970;
  int month = 1;  // 1..12

  constexpr int index() const { return year * 12 + (month - 1); }
  static constexpr Month from_index(int idx) {
    int y = idx / 12;
    int m = idx % 12;
    if (m < 0) {
      m += 12;
      --y;
    }
    return Month{y, m + 1};
  }

  friend constexpr auto operator<=>(const Month& a, const Month& b) {
    return a.index() <=> b.index();
  }
  friend constexpr bool operator==(const Month& a, const Month& b) {
    return a.index() == b.index();
  }
  friend constexpr int operator-(const Month& a, const Month& b) {
    return a.index() - b.index();
  }
  friend constexpr Month operator+(const Month& a, int offset) {
    return from_index(a.index() + offset);
  }
};

std::string to_string(Month m);              // "YYYY-MM"
Month month_from_string(std::string_view);   // throws DataError

// Uniform binning grid over a score axis. Bins are half-open
// [origin + k*w, origin + (k+1)*w) except the last, which is closed so
// the grid exactly partitions [origin, origin + w*count].
struct BinSpec {
  double origin = 0.0;
  double width = 0.1;
  int count = 10;

  constexpr double upper() const { return origin + width * count; }
  constexpr double center(int k) const { return origin + (k + 0.5) * width; }

  friend constexpr bool operator==(const BinSpec&, const BinSpec&) = default;
};

// Bin index of `score`. Throws ConfigError for invalid specs and
// std::out_of_range when the score lies outside the grid.
int bin_of(double score, const BinSpec& spec);

void validate(const BinSpec& spec);  // throws ConfigError

}  // namespace enga
