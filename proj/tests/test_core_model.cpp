#include <doctest.h>

#include <cmath>

#include "enga/domain.hpp"
#include "enga/errors.hpp"
#include "enga/model.hpp"
#include "enga/rng.hpp"

using namespace enga;

TEST_CASE("ppa to group mapping covers all six buckets") {
  CHECK(group_of(Ppa::p2) == UserGroup::conservative);
  CHECK(group_of(Ppa::p1) == UserGroup::conservative);
  CHECK(group_of(Ppa::m1) == UserGroup::liberal);
  CHECK(group_of(Ppa::m2) == UserGroup::liberal);
  CHECK(group_of(Ppa::zero) == UserGroup::centrist);
  CHECK(group_of(Ppa::nd) == UserGroup::undefined);

  // Surjective: every group is hit.
  bool hit[4] = {};
  for (const Ppa p : kAllPpa) hit[static_cast<std::size_t>(group_of(p))] = true;
  for (const bool h : hit) CHECK(h);
}

TEST_CASE("buckets_of inverts the group mapping") {
  for (const UserGroup g : kAllGroups) {
    for (const Ppa p : buckets_of(g)) CHECK(group_of(p) == g);
  }
}

TEST_CASE("action and ppa names round-trip") {
  for (const Action a : kAllActions) CHECK(action_from_string(to_string(a)) == a);
  for (const Ppa p : kAllPpa) CHECK(ppa_from_string(to_string(p)) == p);
  CHECK(is_passive(Action::views));
  CHECK(is_passive(Action::clicks));
  CHECK_FALSE(is_passive(Action::shares));
  CHECK_FALSE(is_passive(Action::angers));
  CHECK_THROWS_AS(action_from_string("Views"), DataError);
  CHECK_THROWS_AS(ppa_from_string("3"), DataError);
}

TEST_CASE("months order, index arithmetic and parsing") {
  const Month jan{2017, 1};
  const Month dec{2020, 12};
  CHECK(dec - jan == 47);
  CHECK(jan + 47 == dec);
  CHECK(jan < dec);
  CHECK(Month::from_index(jan.index()) == jan);
  CHECK(to_string(Month{2018, 3}) == "2018-03");
  CHECK(month_from_string("2018-03") == Month{2018, 3});
  CHECK_THROWS_AS(month_from_string("2018-13"), DataError);
  CHECK_THROWS_AS(month_from_string("2018/03"), DataError);
  CHECK_THROWS_AS(month_from_string("201-803"), DataError);
}

TEST_CASE("ideology normalization endpoints and midpoint") {
  std::vector<DomainInfo> table = {
      {"a", 2.0, 0.0, 0.5}, {"b", 4.0, 0.0, 0.5}, {"c", 6.0, 0.0, 0.5}};
  const auto norm = normalize_ideology(table);
  CHECK(table[0].ideology_norm == 0.0);
  CHECK(table[1].ideology_norm == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(table[2].ideology_norm == 1.0);
  CHECK(norm.raw_min == 2.0);
  CHECK(norm.raw_max == 6.0);
  CHECK(norm.to_raw(norm.to_norm(3.3)) == doctest::Approx(3.3).epsilon(1e-15));
}

TEST_CASE("ideology normalization is idempotent on a normalized table") {
  std::vector<DomainInfo> table = {
      {"a", 0.0, 0.0, 0.5}, {"b", 0.31, 0.0, 0.5}, {"c", 0.72, 0.0, 0.5}, {"d", 1.0, 0.0, 0.5}};
  normalize_ideology(table);
  auto again = table;
  for (auto& d : again) d.ideology_raw = d.ideology_norm;
  normalize_ideology(again);
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(std::abs(again[i].ideology_norm - table[i].ideology_norm) <= 1e-12);
  }
}

TEST_CASE("ideology normalization rejects degenerate tables") {
  std::vector<DomainInfo> one = {{"a", 1.0, 0.0, 0.5}};
  CHECK_THROWS_AS(normalize_ideology(one), ConfigError);
  std::vector<DomainInfo> flat = {{"a", 3.0, 0.0, 0.5}, {"b", 3.0, 0.0, 0.5}};
  CHECK_THROWS_WITH_AS(normalize_ideology(flat), doctest::Contains("degenerate"), ConfigError);
}

TEST_CASE("bin_of maps edges and interior points") {
  const BinSpec spec{0.0, 0.094, 11};
  CHECK(bin_of(0.0, spec) == 0);                  // left edge
  CHECK(bin_of(0.094 * 1.5, spec) == 1);          // interior
  CHECK(bin_of(spec.upper(), spec) == 10);        // top edge closed
  CHECK_THROWS_AS(bin_of(-0.01, spec), std::out_of_range);
  CHECK_THROWS_AS(bin_of(spec.upper() + 0.01, spec), std::out_of_range);
  CHECK_THROWS_AS(validate(BinSpec{0.0, -1.0, 4}), ConfigError);
  CHECK_THROWS_AS(validate(BinSpec{0.0, 0.1, 0}), ConfigError);
}

TEST_CASE("quality grid has a bin centered at 0.58") {
  const BinSpec quality{-0.045, 0.05, 21};
  CHECK(quality.origin <= 0.0);
  CHECK(quality.upper() >= 1.0);
  const int k = bin_of(0.58, quality);
  CHECK(quality.center(k) == doctest::Approx(0.58).epsilon(1e-12));
}

TEST_CASE("every in-range score lands in exactly one reproducible bin") {
  const BinSpec spec{-0.045, 0.05, 21};
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double score = rng.uniform(spec.origin, spec.upper());
    const int k = bin_of(score, spec);
    REQUIRE(k >= 0);
    REQUIRE(k < spec.count);
    // Half-open membership, last bin closed.
    CHECK(score >= spec.origin + k * spec.width);
    if (k < spec.count - 1) CHECK(score < spec.origin + (k + 1) * spec.width);
    // Bit-exact reproducibility with an identical grid.
    const BinSpec same{-0.045, 0.05, 21};
    CHECK(bin_of(score, same) == k);
  }
}

TEST_CASE("domain table indexes ids and rejects duplicates") {
  DomainTable table({{"a", -1.0, 0.0, 0.2}, {"b", 1.0, 0.0, 0.9}});
  CHECK(table.index_of("a") == 0);
  CHECK(table.index_of("missing") == std::nullopt);
  CHECK(table.at(0).ideology_norm == 0.0);
  CHECK(table.at(1).ideology_norm == 1.0);
  CHECK_THROWS_AS(DomainTable({{"x", 0.0, 0.0, 0.2}, {"x", 1.0, 0.0, 0.3}}), DataError);
}
