#include "fixtures.hpp"

#include "summon/errors.hpp"
#include "summon/rng.hpp"
#include "summon/spacetime.hpp"

#include <doctest.h>

#include <cmath>

using namespace summon;
using fixtures::pt;
using fixtures::ptd;

TEST_CASE("causal order on the documented examples") {
  CHECK(causally_precedes(pt("0", {"0"}), pt("1", {"0"})));
  CHECK(causally_precedes(pt("0", {"0"}), pt("0", {"0"})));
  CHECK_FALSE(causally_precedes(pt("0", {"0"}), pt("1", {"2"})));
  // Lightlike: dt = 2 = |dx|.
  CHECK(causally_precedes(pt("1", {"-1"}), pt("3", {"1"})));
  CHECK_FALSE(causally_precedes(pt("3", {"1"}), pt("1", {"-1"})));
}

TEST_CASE("exact lightlike boundaries survive coordinates that do not round well") {
  // (1/3, 0) to (1/3 + 3/10, 3/10): exactly lightlike.
  CHECK(causally_precedes(pt("1/3", {"0"}), pt("19/30", {"3/10"})));
  // One part in 10^30 short of lightlike.
  CHECK_FALSE(causally_precedes(pt("0", {"0"}), pt("1", {"1000000000000000000000000000001/1000000000000000000000000000000"})));
  // 3-4-5 triangle in two spatial dimensions.
  CHECK(causally_precedes(pt("0", {"0", "0"}), pt("5", {"3", "4"})));
  CHECK_FALSE(causally_precedes(pt("0", {"0", "0"}), pt("49999/10000", {"3", "4"})));
  // Irrational norm: |(1,1)| = sqrt 2.
  CHECK(causally_precedes(pt("0", {"0", "0"}), pt("14143/10000", {"1", "1"})));
  CHECK_FALSE(causally_precedes(pt("0", {"0", "0"}), pt("14142/10000", {"1", "1"})));
}

TEST_CASE("floating point comparison honours the tolerance") {
  const auto a = ptd(0.0, {0.0});
  const auto b = ptd(1.0, {1.0 + 1e-12});
  CHECK_FALSE(causally_precedes(a, b));
  CHECK(causally_precedes(a, b, 1e-9));
  CHECK(causal_margin(a, ptd(2.0, {1.0})) == doctest::Approx(1.0));
}

TEST_CASE("dimension mismatch is an error") {
  CHECK_THROWS_AS(causally_precedes(pt("0", {"0"}), pt("1", {"0", "0"})), InvalidArgument);
}

TEST_CASE("coordinate parsing") {
  CHECK(Coordinate::parse("3/2").rational() == Rational(3, 2));
  CHECK(Coordinate::parse("-7/4").rational() == Rational(-7, 4));
  CHECK(Coordinate::parse("1.25").rational() == Rational(5, 4));
  CHECK(Coordinate::parse("4/2").to_string() == "2");
  CHECK(Coordinate::parse("6/4").to_string() == "3/2");
  CHECK_THROWS_AS(Coordinate::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Coordinate::parse("abc"), ParseError);
  CHECK_THROWS_AS(Coordinate::parse(""), ParseError);
  CHECK_FALSE(Coordinate(0.5).is_exact());
  CHECK(Coordinate(2).is_exact());
}

TEST_CASE("past input sets on the canonical geometries") {
  const auto g1 = fixtures::g1();
  CHECK(past_input_set(g1, 0).members == std::vector<std::size_t>{0, 1});
  CHECK(past_input_set(g1, 1).members == std::vector<std::size_t>{0, 1});
  CHECK(common_past_input_set(g1, 0, 1).members == std::vector<std::size_t>{0, 1});

  const auto g0 = fixtures::g0_constrained();
  CHECK(past_input_set(g0, 0).members == std::vector<std::size_t>{0});
  CHECK(past_input_set(g0, 1).members == std::vector<std::size_t>{1});
  CHECK(common_past_input_set(g0, 0, 1).empty());

  const auto none = fixtures::trivial(pt("1", {"0"}));
  CHECK(past_input_set(none, 0).empty());

  CHECK_THROWS_AS(common_past_input_set(g1, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(past_input_set(g1, 2), InvalidArgument);
}

namespace {

SpacetimePoint random_exact_point(Rng& rng, std::size_t dim) {
  // Quarter-integer grid keeps many lightlike and equal pairs in play.
  SpacetimePoint p;
  p.t = Coordinate(Rational(rng.uniform_int(-12, 12), 4));
  for (std::size_t k = 0; k < dim; ++k) p.x.push_back(Coordinate(Rational(rng.uniform_int(-8, 8), 4)));
  return p;
}

}  // namespace

TEST_CASE("property: partial order laws on exact random points") {
  Rng rng(11);
  for (std::size_t dim = 1; dim <= 3; ++dim) {
    for (int trial = 0; trial < 2000; ++trial) {
      const auto a = random_exact_point(rng, dim);
      const auto b = random_exact_point(rng, dim);
      const auto c = random_exact_point(rng, dim);
      REQUIRE(causally_precedes(a, a));
      if (causally_precedes(a, b) && causally_precedes(b, a)) REQUIRE(a == b);
      if (causally_precedes(a, b) && causally_precedes(b, c)) REQUIRE(causally_precedes(a, c));
    }
  }
}

TEST_CASE("property: boost invariance away from the light cone") {
  Rng rng(12);
  int checked = 0;
  while (checked < 1000) {
    const auto a = ptd(rng.uniform() * 10 - 5, {rng.uniform() * 10 - 5});
    const auto b = ptd(rng.uniform() * 10 - 5, {rng.uniform() * 10 - 5});
    if (std::abs(causal_margin(a, b)) < 1e-6) continue;
    const double v = rng.uniform() * 1.8 - 0.9;
    const auto ba = summon::boost(a, v);
    const auto bb = summon::boost(b, v);
    const bool before = causally_precedes(a, b);
    const bool after = causally_precedes(ba, bb, 1e-9);
    const bool after_strict = causally_precedes(ba, bb, -1e-9);
    // Either tolerance direction must give the same answer as before.
    REQUIRE(before == after);
    REQUIRE(before == after_strict);
    ++checked;
  }
}

TEST_CASE("property: past sets are monotone along the causal order") {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    SummoningTask task;
    task.start = pt("0", {"0"});
    for (int k = 0; k < 4; ++k) task.inputs.push_back({random_exact_point(rng, 1), 2});
    const auto q = random_exact_point(rng, 1);
    const auto later = random_exact_point(rng, 1);
    if (!causally_precedes(q, later)) continue;
    task.returns = {q, later};
    const auto sq = past_input_set(task, 0);
    const auto sl = past_input_set(task, 1);
    for (std::size_t k : sq.members) REQUIRE(sl.contains(k));
    const auto common = common_past_input_set(task, 0, 1);
    REQUIRE(common.members == sq.members);
  }
}
