#include "fixtures.hpp"

#include "summon/errors.hpp"
#include "summon/message_store.hpp"

#include <doctest.h>

using namespace summon;
using fixtures::pt;

TEST_CASE("reads succeed only inside the future light cone") {
  MessageStore store;
  store.broadcast("m", pt("1", {"-1"}), 7);
  CHECK(store.has("m"));
  CHECK(store.available("m", pt("3", {"1"})));
  CHECK_FALSE(store.available("m", pt("3/2", {"1"})));
  CHECK(store.read("m", pt("3", {"1"})) == 7);
  CHECK(store.audit_passed());
  CHECK_THROWS_AS(store.read("m", pt("3/2", {"1"})), CausalityViolation);
  CHECK_FALSE(store.audit_passed());
  REQUIRE(store.audit().size() == 2);
  CHECK(store.audit()[0].causal);
  CHECK_FALSE(store.audit()[1].causal);
}

TEST_CASE("unknown and duplicate keys are protocol errors") {
  MessageStore store;
  CHECK_THROWS_AS(store.read("nope", pt("0", {"0"})), ProtocolError);
  store.broadcast("k", pt("0", {"0"}), 1);
  CHECK_THROWS_AS(store.broadcast("k", pt("0", {"0"}), 2), ProtocolError);
}

TEST_CASE("quantum transport is checked and audited") {
  MessageStore store;
  CHECK_NOTHROW(store.check_transport("share", pt("1", {"0"}), pt("2", {"1"})));
  CHECK_THROWS_AS(store.check_transport("share", pt("1", {"0"}), pt("2", {"2"})), CausalityViolation);
  CHECK(store.audit().size() == 2);
}

TEST_CASE("broadcasts are traced with stable field order") {
  Trace trace;
  MessageStore store(0.0, &trace);
  store.broadcast(input_key(0), pt("1", {"-1"}), 1);
  store.broadcast(input_key(1), pt("1", {"1"}), 0);
  CHECK(input_key(0) == "input/1");
  CHECK(trace.count("broadcast") == 2);
  const std::string lines = trace.to_jsonl();
  CHECK(lines.find("{\"seq\":0,\"point\":") == 0);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
  const auto first = Json::parse(lines.substr(0, lines.find('\n')));
  std::vector<std::string> keys;
  for (auto it = first.begin(); it != first.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"seq", "point", "kind", "data"});
  CHECK(first["kind"] == "broadcast");
}

TEST_CASE("floating point tolerance applies to inexact points") {
  MessageStore loose(1e-9);
  loose.broadcast("x", fixtures::ptd(0.0, {0.0}), 1);
  CHECK_NOTHROW(loose.read("x", fixtures::ptd(1.0, {1.0 + 1e-12})));
  MessageStore strict;
  strict.broadcast("x", fixtures::ptd(0.0, {0.0}), 1);
  CHECK_THROWS_AS(strict.read("x", fixtures::ptd(1.0, {1.0 + 1e-12})), CausalityViolation);
}
