#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "racelab/gadgets.hpp"
#include "racelab/hb.hpp"
#include "racelab/lockstamp.hpp"
#include "racelab/trace_index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace racelab;

namespace {

std::vector<std::uint32_t> vec(std::span<const std::uint32_t> s) { return {s.begin(), s.end()}; }

Trace random_trace(std::uint64_t seed, std::size_t n = 80) {
  return gen_random_trace({n, 2 + seed % 5, seed % 4, 1 + seed % 3, 0.35, seed});
}

}  // namespace

TEST_CASE("lockstamp lattice") {
  Lockstamp a({1, 5, 0});
  Lockstamp b({2, 3, 0});
  Lockstamp j = a;
  j.join(b.values());
  CHECK(j == Lockstamp({2, 5, 0}));
  Lockstamp m = a;
  m.meet(b.values());
  CHECK(m == Lockstamp({1, 3, 0}));
  CHECK(stamp_leq(m.values(), a.values()));
  CHECK_FALSE(stamp_leq(a.values(), b.values()));
  CHECK(stamp_leq(Lockstamp::bottom(3).values(), Lockstamp::top(3).values()));
  CHECK(Lockstamp::top(2)[1] == kInfinity);
}

TEST_CASE("stamps on sigma_a") {
  Trace t = fixtures::sigma_a();
  auto acq = acquire_lockstamps(t);
  auto rel = release_lockstamps(t);
  REQUIRE(acq.size() == 6);
  REQUIRE(acq.width() == 1);
  CHECK(acq.at(3)[0] == 0);
  CHECK(acq.at(4)[0] == 2);
  CHECK(rel.at(1)[0] == 1);
  CHECK(rel.at(3)[0] == 2);
  CHECK(hb_unordered(acq.row(3), rel.row(1)));
}

TEST_CASE("stamps with no locks") {
  Trace t = parse_trace("t1|w(x)\nt2|w(x)\n");
  auto acq = acquire_lockstamps(t);
  CHECK(acq.size() == 2);
  CHECK(acq.width() == 0);
  CHECK(hb_unordered(acq.row(1), release_lockstamps(t).row(0)));
  CHECK(detect_hb_race_lockstamp(t));
}

TEST_CASE("stamps match their definitions") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Trace t = random_trace(seed, 50);
    oracle::HbClosure hb(t);
    auto acq = acquire_lockstamps(t);
    auto rel = release_lockstamps(t);
    for (EventId e = 0; e < t.size(); ++e) {
      CHECK(vec(acq.row(e)) == oracle::acqls(t, hb, e));
      CHECK(vec(rel.row(e)) == oracle::rells(t, hb, e));
    }
  }
}

TEST_CASE("stamp comparison decides happens-before across threads") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Trace t = random_trace(seed);
    oracle::HbClosure hb(t);
    auto acq = acquire_lockstamps(t);
    auto rel = release_lockstamps(t);
    for (EventId j = 0; j < t.size(); ++j)
      for (EventId i = 0; i < j; ++i)
        if (t[i].thread != t[j].thread) CHECK(hb(i, j) == !hb_unordered(acq.row(j), rel.row(i)));
  }
}

TEST_CASE("two-thread examples") {
  auto a = detect_hb_race_lockstamp(fixtures::sigma_a());
  REQUIRE(a);
  CHECK(a->first == 1);
  CHECK(a->second == 3);
  CHECK(a->kind == RaceKind::HappensBefore);
  for (auto t : {fixtures::sigma_b(), fixtures::sigma_c(), fixtures::sigma_d()}) {
    CHECK_FALSE(detect_hb_race_lockstamp(t));
    CHECK_FALSE(detect_hb_race_djit(t));
    CHECK_FALSE(detect_hb_race_graph(t));
    CHECK_FALSE(detect_hb_race_auto(t));
  }
  CHECK(hb_racy_events_djit(fixtures::sigma_a()) == std::vector<EventId>{3});
}

TEST_CASE("every detector agrees with the closure") {
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    Trace t = random_trace(seed, 30 + seed % 70);
    bool expect = oracle::hb_race(t);
    auto acq = acquire_lockstamps(t);
    auto rel = release_lockstamps(t);
    auto table = detect_hb_race_lockstamp(t, acq, rel);
    auto streaming = detect_hb_race_lockstamp(t);
    auto djit = detect_hb_race_djit(t);
    auto graph = detect_hb_race_graph(t);
    auto autod = detect_hb_race_auto(t);
    CHECK(table.has_value() == expect);
    CHECK(djit.has_value() == expect);
    CHECK(graph.has_value() == expect);
    CHECK(autod.has_value() == expect);
    CHECK(streaming == table);
    oracle::HbClosure hb(t);
    for (const auto& r : {table, djit, graph}) {
      if (!r) continue;
      CHECK(r->first < r->second);
      CHECK(oracle::conflicting(t, r->first, r->second));
      CHECK_FALSE(hb(r->first, r->second));
    }
  }
}

TEST_CASE("report-all matches the closure") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Trace t = random_trace(seed, 60);
    CHECK(hb_racy_events_djit(t) == oracle::hb_racy_events(t));
    CHECK(hb_racy_events_djit(t, {true}) == oracle::hb_racy_events(t, true));
  }
}

TEST_CASE("read filter skips write-write races") {
  Trace t = parse_trace("t1|w(x)\nt2|w(x)\n");
  CHECK(detect_hb_race_djit(t));
  CHECK_FALSE(detect_hb_race_djit(t, {true}));
  Trace u = parse_trace("t1|w(x)\nt2|w(x)\nt2|r(x)\nt1|r(x)\n");
  auto r = detect_hb_race_djit(u, {true});
  REQUIRE(r);
  CHECK(r->first == 0);
  CHECK(r->second == 2);
}

TEST_CASE("auto picks lockstamps only with fewer locks than threads") {
  CHECK(prefers_lockstamps(fixtures::sigma_a()));  // 1 lock, 2 threads
  CHECK_FALSE(prefers_lockstamps(fixtures::sigma_d()));
  auto r = detect_hb_race_auto(fixtures::sigma_a());
  REQUIRE(r);
  CHECK(r->algo == "hb-auto");
}

TEST_CASE("consecutive pairs on sigma_c") {
  Trace t = fixtures::sigma_c();
  TraceIndex idx(t);
  auto pairs = consecutive_conflicting_pairs(t, idx);
  CHECK(pairs == std::vector<std::pair<EventId, EventId>>{{1, 4}, {1, 6}});
}

TEST_CASE("consecutive pairs match brute force and stay linear") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Trace t = random_trace(seed, 100);
    TraceIndex idx(t);
    auto got = consecutive_conflicting_pairs(t, idx);
    CHECK(got == oracle::consecutive_pairs(t));
    CHECK(got.size() <= 2 * t.size());
  }
}

TEST_CASE("graph reachability equals the closure") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Trace t = random_trace(seed, 60);
    oracle::HbClosure hb(t);
    HbGraph g(t);
    std::vector<std::pair<EventId, EventId>> queries;
    for (EventId j = 0; j < t.size(); ++j)
      for (EventId i = 0; i <= j; ++i) {
        CHECK(g.reachable(i, j) == hb(i, j));
        queries.push_back({i, j});
      }
    auto answers = solve_mconn(g, queries);
    REQUIRE(answers.size() == queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q)
      CHECK(answers[q] == hb(queries[q].first, queries[q].second));
  }
}
