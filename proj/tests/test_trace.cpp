#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "racelab/gadgets.hpp"
#include "racelab/trace.hpp"
#include "racelab/trace_index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace racelab;

TEST_CASE("round trip is byte exact") {
  for (const auto& text : {fixtures::kSigmaA, fixtures::kSigmaB, fixtures::kSigmaC, fixtures::kSigmaD})
    CHECK(write_trace(parse_trace(text)) == text);
}

TEST_CASE("comments and blank lines are skipped") {
  Trace t = parse_trace("# header\n\nt1|w(x)\n#t1|r(x)\n\nt2|r(x)");
  REQUIRE(t.size() == 2);
  CHECK(t.describe(0) == "t1|w(x)");
  CHECK(t.describe(1) == "t2|r(x)");
  CHECK(parse_trace("").empty());
}

TEST_CASE("identifiers are interned in first-occurrence order") {
  Trace t = parse_trace("b|acq(m)\na|w(y)\nb|rel(m)\na|acq(k)\nc|r(x.1)\nb|w(y)\n");
  CHECK(t.threads().names() == std::vector<std::string>{"b", "a", "c"});
  CHECK(t.locks().names() == std::vector<std::string>{"m", "k"});
  CHECK(t.vars().names() == std::vector<std::string>{"y", "x.1"});
  CHECK(t[4].operand == 1);
}

TEST_CASE("parse errors carry the line number") {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_trace(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("t1|acq(l)\nt1|acq(l\n") == 2);
  CHECK(line_of("t1 |w(x)\n") == 1);
  CHECK(line_of("t1|w( x)\n") == 1);
  CHECK(line_of("t1|lock(l)\n") == 1);
  CHECK(line_of("1t|w(x)\n") == 1);
  CHECK(line_of("# c\n\nt1w(x)\n") == 3);
  CHECK(line_of("t1|w()\n") == 1);
  CHECK(line_of("t1|w(x)y\n") == 1);
  CHECK(line_of("t1|w(x)\r\n") == 1);
}

TEST_CASE("identifier grammar") {
  CHECK(is_identifier("_a-b.c9"));
  CHECK(is_identifier("Z"));
  CHECK_FALSE(is_identifier(""));
  CHECK_FALSE(is_identifier("9a"));
  CHECK_FALSE(is_identifier("-a"));
  CHECK_FALSE(is_identifier("a b"));
}

namespace {

std::optional<WellFormednessIssue> issue_of(const std::string& text) {
  try {
    parse_trace(text);
  } catch (const WellFormednessError& e) {
    return e.issue();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("well-formedness errors name the event and category") {
  auto overlap = issue_of("t1|acq(l)\nt2|acq(l)\n");
  REQUIRE(overlap);
  CHECK(overlap->event == 1);
  CHECK(overlap->kind == WellFormednessKind::Overlap);
  CHECK(overlap->message().find("overlap") != std::string::npos);

  auto reentrant = issue_of("t1|w(x)\nt1|acq(l)\nt1|acq(l)\n");
  REQUIRE(reentrant);
  CHECK(reentrant->event == 2);
  CHECK(reentrant->kind == WellFormednessKind::Reentrant);

  auto stray = issue_of("t1|rel(l)\n");
  REQUIRE(stray);
  CHECK(stray->kind == WellFormednessKind::UnmatchedRelease);

  auto foreign = issue_of("t1|acq(l)\nt2|rel(l)\n");
  REQUIRE(foreign);
  CHECK(foreign->event == 1);
  CHECK(foreign->kind == WellFormednessKind::UnmatchedRelease);

  CHECK_FALSE(issue_of("t1|acq(l)\nt1|w(x)\n"));  // open at the end is fine
  CHECK_FALSE(issue_of("t1|acq(a)\nt1|acq(b)\nt1|rel(a)\nt1|rel(b)\n"));
}

TEST_CASE("validate on raw events") {
  std::vector<Event> ev = {{0, 0, Op::Acquire, 0}, {1, 0, Op::Release, 0}, {2, 1, Op::Release, 0}};
  auto issue = validate(ev);
  REQUIRE(issue);
  CHECK(*issue == WellFormednessIssue{2, WellFormednessKind::UnmatchedRelease});
  CHECK_FALSE(validate(std::span<const Event>(ev.data(), 2)));
}

TEST_CASE("trace constructor rejects inconsistent ids") {
  SymbolTable threads, locks, vars;
  threads.intern("t");
  vars.intern("x");
  CHECK_THROWS_AS(Trace({{1, 0, Op::Read, 0}}, threads, locks, vars), std::invalid_argument);
  CHECK_THROWS_AS(Trace({{0, 0, Op::Acquire, 0}}, threads, locks, vars), std::invalid_argument);
  CHECK_NOTHROW(Trace({{0, 0, Op::Read, 0}}, threads, locks, vars));
}

TEST_CASE("index on sigma_c") {
  Trace t = fixtures::sigma_c();
  TraceIndex idx(t);
  LockId l = *t.locks().find("l");
  CHECK(std::vector<LockId>(idx.held_at(1).begin(), idx.held_at(1).end()) == std::vector<LockId>{l});
  CHECK(idx.held_at(6).empty());
  CHECK(idx.holds(0, l));
  CHECK(idx.holds(2, l));
  CHECK(idx.match(0) == 2);
  CHECK(idx.match(2) == 0);
  CHECK(idx.match(1) == kNoEvent);
  CHECK(idx.pos(0) == 1);
  CHECK(idx.pos(3) == 2);
  CHECK(idx.pos(5) == 2);
  CHECK(idx.last_write(4) == 1);
  CHECK(idx.last_write(1) == kNoEvent);
  CHECK(idx.thread_position(6) == 3);
  CHECK(idx.release_count(l) == 2);
  CHECK(idx.acquires_of(l).size() == 2);
}

TEST_CASE("open acquire holds to the end of the trace") {
  Trace t = parse_trace("t1|acq(l)\nt1|w(x)\nt2|r(x)\nt1|r(x)\n");
  TraceIndex idx(t);
  CHECK(idx.match(0) == kNoEvent);
  CHECK(idx.holds(3, 0));
  CHECK_FALSE(idx.holds(2, 0));
}

TEST_CASE("conflicting") {
  Trace t = fixtures::sigma_c();
  CHECK(conflicting(t, 1, 4));
  CHECK(conflicting(t, 4, 1));
  CHECK(conflicting(t, 1, 6));
  CHECK_FALSE(conflicting(t, 4, 6));  // same thread
  CHECK_FALSE(conflicting(t, 0, 4));
  Trace r = parse_trace("t1|r(x)\nt2|r(x)\nt2|w(y)\n");
  CHECK_FALSE(conflicting(r, 0, 1));
  CHECK_FALSE(conflicting(r, 0, 2));
}

TEST_CASE("index agrees with a replay on random traces") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Trace t = gen_random_trace({120, 1 + seed % 6, seed % 5, 1 + seed % 4, 0.4, seed});
    TraceIndex idx(t);
    auto held = oracle::held_sets(t);
    auto pos = oracle::pos_of(t);
    for (const Event& e : t.events()) {
      std::set<LockId> got(idx.held_at(e.id).begin(), idx.held_at(e.id).end());
      CHECK(got == held[e.id]);
      CHECK(idx.pos(e.id) == pos[e.id]);
    }
  }
}

TEST_CASE("random generator output always validates") {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RandomTraceParams p{1 + seed % 60, 1 + seed % 7, seed % 4, 1 + seed % 3, 0.1 + 0.1 * (seed % 8), seed};
    Trace t = gen_random_trace(p);
    CHECK(t.size() == p.events);
    CHECK_FALSE(validate(t.events()));
  }
}
