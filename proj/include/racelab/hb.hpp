#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "racelab/lockstamp.hpp"
#include "racelab/race_report.hpp"
#include "racelab/trace_index.hpp"

namespace racelab {

// Lockstamp race check over precomputed tables. Stops at the first race.
std::optional<RaceReport> detect_hb_race_lockstamp(const Trace& trace, const LockstampTable& acq,
                                                   const LockstampTable& rel);
// Same verdict and witness, but acquire stamps are computed on the fly and
// release stamps are kept only for accesses.
std::optional<RaceReport> detect_hb_race_lockstamp(const Trace& trace);

struct DjitOptions {
  // Ignore write-write races.
  bool involving_read_only = false;
};

// Vector-clock detector.
std::optional<RaceReport> detect_hb_race_djit(const Trace& trace, DjitOptions options = {});
// Every access that races with some earlier access, ascending.
std::vector<EventId> hb_racy_events_djit(const Trace& trace, DjitOptions options = {});

// Lockstamps when there are fewer locks than threads, vector clocks otherwise.
bool prefers_lockstamps(const Trace& trace);
std::optional<RaceReport> detect_hb_race_auto(const Trace& trace);

// Thread-order edges plus release -> next acquire of the same lock.
class HbGraph {
 public:
  explicit HbGraph(const Trace& trace);

  std::size_t size() const { return thread_next_.size(); }
  // At most two successors; kNoEvent marks an absent one.
  std::array<EventId, 2> successors(EventId e) const { return {thread_next_[e], lock_next_[e]}; }

  // Edges only point forward in the trace, so the search never looks past `to`.
  bool reachable(EventId from, EventId to) const;

 private:
  std::vector<EventId> thread_next_;
  std::vector<EventId> lock_next_;
  mutable std::vector<std::uint32_t> seen_;
  mutable std::uint32_t epoch_ = 0;
  mutable std::vector<EventId> stack_;
};

// One answer per query pair.
std::vector<bool> solve_mconn(const HbGraph& graph,
                              std::span<const std::pair<EventId, EventId>> queries);

// Conflicting pairs with no write to the variable strictly between them,
// sorted by (first, second). There are at most 2N of them.
std::vector<std::pair<EventId, EventId>> consecutive_conflicting_pairs(const Trace& trace,
                                                                       const TraceIndex& index);

std::optional<RaceReport> detect_hb_race_graph(const Trace& trace);

}  // namespace racelab
