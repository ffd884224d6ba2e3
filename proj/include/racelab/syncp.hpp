#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "racelab/instance.hpp"
#include "racelab/race_report.hpp"
#include "racelab/trace_index.hpp"

namespace racelab {

// A sequence of event ids drawn from a base trace.
struct Reordering {
  std::vector<EventId> events;
  bool operator==(const Reordering&) const = default;
};

struct ReorderingCheck {
  bool ok = true;
  std::string reason;  // first violated condition
  EventId at = kNoEvent;

  explicit operator bool() const { return ok; }
};

// Well-formed, per-thread prefix of the trace, every read sees its original
// last write (or none).
ReorderingCheck check_correct_reordering(const Trace& trace, const TraceIndex& index,
                                         const Reordering& rho);
// Acquires of each lock keep their original relative order.
ReorderingCheck check_sync_preserving(const Trace& trace, const TraceIndex& index,
                                      const Reordering& rho);
// Both events excluded, all their thread predecessors included, and
// appending either would keep the trace well-formed.
ReorderingCheck check_enabled(const Trace& trace, const TraceIndex& index, const Reordering& rho,
                              EventId e1, EventId e2);
// All of the above plus e1, e2 conflicting.
ReorderingCheck check_race_witness(const Trace& trace, const TraceIndex& index,
                                   const Reordering& rho, EventId e1, EventId e2);

bool is_correct_reordering(const Trace& trace, const Reordering& rho);
bool is_sync_preserving(const Trace& trace, const Reordering& rho);

struct SyncpOutcome {
  enum class Status { NoRace, Race, BudgetExceeded };
  Status status = Status::NoRace;
  std::optional<RaceReport> race;
  Reordering witness;      // set when status is Race
  std::uint64_t nodes = 0;  // search states expanded
};

// Exhaustive search over per-thread cut vectors, one conflicting pair at a
// time in order of (e2, e1). Budget caps the total number of states.
SyncpOutcome detect_syncp_race_oracle(const Trace& trace, std::uint64_t budget);

struct RaceWitness {
  Reordering reordering;
  EventId e1 = kNoEvent;
  EventId e2 = kNoEvent;
};

// Witness JSON: {"events": [...], "e1": id, "e2": id}
std::string witness_to_json(const RaceWitness& w);
RaceWitness witness_from_json(std::string_view text);

// For a trace built by gen_ov3_to_syncp(inst) and an orthogonal triple,
// a sync-preserving reordering exposing the race between w(z) of the x
// thread and r(z) of the y thread. Throws std::invalid_argument otherwise.
RaceWitness construct_ov3_witness(const Trace& trace, const OvInstance& inst,
                                  std::array<std::size_t, 3> triple);

}  // namespace racelab
