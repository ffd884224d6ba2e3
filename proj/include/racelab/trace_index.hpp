#pragma once

#include "racelab/trace.hpp"

namespace racelab {

// Per-event facts derived in one forward pass.
class TraceIndex {
 public:
  explicit TraceIndex(const Trace& trace);

  // Matching release of an acquire (or acquire of a release); kNoEvent for
  // an open acquire and for accesses.
  EventId match(EventId e) const { return match_[e]; }

  // Locks whose critical section contains e, ascending. An acquire and its
  // release both hold their own lock.
  std::span<const LockId> held_at(EventId e) const {
    return {held_.data() + held_offset_[e], held_.data() + held_offset_[e + 1]};
  }
  bool holds(EventId e, LockId l) const;

  // 1-based rank among the acquires (or releases) of the same lock.
  std::uint32_t pos(EventId e) const { return pos_[e]; }

  // Latest earlier write to the same variable, for reads and writes.
  EventId last_write(EventId e) const { return last_write_[e]; }

  // 0-based index of e within its thread.
  std::uint32_t thread_position(EventId e) const { return thread_pos_[e]; }
  std::span<const EventId> thread_events(ThreadId t) const { return thread_events_[t]; }

  std::span<const EventId> acquires_of(LockId l) const { return acquires_[l]; }
  std::uint32_t release_count(LockId l) const { return release_count_[l]; }

 private:
  std::vector<EventId> match_;
  std::vector<std::uint32_t> held_offset_;
  std::vector<LockId> held_;
  std::vector<std::uint32_t> pos_;
  std::vector<EventId> last_write_;
  std::vector<std::uint32_t> thread_pos_;
  std::vector<std::vector<EventId>> thread_events_;
  std::vector<std::vector<EventId>> acquires_;
  std::vector<std::uint32_t> release_count_;
};

inline TraceIndex build_index(const Trace& trace) { return TraceIndex(trace); }

// Accesses to the same variable from different threads, at least one a write.
bool conflicting(const Trace& trace, EventId a, EventId b);

}  // namespace racelab
