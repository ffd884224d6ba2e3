#include "racelab/hb.hpp"

#include <algorithm>

namespace racelab {

namespace {

constexpr ThreadId kNoThread = UINT32_MAX;

struct StampRef {
  std::uint32_t slot;
  EventId event;
};

// Shared lockstamp check. acq_of(e) yields the acquire stamp of the current
// event; rel_slot(e) a slot whose stamp release_of(slot) stays valid.
template <class AcqOf, class RelSlot, class RelOf>
std::optional<RaceReport> lockstamp_check(const Trace& trace, AcqOf acq_of, RelSlot rel_slot,
                                          RelOf rel_of) {
  struct VarState {
    ThreadId writer = kNoThread;
    StampRef write{0, kNoEvent};
    std::vector<std::pair<ThreadId, StampRef>> reads;
  };
  std::vector<VarState> vars(trace.num_vars());

  auto race = [&](EventId first, const Event& e) {
    return RaceReport{RaceKind::HappensBefore, first, e.id, e.operand, "hb-lockstamp"};
  };

  for (const Event& e : trace.events()) {
    if (!is_access(e.op)) {
      acq_of(e);
      continue;
    }
    auto acq = acq_of(e);
    VarState& x = vars[e.operand];
    if (x.writer != kNoThread && x.writer != e.thread && stamp_leq(acq, rel_of(x.write.slot)))
      return race(x.write.event, e);
    if (e.op == Op::Read) {
      x.reads.push_back({e.thread, {rel_slot(e), e.id}});
      continue;
    }
    for (const auto& [u, r] : x.reads)
      if (u != e.thread && stamp_leq(acq, rel_of(r.slot))) return race(r.event, e);
    x.writer = e.thread;
    x.write = {rel_slot(e), e.id};
    x.reads.clear();
  }
  return std::nullopt;
}

}  // namespace

std::optional<RaceReport> detect_hb_race_lockstamp(const Trace& trace, const LockstampTable& acq,
                                                   const LockstampTable& rel) {
  return lockstamp_check(
      trace, [&](const Event& e) { return acq.row(e.id); },
      [](const Event& e) { return e.id; }, [&](std::uint32_t slot) { return rel.row(slot); });
}

std::optional<RaceReport> detect_hb_race_lockstamp(const Trace& trace) {
  const std::size_t locks = trace.num_locks();

  // Backward pass, keeping only the stamps of accesses.
  std::vector<std::uint32_t> slot_of(trace.size(), 0);
  std::uint32_t accesses = 0;
  for (const Event& e : trace.events())
    if (is_access(e.op)) slot_of[e.id] = accesses++;
  std::vector<std::uint32_t> rel(static_cast<std::size_t>(accesses) * locks);
  {
    std::vector<Lockstamp> thread_stamp(trace.num_threads(), Lockstamp::top(locks));
    std::vector<Lockstamp> lock_stamp(locks, Lockstamp::top(locks));
    std::vector<std::uint32_t> next_pos(locks, 1);
    for (const Event& e : trace.events())
      if (e.op == Op::Release) ++next_pos[e.operand];
    auto events = trace.events();
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
      const Event& e = *it;
      Lockstamp& c = thread_stamp[e.thread];
      if (e.op == Op::Release) {
        c[e.operand] = --next_pos[e.operand];
        c.meet(lock_stamp[e.operand].values());
      } else if (e.op == Op::Acquire) {
        lock_stamp[e.operand] = c;
      } else {
        std::copy(c.values().begin(), c.values().end(),
                  rel.begin() + static_cast<std::ptrdiff_t>(slot_of[e.id]) * locks);
      }
    }
  }

  std::vector<Lockstamp> thread_stamp(trace.num_threads(), Lockstamp::bottom(locks));
  std::vector<Lockstamp> lock_stamp(locks, Lockstamp::bottom(locks));
  std::vector<std::uint32_t> acquired(locks, 0);
  auto acq_of = [&](const Event& e) -> std::span<const std::uint32_t> {
    Lockstamp& c = thread_stamp[e.thread];
    if (e.op == Op::Acquire) {
      c[e.operand] = ++acquired[e.operand];
      c.join(lock_stamp[e.operand].values());
    } else if (e.op == Op::Release) {
      lock_stamp[e.operand] = c;
    }
    return c.values();
  };
  return lockstamp_check(
      trace, acq_of, [&](const Event& e) { return slot_of[e.id]; },
      [&](std::uint32_t slot) {
        return std::span<const std::uint32_t>(rel.data() + static_cast<std::size_t>(slot) * locks,
                                              locks);
      });
}

namespace {

// Djit: per-thread vector clocks; per variable the clock component and event
// of each thread's latest read and write.
template <class OnRace>
void djit(const Trace& trace, DjitOptions options, OnRace on_race) {
  const std::size_t threads = trace.num_threads();
  std::vector<std::vector<std::uint32_t>> clock(threads, std::vector<std::uint32_t>(threads, 0));
  for (std::size_t t = 0; t < threads; ++t) clock[t][t] = 1;
  std::vector<std::vector<std::uint32_t>> lock_clock(trace.num_locks());

  struct Access {
    std::uint32_t time = 0;
    EventId event = kNoEvent;
  };
  struct VarState {
    std::vector<Access> writes;
    std::vector<Access> reads;
  };
  std::vector<VarState> vars(trace.num_vars());

  for (const Event& e : trace.events()) {
    auto& c = clock[e.thread];
    switch (e.op) {
      case Op::Acquire: {
        const auto& l = lock_clock[e.operand];
        for (std::size_t u = 0; u < l.size(); ++u) c[u] = std::max(c[u], l[u]);
        break;
      }
      case Op::Release:
        lock_clock[e.operand] = c;
        ++c[e.thread];
        break;
      case Op::Read:
      case Op::Write: {
        VarState& x = vars[e.operand];
        if (x.writes.empty()) {
          x.writes.resize(threads);
          x.reads.resize(threads);
        }
        EventId racer = kNoEvent;
        auto scan = [&](const std::vector<Access>& accesses) {
          for (std::size_t u = 0; u < threads; ++u) {
            const Access& a = accesses[u];
            if (u == e.thread || a.event == kNoEvent || a.time <= c[u]) continue;
            racer = racer == kNoEvent ? a.event : std::min(racer, a.event);
          }
        };
        if (e.op == Op::Read || !options.involving_read_only) scan(x.writes);
        if (e.op == Op::Write) scan(x.reads);
        if (racer != kNoEvent && !on_race(racer, e)) return;
        auto& mine = e.op == Op::Read ? x.reads[e.thread] : x.writes[e.thread];
        mine = {c[e.thread], e.id};
        break;
      }
    }
  }
}

}  // namespace

std::optional<RaceReport> detect_hb_race_djit(const Trace& trace, DjitOptions options) {
  std::optional<RaceReport> found;
  djit(trace, options, [&](EventId first, const Event& e) {
    found = RaceReport{RaceKind::HappensBefore, first, e.id, e.operand, "hb-djit"};
    return false;
  });
  return found;
}

std::vector<EventId> hb_racy_events_djit(const Trace& trace, DjitOptions options) {
  std::vector<EventId> out;
  djit(trace, options, [&](EventId, const Event& e) {
    out.push_back(e.id);
    return true;
  });
  return out;
}

bool prefers_lockstamps(const Trace& trace) { return trace.num_locks() < trace.num_threads(); }

std::optional<RaceReport> detect_hb_race_auto(const Trace& trace) {
  auto report = prefers_lockstamps(trace) ? detect_hb_race_lockstamp(trace)
                                          : detect_hb_race_djit(trace);
  if (report) report->algo = "hb-auto";
  return report;
}

HbGraph::HbGraph(const Trace& trace)
    : thread_next_(trace.size(), kNoEvent), lock_next_(trace.size(), kNoEvent) {
  std::vector<EventId> last_in_thread(trace.num_threads(), kNoEvent);
  std::vector<EventId> last_release(trace.num_locks(), kNoEvent);
  for (const Event& e : trace.events()) {
    if (EventId p = last_in_thread[e.thread]; p != kNoEvent) thread_next_[p] = e.id;
    last_in_thread[e.thread] = e.id;
    if (e.op == Op::Acquire) {
      // Well-formedness makes the previous event on this lock a release.
      if (EventId r = last_release[e.operand]; r != kNoEvent) lock_next_[r] = e.id;
    } else if (e.op == Op::Release) {
      last_release[e.operand] = e.id;
    }
  }
  seen_.assign(trace.size(), 0);
}

bool HbGraph::reachable(EventId from, EventId to) const {
  if (from == to) return true;
  if (from > to) return false;
  if (++epoch_ == 0) {
    std::fill(seen_.begin(), seen_.end(), 0);
    epoch_ = 1;
  }
  stack_.clear();
  stack_.push_back(from);
  seen_[from] = epoch_;
  while (!stack_.empty()) {
    EventId v = stack_.back();
    stack_.pop_back();
    for (EventId w : successors(v)) {
      if (w == kNoEvent || w > to || seen_[w] == epoch_) continue;
      if (w == to) return true;
      seen_[w] = epoch_;
      stack_.push_back(w);
    }
  }
  return false;
}

std::vector<bool> solve_mconn(const HbGraph& graph,
                              std::span<const std::pair<EventId, EventId>> queries) {
  std::vector<bool> out;
  out.reserve(queries.size());
  for (const auto& [s, t] : queries) out.push_back(graph.reachable(s, t));
  return out;
}

std::vector<std::pair<EventId, EventId>> consecutive_conflicting_pairs(const Trace& trace,
                                                                       const TraceIndex& index) {
  std::vector<std::pair<EventId, EventId>> out;
  // Pairs ending at an access whose earlier side is the last write.
  for (const Event& e : trace.events()) {
    if (!is_access(e.op)) continue;
    EventId w = index.last_write(e.id);
    if (w != kNoEvent && trace[w].thread != e.thread) out.push_back({w, e.id});
  }
  // Read followed by the next write.
  std::vector<std::vector<EventId>> pending(trace.num_vars());
  for (const Event& e : trace.events()) {
    if (e.op == Op::Read) {
      pending[e.operand].push_back(e.id);
    } else if (e.op == Op::Write) {
      for (EventId r : pending[e.operand])
        if (trace[r].thread != e.thread) out.push_back({r, e.id});
      pending[e.operand].clear();
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<RaceReport> detect_hb_race_graph(const Trace& trace) {
  TraceIndex index(trace);
  HbGraph graph(trace);
  auto pairs = consecutive_conflicting_pairs(trace, index);
  // Report the race that completes earliest.
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
  for (const auto& [a, b] : pairs) {
    if (!graph.reachable(a, b) && !graph.reachable(b, a))
      return RaceReport{RaceKind::HappensBefore, a, b, trace[a].operand, "hb-graph"};
  }
  return std::nullopt;
}

}  // namespace racelab
