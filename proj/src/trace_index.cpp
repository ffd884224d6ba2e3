#include "racelab/trace_index.hpp"

#include <algorithm>

namespace racelab {

TraceIndex::TraceIndex(const Trace& trace) {
  const std::size_t n = trace.size();
  match_.assign(n, kNoEvent);
  pos_.assign(n, 0);
  last_write_.assign(n, kNoEvent);
  thread_pos_.assign(n, 0);
  held_offset_.assign(n + 1, 0);
  thread_events_.resize(trace.num_threads());
  acquires_.resize(trace.num_locks());
  release_count_.assign(trace.num_locks(), 0);

  std::vector<EventId> open(trace.num_locks(), kNoEvent);
  std::vector<EventId> last_write(trace.num_vars(), kNoEvent);
  std::vector<std::vector<LockId>> held_by(trace.num_threads());

  for (const Event& e : trace.events()) {
    thread_pos_[e.id] = static_cast<std::uint32_t>(thread_events_[e.thread].size());
    thread_events_[e.thread].push_back(e.id);
    auto& held = held_by[e.thread];

    switch (e.op) {
      case Op::Acquire:
        acquires_[e.operand].push_back(e.id);
        pos_[e.id] = static_cast<std::uint32_t>(acquires_[e.operand].size());
        open[e.operand] = e.id;
        held.insert(std::lower_bound(held.begin(), held.end(), e.operand), e.operand);
        break;
      case Op::Release:
        pos_[e.id] = ++release_count_[e.operand];
        match_[e.id] = open[e.operand];
        match_[open[e.operand]] = e.id;
        open[e.operand] = kNoEvent;
        break;
      case Op::Read:
        last_write_[e.id] = last_write[e.operand];
        break;
      case Op::Write:
        last_write_[e.id] = last_write[e.operand];
        last_write[e.operand] = e.id;
        break;
    }

    held_.insert(held_.end(), held.begin(), held.end());
    held_offset_[e.id + 1] = static_cast<std::uint32_t>(held_.size());

    if (e.op == Op::Release) held.erase(std::find(held.begin(), held.end(), e.operand));
  }
}

bool TraceIndex::holds(EventId e, LockId l) const {
  auto held = held_at(e);
  return std::binary_search(held.begin(), held.end(), l);
}

bool conflicting(const Trace& trace, EventId a, EventId b) {
  const Event& x = trace[a];
  const Event& y = trace[b];
  return is_access(x.op) && is_access(y.op) && x.operand == y.operand &&
         x.thread != y.thread && (x.op == Op::Write || y.op == Op::Write);
}

}  // namespace racelab
