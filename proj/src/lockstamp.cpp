#include "racelab/lockstamp.hpp"

#include <algorithm>
#include <cassert>

namespace racelab {

Lockstamp& Lockstamp::join(std::span<const std::uint32_t> other) {
  assert(other.size() == v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = std::max(v_[i], other[i]);
  return *this;
}

Lockstamp& Lockstamp::meet(std::span<const std::uint32_t> other) {
  assert(other.size() == v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] = std::min(v_[i], other[i]);
  return *this;
}

bool stamp_leq(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

LockstampTable acquire_lockstamps(const Trace& trace) {
  const std::size_t locks = trace.num_locks();
  LockstampTable table(trace.size(), locks);
  std::vector<Lockstamp> thread_stamp(trace.num_threads(), Lockstamp::bottom(locks));
  std::vector<Lockstamp> lock_stamp(trace.num_locks(), Lockstamp::bottom(locks));
  std::vector<std::uint32_t> acquired(locks, 0);

  for (const Event& e : trace.events()) {
    Lockstamp& c = thread_stamp[e.thread];
    if (e.op == Op::Acquire) {
      c[e.operand] = ++acquired[e.operand];
      c.join(lock_stamp[e.operand].values());
    } else if (e.op == Op::Release) {
      lock_stamp[e.operand] = c;
    }
    std::copy(c.values().begin(), c.values().end(), table.row(e.id).begin());
  }
  return table;
}

LockstampTable release_lockstamps(const Trace& trace) {
  const std::size_t locks = trace.num_locks();
  LockstampTable table(trace.size(), locks);
  std::vector<Lockstamp> thread_stamp(trace.num_threads(), Lockstamp::top(locks));
  std::vector<Lockstamp> lock_stamp(trace.num_locks(), Lockstamp::top(locks));
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
    }
    std::copy(c.values().begin(), c.values().end(), table.row(e.id).begin());
  }
  return table;
}

}  // namespace racelab
