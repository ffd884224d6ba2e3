#pragma once

// Slow reference implementations written straight from the definitions.
// They share nothing with the library beyond the Trace type.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "racelab/trace.hpp"

namespace oracle {

using racelab::EventId;
using racelab::LockId;
using racelab::Op;
using racelab::Trace;

// Happens-before as an explicit relation: thread order plus release to every
// later acquire of the same lock, closed transitively. hb[a][b] for a <= b.
class HbClosure {
 public:
  explicit HbClosure(const Trace& t) : n_(t.size()), words_((n_ + 63) / 64), bits_(n_ * words_) {
    for (std::size_t i = n_; i-- > 0;) {
      set(i, i);
      const auto& e = t[static_cast<EventId>(i)];
      for (std::size_t j = i + 1; j < n_; ++j) {
        const auto& f = t[static_cast<EventId>(j)];
        bool edge = f.thread == e.thread ||
                    (e.op == Op::Release && f.op == Op::Acquire && f.operand == e.operand);
        if (!edge || get(i, j)) continue;
        for (std::size_t w = 0; w < words_; ++w) bits_[i * words_ + w] |= bits_[j * words_ + w];
      }
    }
  }

  bool operator()(std::size_t a, std::size_t b) const { return get(a, b); }

 private:
  void set(std::size_t a, std::size_t b) { bits_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64); }
  bool get(std::size_t a, std::size_t b) const {
    return bits_[a * words_ + b / 64] >> (b % 64) & 1;
  }

  std::size_t n_, words_;
  std::vector<std::uint64_t> bits_;
};

inline bool conflicting(const Trace& t, EventId a, EventId b) {
  const auto& x = t[a];
  const auto& y = t[b];
  bool access_x = x.op == Op::Read || x.op == Op::Write;
  bool access_y = y.op == Op::Read || y.op == Op::Write;
  return access_x && access_y && x.operand == y.operand && x.thread != y.thread &&
         (x.op == Op::Write || y.op == Op::Write);
}

inline std::vector<std::pair<EventId, EventId>> conflicting_pairs(const Trace& t) {
  std::vector<std::pair<EventId, EventId>> out;
  for (EventId j = 0; j < t.size(); ++j)
    for (EventId i = 0; i < j; ++i)
      if (oracle::conflicting(t, i, j)) out.push_back({i, j});
  return out;
}

inline bool hb_race(const Trace& t, const HbClosure& hb) {
  for (auto [a, b] : conflicting_pairs(t))
    if (!hb(a, b)) return true;
  return false;
}

inline bool hb_race(const Trace& t) { return hb_race(t, HbClosure(t)); }

// Accesses racing with some earlier access, ascending.
inline std::vector<EventId> hb_racy_events(const Trace& t, bool involving_read_only = false) {
  HbClosure hb(t);
  std::set<EventId> out;
  for (auto [a, b] : conflicting_pairs(t)) {
    if (involving_read_only && t[a].op == Op::Write && t[b].op == Op::Write) continue;
    if (!hb(a, b)) out.insert(b);
  }
  return {out.begin(), out.end()};
}

// Locks held by the thread of each event, by replaying acquires/releases;
// an acquire and its release count as holding.
inline std::vector<std::set<LockId>> held_sets(const Trace& t) {
  std::vector<std::set<LockId>> out(t.size());
  std::map<racelab::ThreadId, std::set<LockId>> held;
  for (const auto& e : t.events()) {
    auto& h = held[e.thread];
    if (e.op == Op::Acquire) h.insert(e.operand);
    out[e.id] = h;
    if (e.op == Op::Release) h.erase(e.operand);
  }
  return out;
}

inline std::vector<std::pair<EventId, EventId>> consecutive_pairs(const Trace& t) {
  std::vector<std::pair<EventId, EventId>> out;
  for (auto [a, b] : conflicting_pairs(t)) {
    bool between = false;
    for (EventId k = a + 1; k < b && !between; ++k)
      between = t[k].op == Op::Write && t[k].operand == t[a].operand;
    if (!between) out.push_back({a, b});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<LockId> lockset(const Trace& t, racelab::VarId x) {
  auto held = held_sets(t);
  std::set<LockId> acc;
  for (LockId l = 0; l < t.num_locks(); ++l) acc.insert(l);
  for (const auto& e : t.events()) {
    if ((e.op != Op::Read && e.op != Op::Write) || e.operand != x) continue;
    std::set<LockId> keep;
    std::set_intersection(acc.begin(), acc.end(), held[e.id].begin(), held[e.id].end(),
                          std::inserter(keep, keep.end()));
    acc = keep;
  }
  return {acc.begin(), acc.end()};
}

inline bool has_conflict(const Trace& t, racelab::VarId x) {
  for (auto [a, b] : conflicting_pairs(t))
    if (t[a].operand == x) return true;
  return false;
}

inline bool lockset_race(const Trace& t) {
  for (racelab::VarId x = 0; x < t.num_vars(); ++x)
    if (has_conflict(t, x) && lockset(t, x).empty()) return true;
  return false;
}

inline std::optional<std::pair<EventId, EventId>> lockcover_race(const Trace& t) {
  auto held = held_sets(t);
  for (auto [a, b] : conflicting_pairs(t)) {
    std::vector<LockId> common;
    std::set_intersection(held[a].begin(), held[a].end(), held[b].begin(), held[b].end(),
                          std::back_inserter(common));
    if (common.empty()) return std::make_pair(a, b);
  }
  return std::nullopt;
}

// Lockstamps straight from their definitions over the HB relation.
inline std::vector<std::uint32_t> pos_of(const Trace& t) {
  std::vector<std::uint32_t> pos(t.size(), 0);
  std::map<std::pair<int, LockId>, std::uint32_t> count;
  for (const auto& e : t.events())
    if (e.op == Op::Acquire || e.op == Op::Release)
      pos[e.id] = ++count[{e.op == Op::Acquire ? 0 : 1, e.operand}];
  return pos;
}

inline std::vector<std::uint32_t> acqls(const Trace& t, const HbClosure& hb, EventId e) {
  auto pos = pos_of(t);
  std::vector<std::uint32_t> out(t.num_locks(), 0);
  for (EventId f = 0; f <= e; ++f)
    if (t[f].op == Op::Acquire && hb(f, e)) out[t[f].operand] = std::max(out[t[f].operand], pos[f]);
  return out;
}

inline std::vector<std::uint32_t> rells(const Trace& t, const HbClosure& hb, EventId e) {
  auto pos = pos_of(t);
  std::vector<std::uint32_t> out(t.num_locks(), UINT32_MAX);
  for (EventId f = e; f < t.size(); ++f)
    if (t[f].op == Op::Release && hb(e, f)) out[t[f].operand] = std::min(out[t[f].operand], pos[f]);
  return out;
}

// Sync-preserving race by enumerating interleavings one event at a time,
// carrying the full observable state, with no pruning beyond memoization.
// Only for tiny traces.
class NaiveSyncp {
 public:
  explicit NaiveSyncp(const Trace& t) : t_(t) {
    per_thread_.resize(t.num_threads());
    for (const auto& e : t.events()) per_thread_[e.thread].push_back(e.id);
    lw_.assign(t.size(), racelab::kNoEvent);
    std::vector<EventId> last(t.num_vars(), racelab::kNoEvent);
    for (const auto& e : t.events()) {
      if (e.op == Op::Read) lw_[e.id] = last[e.operand];
      if (e.op == Op::Write) last[e.operand] = e.id;
    }
    pos_ = pos_of(t);
  }

  bool race(EventId a, EventId b) {
    if (!oracle::conflicting(t_, a, b)) return false;
    a_ = a;
    b_ = b;
    seen_.clear();
    State s;
    s.cut.assign(t_.num_threads(), 0);
    s.last_write.assign(t_.num_vars(), racelab::kNoEvent);
    s.holder.assign(t_.num_locks(), -1);
    s.last_acq.assign(t_.num_locks(), 0);
    return search(s);
  }

  bool any_race() {
    for (auto [a, b] : conflicting_pairs(t_))
      if (race(a, b)) return true;
    return false;
  }

 private:
  struct State {
    std::vector<std::uint32_t> cut;
    std::vector<EventId> last_write;
    std::vector<int> holder;
    std::vector<std::uint32_t> last_acq;
    bool operator<(const State& o) const {
      return std::tie(cut, last_write, holder, last_acq) <
             std::tie(o.cut, o.last_write, o.holder, o.last_acq);
    }
  };

  std::uint32_t index_in_thread(EventId e) const {
    const auto& v = per_thread_[t_[e].thread];
    return static_cast<std::uint32_t>(std::find(v.begin(), v.end(), e) - v.begin());
  }

  bool search(State& s) {
    if (!seen_.insert(s).second) return false;
    if (s.cut[t_[a_].thread] == index_in_thread(a_) && s.cut[t_[b_].thread] == index_in_thread(b_))
      return true;
    for (racelab::ThreadId th = 0; th < per_thread_.size(); ++th) {
      if (s.cut[th] >= per_thread_[th].size()) continue;
      EventId e = per_thread_[th][s.cut[th]];
      if (e == a_ || e == b_) continue;
      const auto& ev = t_[e];
      State next = s;
      switch (ev.op) {
        case Op::Acquire:
          if (s.holder[ev.operand] != -1 || pos_[e] < s.last_acq[ev.operand]) continue;
          next.holder[ev.operand] = static_cast<int>(th);
          next.last_acq[ev.operand] = pos_[e];
          break;
        case Op::Release:
          next.holder[ev.operand] = -1;
          break;
        case Op::Read:
          if (s.last_write[ev.operand] != lw_[e]) continue;
          break;
        case Op::Write:
          next.last_write[ev.operand] = e;
          break;
      }
      ++next.cut[th];
      if (search(next)) return true;
    }
    return false;
  }

  const Trace& t_;
  std::vector<std::vector<EventId>> per_thread_;
  std::vector<EventId> lw_;
  std::vector<std::uint32_t> pos_;
  EventId a_ = 0, b_ = 0;
  std::set<State> seen_;
};

}  // namespace oracle
