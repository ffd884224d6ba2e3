#include "racelab/syncp.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace racelab {

namespace {

constexpr ThreadId kFree = UINT32_MAX;

ReorderingCheck fail(std::string reason, EventId at = kNoEvent) {
  return ReorderingCheck{false, std::move(reason), at};
}

// Per-thread counts of events in rho, or a failure for bad/duplicate ids.
ReorderingCheck thread_counts(const Trace& trace, const Reordering& rho,
                              std::vector<std::uint32_t>& counts) {
  counts.assign(trace.num_threads(), 0);
  std::vector<char> seen(trace.size(), 0);
  for (EventId e : rho.events) {
    if (e >= trace.size()) return fail("unknown event", e);
    if (seen[e]) return fail("duplicate event", e);
    seen[e] = 1;
    ++counts[trace[e].thread];
  }
  return {};
}

}  // namespace

ReorderingCheck check_correct_reordering(const Trace& trace, const TraceIndex& index,
                                         const Reordering& rho) {
  std::vector<std::uint32_t> counts;
  if (auto c = thread_counts(trace, rho, counts); !c) return c;

  std::vector<std::uint32_t> next(trace.num_threads(), 0);
  std::vector<ThreadId> holder(trace.num_locks(), kFree);
  std::vector<EventId> last_write(trace.num_vars(), kNoEvent);
  for (EventId id : rho.events) {
    const Event& e = trace[id];
    if (index.thread_position(id) != next[e.thread]) return fail("not downward closed", id);
    ++next[e.thread];
    switch (e.op) {
      case Op::Acquire:
        if (holder[e.operand] != kFree) return fail("not well-formed", id);
        holder[e.operand] = e.thread;
        break;
      case Op::Release:
        if (holder[e.operand] != e.thread) return fail("not well-formed", id);
        holder[e.operand] = kFree;
        break;
      case Op::Read:
        if (last_write[e.operand] != index.last_write(id)) return fail("lw violated", id);
        break;
      case Op::Write:
        last_write[e.operand] = id;
        break;
    }
  }
  return {};
}

ReorderingCheck check_sync_preserving(const Trace& trace, const TraceIndex& index,
                                      const Reordering& rho) {
  std::vector<std::uint32_t> last(trace.num_locks(), 0);
  for (EventId id : rho.events) {
    if (id >= trace.size()) return fail("unknown event", id);
    const Event& e = trace[id];
    if (e.op != Op::Acquire) continue;
    if (index.pos(id) < last[e.operand]) return fail("not sync-preserving", id);
    last[e.operand] = index.pos(id);
  }
  return {};
}

ReorderingCheck check_enabled(const Trace& trace, const TraceIndex& index, const Reordering& rho,
                              EventId e1, EventId e2) {
  if (e1 >= trace.size() || e2 >= trace.size()) return fail("unknown event");
  std::vector<std::uint32_t> counts;
  if (auto c = thread_counts(trace, rho, counts); !c) return c;
  std::vector<ThreadId> holder(trace.num_locks(), kFree);
  for (EventId id : rho.events) {
    const Event& e = trace[id];
    if (e.op == Op::Acquire) holder[e.operand] = e.thread;
    else if (e.op == Op::Release) holder[e.operand] = kFree;
  }
  for (EventId e : {e1, e2}) {
    const Event& ev = trace[e];
    if (counts[ev.thread] != index.thread_position(e)) return fail("not enabled", e);
    if (ev.op == Op::Acquire && holder[ev.operand] != kFree) return fail("not enabled", e);
    if (ev.op == Op::Release && holder[ev.operand] != ev.thread) return fail("not enabled", e);
  }
  return {};
}

ReorderingCheck check_race_witness(const Trace& trace, const TraceIndex& index,
                                   const Reordering& rho, EventId e1, EventId e2) {
  if (e1 >= trace.size() || e2 >= trace.size()) return fail("unknown event");
  if (!conflicting(trace, e1, e2)) return fail("not conflicting");
  if (auto c = check_correct_reordering(trace, index, rho); !c) return c;
  if (auto c = check_sync_preserving(trace, index, rho); !c) return c;
  return check_enabled(trace, index, rho, e1, e2);
}

bool is_correct_reordering(const Trace& trace, const Reordering& rho) {
  return check_correct_reordering(trace, TraceIndex(trace), rho).ok;
}

bool is_sync_preserving(const Trace& trace, const Reordering& rho) {
  return check_sync_preserving(trace, TraceIndex(trace), rho).ok;
}

namespace {

struct CutHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

// Search for one conflicting pair. A state is a cut vector: the set of the
// first cut[t] events of each thread, standing for those events in trace
// order. Such a set is a sync-preserving correct reordering exactly when it
// holds the last write of each of its reads and, for any two of its acquires
// of a lock, the release of the earlier one. Every such set is reachable
// from the empty cut one event at a time through such sets, so memoizing on
// the cut alone loses nothing.
class PairSearch {
 public:
  PairSearch(const Trace& trace, const TraceIndex& index, EventId e1, EventId e2,
             std::uint64_t& nodes, std::uint64_t budget)
      : trace_(trace), index_(index), nodes_(nodes), budget_(budget) {
    goal_thread_ = {trace[e1].thread, trace[e2].thread};
    goal_pos_ = {index.thread_position(e1), index.thread_position(e2)};
  }

  enum class Result { Found, Exhausted, OverBudget };

  Result run() {
    std::vector<std::uint32_t> cut(trace_.num_threads(), 0);
    return visit(cut);
  }

  Reordering witness() const {
    Reordering rho;
    for (const Event& e : trace_.events())
      if (index_.thread_position(e.id) < found_[e.thread]) rho.events.push_back(e.id);
    return rho;
  }

 private:
  bool in(const std::vector<std::uint32_t>& cut, EventId e) const {
    return index_.thread_position(e) < cut[trace_[e].thread];
  }

  // Smallest per-thread cut that any goal state above `cut` must reach:
  // close under thread order, last writes of reads, and releases of earlier
  // acquires of a lock acquired again. Empty when that forces in one of the
  // two racing events or an acquire that can no longer be added.
  std::optional<std::vector<std::uint32_t>> required(const std::vector<std::uint32_t>& cut) const {
    std::vector<std::uint32_t> need = cut;
    for (int k = 0; k < 2; ++k)
      need[goal_thread_[k]] = std::max(need[goal_thread_[k]], goal_pos_[k]);
    std::vector<std::uint32_t> scanned(trace_.num_threads(), 0);
    auto raise = [&](EventId e) {
      ThreadId t = trace_[e].thread;
      need[t] = std::max(need[t], index_.thread_position(e) + 1);
    };

    for (bool changed = true; changed;) {
      changed = false;
      for (ThreadId t = 0; t < trace_.num_threads(); ++t) {
        auto events = index_.thread_events(t);
        for (; scanned[t] < need[t]; ++scanned[t]) {
          EventId e = events[scanned[t]];
          if (trace_[e].op == Op::Read && index_.last_write(e) != kNoEvent) {
            EventId w = index_.last_write(e);
            if (!in(need, w)) {
              raise(w);
              changed = true;
            }
          }
        }
      }
      for (LockId l = 0; l < trace_.num_locks(); ++l) {
        auto acqs = index_.acquires_of(l);
        std::size_t last = acqs.size();
        for (std::size_t i = acqs.size(); i-- > 0;)
          if (in(need, acqs[i])) {
            last = i;
            break;
          }
        for (std::size_t i = 0; i < last; ++i) {
          if (!in(need, acqs[i])) continue;
          EventId r = index_.match(acqs[i]);
          if (r == kNoEvent) return std::nullopt;
          if (!in(need, r)) {
            raise(r);
            changed = true;
          }
        }
      }
      for (int k = 0; k < 2; ++k)
        if (need[goal_thread_[k]] > goal_pos_[k]) return std::nullopt;
    }

    // An acquire still to be added must not be overtaken by a later acquire
    // of its lock that is already in.
    for (LockId l = 0; l < trace_.num_locks(); ++l) {
      bool later_in = false;
      auto acqs = index_.acquires_of(l);
      for (std::size_t i = acqs.size(); i-- > 0;) {
        if (in(cut, acqs[i])) later_in = true;
        else if (later_in && in(need, acqs[i])) return std::nullopt;
      }
    }
    return need;
  }

  bool can_add(const std::vector<std::uint32_t>& cut, EventId id) const {
    const Event& e = trace_[id];
    if (e.op == Op::Read) {
      EventId w = index_.last_write(id);
      return w == kNoEvent || in(cut, w);
    }
    if (e.op != Op::Acquire) return true;
    auto acqs = index_.acquires_of(e.operand);
    std::size_t rank = index_.pos(id) - 1;
    for (std::size_t i = rank + 1; i < acqs.size(); ++i)
      if (in(cut, acqs[i])) return false;
    // The latest earlier acquire that is in must be released.
    for (std::size_t i = rank; i-- > 0;) {
      if (!in(cut, acqs[i])) continue;
      EventId r = index_.match(acqs[i]);
      return r != kNoEvent && in(cut, r);
    }
    return true;
  }

  Result visit(std::vector<std::uint32_t>& cut) {
    if (!seen_.insert(cut).second) return Result::Exhausted;
    if (++nodes_ > budget_) return Result::OverBudget;

    auto need = required(cut);
    if (!need) return Result::Exhausted;
    if (*need == cut) {
      found_ = cut;
      return Result::Found;
    }

    std::vector<EventId> moves;
    for (ThreadId t = 0; t < trace_.num_threads(); ++t) {
      if (cut[t] >= (*need)[t]) continue;
      EventId e = index_.thread_events(t)[cut[t]];
      if (can_add(cut, e)) moves.push_back(e);
    }
    std::sort(moves.begin(), moves.end());
    for (EventId e : moves) {
      ThreadId t = trace_[e].thread;
      ++cut[t];
      Result r = visit(cut);
      --cut[t];
      if (r != Result::Exhausted) return r;
    }
    return Result::Exhausted;
  }

  const Trace& trace_;
  const TraceIndex& index_;
  std::uint64_t& nodes_;
  std::uint64_t budget_;
  std::array<ThreadId, 2> goal_thread_{};
  std::array<std::uint32_t, 2> goal_pos_{};
  std::unordered_set<std::vector<std::uint32_t>, CutHash> seen_;
  std::vector<std::uint32_t> found_;
};

}  // namespace

SyncpOutcome detect_syncp_race_oracle(const Trace& trace, std::uint64_t budget) {
  TraceIndex index(trace);
  SyncpOutcome out;

  std::vector<std::vector<EventId>> by_var(trace.num_vars());
  for (const Event& e : trace.events())
    if (is_access(e.op)) by_var[e.operand].push_back(e.id);
  std::vector<std::pair<EventId, EventId>> pairs;
  for (const auto& acc : by_var)
    for (std::size_t j = 0; j < acc.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (conflicting(trace, acc[i], acc[j])) pairs.push_back({acc[i], acc[j]});
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.second, a.first) < std::tie(b.second, b.first);
  });

  for (const auto& [e1, e2] : pairs) {
    // Both events enabled means their open sections coexist.
    auto h1 = index.held_at(e1);
    auto h2 = index.held_at(e2);
    std::vector<LockId> common;
    std::set_intersection(h1.begin(), h1.end(), h2.begin(), h2.end(), std::back_inserter(common));
    if (!common.empty()) continue;

    PairSearch search(trace, index, e1, e2, out.nodes, budget);
    auto result = search.run();
    if (result == PairSearch::Result::OverBudget) {
      out.status = SyncpOutcome::Status::BudgetExceeded;
      return out;
    }
    if (result == PairSearch::Result::Found) {
      out.status = SyncpOutcome::Status::Race;
      out.race = RaceReport{RaceKind::SyncPreserving, e1, e2, trace[e1].operand, "syncp-oracle"};
      out.witness = search.witness();
      return out;
    }
  }
  return out;
}

std::string witness_to_json(const RaceWitness& w) {
  nlohmann::ordered_json j;
  j["events"] = w.reordering.events;
  j["e1"] = w.e1;
  j["e2"] = w.e2;
  return j.dump() + "\n";
}

RaceWitness witness_from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    RaceWitness w;
    w.reordering.events = j.at("events").get<std::vector<EventId>>();
    w.e1 = j.at("e1").get<EventId>();
    w.e2 = j.at("e2").get<EventId>();
    return w;
  } catch (const nlohmann::json::exception& err) {
    throw std::invalid_argument(std::string("bad witness: ") + err.what());
  }
}

RaceWitness construct_ov3_witness(const Trace& trace, const OvInstance& inst,
                                  std::array<std::size_t, 3> triple) {
  if (inst.arity() != 3) throw std::invalid_argument("expected a three-part instance");
  for (int p = 0; p < 3; ++p)
    if (triple[p] >= inst.n()) throw std::invalid_argument("triple index out of range");
  const BitVector& x = inst.parts[0][triple[0]];
  const BitVector& y = inst.parts[1][triple[1]];
  const BitVector& z = inst.parts[2][triple[2]];
  for (std::size_t k = 0; k < inst.dim; ++k)
    if (x[k] && y[k] && z[k]) throw std::invalid_argument("triple is not orthogonal");

  TraceIndex index(trace);
  auto thread = [&](const std::string& name) {
    auto t = trace.threads().find(name);
    if (!t) throw std::invalid_argument("not an OV3 gadget trace: no thread " + name);
    return *t;
  };
  std::vector<std::uint32_t> cut(trace.num_threads(), 0);
  const std::size_t segment = triple[2];  // z index, 0-based

  // Aux: up to its segment-th rel(Y), or to its first acq(Y) when segment is 0.
  {
    ThreadId aux = thread("aux");
    auto events = index.thread_events(aux);
    auto lock_y = trace.locks().find("Y");
    std::size_t released = 0;
    std::uint32_t pos = 0;
    for (; pos < events.size(); ++pos) {
      const Event& e = trace[events[pos]];
      if (segment == 0 && e.op == Op::Acquire && e.operand == lock_y) break;
      if (e.op == Op::Release && e.operand == lock_y && ++released == segment) {
        ++pos;
        break;
      }
    }
    cut[aux] = pos;
  }

  // Coordinate threads: through their (2*segment+1)-th sync; when that sync
  // opens a z[k]=1 block and x needs l_k, on past rel(l_k) holding l'_k only.
  for (std::size_t k = 0; k < inst.dim; ++k) {
    ThreadId t = thread("tk" + std::to_string(k + 1));
    auto events = index.thread_events(t);
    auto sync_lock = trace.locks().find("sk" + std::to_string(k + 1));
    std::size_t syncs = 0;
    std::uint32_t pos = 0;
    for (; pos < events.size(); ++pos) {
      const Event& e = trace[events[pos]];
      if (e.op == Op::Release && e.operand == sync_lock && ++syncs == 2 * segment + 1) {
        ++pos;
        break;
      }
    }
    if (z[k] && x[k]) pos += 2;
    cut[t] = pos;
  }

  ThreadId tx = thread("tx" + std::to_string(triple[0] + 1));
  ThreadId ty = thread("ty" + std::to_string(triple[1] + 1));
  cut[tx] = static_cast<std::uint32_t>(index.thread_events(tx).size() - 2);
  cut[ty] = static_cast<std::uint32_t>(index.thread_events(ty).size() - 2);

  RaceWitness w;
  for (const Event& e : trace.events())
    if (index.thread_position(e.id) < cut[e.thread]) w.reordering.events.push_back(e.id);
  w.e1 = index.thread_events(tx)[cut[tx]];
  w.e2 = index.thread_events(ty)[cut[ty]];
  return w;
}

}  // namespace racelab
