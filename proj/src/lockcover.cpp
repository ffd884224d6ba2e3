#include "racelab/lockcover.hpp"

#include <algorithm>
#include <stdexcept>

namespace racelab {

std::optional<RaceReport> detect_lockcover_race(const Trace& trace, const TraceIndex& index) {
  const std::size_t w = std::max<std::size_t>((trace.num_locks() + 63) / 64, 1);
  std::vector<std::vector<EventId>> by_var(trace.num_vars());
  std::vector<std::uint64_t> bits;  // packed held sets, w words per access
  std::vector<std::uint32_t> row(trace.size(), 0);

  for (const Event& e : trace.events()) {
    if (!is_access(e.op)) continue;
    row[e.id] = static_cast<std::uint32_t>(bits.size() / w);
    bits.resize(bits.size() + w, 0);
    std::uint64_t* r = bits.data() + static_cast<std::size_t>(row[e.id]) * w;
    for (LockId l : index.held_at(e.id)) r[l / 64] |= std::uint64_t{1} << (l % 64);
    by_var[e.operand].push_back(e.id);
  }

  auto disjoint = [&](EventId a, EventId b) {
    const std::uint64_t* x = bits.data() + static_cast<std::size_t>(row[a]) * w;
    const std::uint64_t* y = bits.data() + static_cast<std::size_t>(row[b]) * w;
    for (std::size_t i = 0; i < w; ++i)
      if (x[i] & y[i]) return false;
    return true;
  };

  std::optional<RaceReport> best;
  for (VarId x = 0; x < trace.num_vars(); ++x) {
    const auto& acc = by_var[x];
    bool done = false;
    for (std::size_t j = 1; j < acc.size() && !done; ++j) {
      if (best && acc[j] > best->second) break;
      for (std::size_t i = 0; i < j; ++i) {
        if (!conflicting(trace, acc[i], acc[j]) || !disjoint(acc[i], acc[j])) continue;
        RaceReport r{RaceKind::LockCover, acc[i], acc[j], x, "lockcover"};
        if (!best || std::tie(r.second, r.first) < std::tie(best->second, best->first)) best = r;
        done = true;
        break;
      }
    }
  }
  return best;
}

std::optional<RaceReport> detect_lockcover_race(const Trace& trace) {
  return detect_lockcover_race(trace, TraceIndex(trace));
}

OvExport export_singlevar_to_ov(const Trace& trace, const TraceIndex& index) {
  OvExport out;
  std::optional<VarId> var;
  std::vector<std::int64_t> coord(trace.num_locks(), -1);
  for (const Event& e : trace.events()) {
    if (!is_access(e.op)) continue;
    if (var && *var != e.operand) throw std::invalid_argument("trace accesses more than one variable");
    var = e.operand;
    out.events.push_back(e.id);
    for (LockId l : index.held_at(e.id)) {
      if (coord[l] >= 0) continue;
      coord[l] = static_cast<std::int64_t>(out.locks.size());
      out.locks.push_back(l);
    }
  }
  if (!var) throw std::invalid_argument("trace has no accesses");

  const std::size_t l = out.locks.size();
  const std::size_t k = trace.num_threads();
  out.instance.dim = l + k + 1;
  std::vector<BitVector> vectors;
  vectors.reserve(out.events.size());
  for (EventId id : out.events) {
    BitVector v(out.instance.dim, 0);
    for (LockId lock : index.held_at(id)) v[static_cast<std::size_t>(coord[lock])] = 1;
    v[l + trace[id].thread] = 1;
    v[l + k] = trace[id].op == Op::Read ? 1 : 0;
    vectors.push_back(std::move(v));
  }
  out.instance.parts = {vectors, vectors};
  return out;
}

OvExport export_singlevar_to_ov(const Trace& trace) {
  return export_singlevar_to_ov(trace, TraceIndex(trace));
}

}  // namespace racelab
