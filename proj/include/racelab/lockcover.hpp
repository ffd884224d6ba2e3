#pragma once

#include <optional>
#include <vector>

#include "racelab/instance.hpp"
#include "racelab/race_report.hpp"
#include "racelab/trace_index.hpp"

namespace racelab {

// A conflicting pair whose held-lock sets are disjoint. Reports the pair
// with the smallest second event, then the smallest first.
std::optional<RaceReport> detect_lockcover_race(const Trace& trace, const TraceIndex& index);
std::optional<RaceReport> detect_lockcover_race(const Trace& trace);

struct OvExport {
  OvInstance instance;
  std::vector<EventId> events;  // access behind each vector
  std::vector<LockId> locks;    // lock behind each lock coordinate
};

// Single-variable trace to OV: one vector per access, made of held-lock
// coordinates, a one-hot thread block and a trailing is-read bit. Both parts
// are the same vector list. Throws std::invalid_argument when the trace
// touches more than one variable or none.
OvExport export_singlevar_to_ov(const Trace& trace, const TraceIndex& index);
OvExport export_singlevar_to_ov(const Trace& trace);

}  // namespace racelab
