#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "racelab/trace.hpp"

namespace racelab {

enum class RaceKind { HappensBefore, SyncPreserving, LockCover, LockSet };

std::string_view kind_name(RaceKind kind);

// first precedes second in the trace.
struct RaceReport {
  RaceKind kind = RaceKind::HappensBefore;
  EventId first = kNoEvent;
  EventId second = kNoEvent;
  VarId var = 0;
  std::string algo;

  bool operator==(const RaceReport&) const = default;
};

std::string describe(const Trace& trace, const RaceReport& report);

}  // namespace racelab
