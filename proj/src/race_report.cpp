#include "racelab/race_report.hpp"

namespace racelab {

std::string_view kind_name(RaceKind kind) {
  switch (kind) {
    case RaceKind::HappensBefore: return "hb";
    case RaceKind::SyncPreserving: return "syncp";
    case RaceKind::LockCover: return "lockcover";
    case RaceKind::LockSet: return "lockset";
  }
  return "?";
}

std::string describe(const Trace& trace, const RaceReport& report) {
  std::string out(kind_name(report.kind));
  out += " race on " + trace.vars().name(report.var) + ": ";
  out += std::to_string(report.first) + " (" + trace.describe(report.first) + ") and ";
  out += std::to_string(report.second) + " (" + trace.describe(report.second) + ")";
  return out;
}

}  // namespace racelab
