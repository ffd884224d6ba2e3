#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "racelab/race_report.hpp"
#include "racelab/trace.hpp"

namespace racelab {

namespace exit_code {
inline constexpr int kDone = 0;
inline constexpr int kInputError = 2;
inline constexpr int kBudgetExceeded = 3;
inline constexpr int kRejected = 4;
}  // namespace exit_code

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

const std::vector<std::string>& detector_names();

struct RunResult {
  std::optional<RaceReport> race;
  bool budget_exceeded = false;
  std::string algo;
  double millis = 0;
  std::vector<EventId> racy_events;  // --report-all
  std::vector<EventId> witness;      // syncp-oracle
  std::uint64_t nodes = 0;
};

struct RunOptions {
  bool report_all = false;
  std::uint64_t budget = kDefaultBudget;
};

// Runs one detector; the clock covers the detection pass only. Throws
// std::invalid_argument for an unknown algorithm.
RunResult run_detector(const Trace& trace, const std::string& algo, const RunOptions& options = {});

std::string run_result_json(const Trace& trace, const RunResult& result);

// Entry point for the command-line tool. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace racelab
