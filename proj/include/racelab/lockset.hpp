#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "racelab/race_report.hpp"
#include "racelab/trace.hpp"

namespace racelab {

// Incremental lock set of one variable. B is the candidate set (locks held
// at every access so far), A the locks held by a thread, and C = B \ A the
// locks the next access by that thread would strike from B. Each lock sits
// in exactly one list: free, or that of its holder, so an access costs only
// the locks it removes.
class LocksetPass {
 public:
  LocksetPass(const Trace& trace, VarId var);

  void step(const Event& e);

  std::vector<LockId> held(ThreadId t) const;
  std::vector<LockId> candidates() const;
  std::vector<LockId> strike_set(ThreadId t) const;
  bool accessed() const { return accessed_; }

 private:
  void link(LockId l, std::uint32_t owner);
  void unlink(LockId l);
  void drop_list(std::uint32_t owner);

  VarId var_;
  std::uint32_t free_list_;
  std::vector<ThreadId> holder_;
  std::vector<char> in_b_;
  std::vector<LockId> next_, prev_;
  std::vector<LockId> head_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> busy_;      // owners with a non-empty list
  std::vector<std::uint32_t> busy_pos_;
  bool accessed_ = false;
};

// Locks held at every access to var, ascending. All locks if var is never
// accessed.
std::vector<LockId> lockset_of_variable(const Trace& trace, VarId var);

// Lock sets of all variables. Runs the per-variable pass when there are no
// more variables than locks, otherwise one pass with explicit intersections.
std::vector<std::vector<LockId>> all_locksets(const Trace& trace);
std::vector<std::vector<LockId>> all_locksets_naive(const Trace& trace);

// True iff a write and another access to var come from different threads.
std::vector<char> variables_with_conflicts(const Trace& trace);

std::optional<RaceReport> detect_lockset_race(const Trace& trace);

struct ProtectedBy {
  LockId lock = 0;
  bool operator==(const ProtectedBy&) const = default;
};
struct NoConflictingPair {
  bool operator==(const NoConflictingPair&) const = default;
};
struct Racy {
  bool operator==(const Racy&) const = default;
};
struct Unclaimed {
  bool operator==(const Unclaimed&) const = default;
};
// A lock name the trace does not contain.
struct UnknownLock {
  std::string name;
  bool operator==(const UnknownLock&) const = default;
};

using Verdict = std::variant<Unclaimed, ProtectedBy, NoConflictingPair, Racy, UnknownLock>;

struct Certificate {
  std::vector<Verdict> verdicts;  // indexed by VarId
  std::vector<std::string> unknown_variables;
  bool operator==(const Certificate&) const = default;
};

Certificate emit_certificate(const Trace& trace);

struct CertificateCheck {
  bool accepted = false;
  std::string reason;
  EventId witness = kNoEvent;
  EventId witness2 = kNoEvent;
};

// Single pass. Rejection names an event where a claim fails.
CertificateCheck verify_certificate(const Trace& trace, const Certificate& cert);

// {"x": {"lock": "l"} | "no-conflict" | "racy", ...}
std::string certificate_to_json(const Trace& trace, const Certificate& cert);
// Throws std::invalid_argument on malformed JSON or entries.
Certificate certificate_from_json(const Trace& trace, std::string_view text);

}  // namespace racelab
