#include "racelab/lockset.hpp"

#include <algorithm>
#include <cstdint>

#include "json.hpp"

namespace racelab {

namespace {

constexpr std::uint32_t kNil = UINT32_MAX;
constexpr ThreadId kFree = UINT32_MAX;

using Words = std::vector<std::uint64_t>;

std::size_t word_count(std::size_t bits) { return (bits + 63) / 64; }

}  // namespace

LocksetPass::LocksetPass(const Trace& trace, VarId var)
    : var_(var),
      free_list_(static_cast<std::uint32_t>(trace.num_threads())),
      holder_(trace.num_locks(), kFree),
      in_b_(trace.num_locks(), 1),
      next_(trace.num_locks(), kNil),
      prev_(trace.num_locks(), kNil),
      head_(trace.num_threads() + 1, kNil),
      count_(trace.num_threads() + 1, 0),
      busy_pos_(trace.num_threads() + 1, kNil) {
  for (LockId l = 0; l < trace.num_locks(); ++l) link(l, free_list_);
}

void LocksetPass::link(LockId l, std::uint32_t owner) {
  next_[l] = head_[owner];
  prev_[l] = kNil;
  if (head_[owner] != kNil) prev_[head_[owner]] = l;
  head_[owner] = l;
  if (count_[owner]++ == 0) {
    busy_pos_[owner] = static_cast<std::uint32_t>(busy_.size());
    busy_.push_back(owner);
  }
}

void LocksetPass::unlink(LockId l) {
  std::uint32_t owner = holder_[l] == kFree ? free_list_ : holder_[l];
  if (prev_[l] != kNil) next_[prev_[l]] = next_[l];
  else head_[owner] = next_[l];
  if (next_[l] != kNil) prev_[next_[l]] = prev_[l];
  next_[l] = prev_[l] = kNil;
  if (--count_[owner] == 0) {
    std::uint32_t at = busy_pos_[owner];
    busy_[at] = busy_.back();
    busy_pos_[busy_[at]] = at;
    busy_.pop_back();
    busy_pos_[owner] = kNil;
  }
}

void LocksetPass::drop_list(std::uint32_t owner) {
  for (LockId l = head_[owner]; l != kNil;) {
    LockId n = next_[l];
    in_b_[l] = 0;
    next_[l] = prev_[l] = kNil;
    l = n;
  }
  head_[owner] = kNil;
  count_[owner] = 0;
  std::uint32_t at = busy_pos_[owner];
  busy_[at] = busy_.back();
  busy_pos_[busy_[at]] = at;
  busy_.pop_back();
  busy_pos_[owner] = kNil;
}

void LocksetPass::step(const Event& e) {
  switch (e.op) {
    case Op::Acquire:
      if (in_b_[e.operand]) unlink(e.operand);
      holder_[e.operand] = e.thread;
      if (in_b_[e.operand]) link(e.operand, e.thread);
      break;
    case Op::Release:
      if (in_b_[e.operand]) unlink(e.operand);
      holder_[e.operand] = kFree;
      if (in_b_[e.operand]) link(e.operand, free_list_);
      break;
    case Op::Read:
    case Op::Write:
      if (e.operand != var_) break;
      accessed_ = true;
      // Everything in B that this thread does not hold leaves B.
      while (!busy_.empty()) {
        std::uint32_t owner = busy_.back() == e.thread && busy_.size() > 1
                                  ? busy_[busy_.size() - 2]
                                  : busy_.back();
        if (owner == e.thread) break;
        drop_list(owner);
      }
      break;
  }
}

std::vector<LockId> LocksetPass::held(ThreadId t) const {
  std::vector<LockId> out;
  for (LockId l = 0; l < holder_.size(); ++l)
    if (holder_[l] == t) out.push_back(l);
  return out;
}

std::vector<LockId> LocksetPass::candidates() const {
  std::vector<LockId> out;
  for (LockId l = 0; l < in_b_.size(); ++l)
    if (in_b_[l]) out.push_back(l);
  return out;
}

std::vector<LockId> LocksetPass::strike_set(ThreadId t) const {
  std::vector<LockId> out;
  for (LockId l = 0; l < in_b_.size(); ++l)
    if (in_b_[l] && holder_[l] != t) out.push_back(l);
  return out;
}

std::vector<LockId> lockset_of_variable(const Trace& trace, VarId var) {
  LocksetPass pass(trace, var);
  for (const Event& e : trace.events()) pass.step(e);
  return pass.candidates();
}

std::vector<std::vector<LockId>> all_locksets_naive(const Trace& trace) {
  const std::size_t words = word_count(trace.num_locks());
  Words full(words, ~std::uint64_t{0});
  if (trace.num_locks() % 64 != 0 && words > 0)
    full.back() = (std::uint64_t{1} << (trace.num_locks() % 64)) - 1;
  std::vector<Words> per_var(trace.num_vars(), full);
  std::vector<Words> held(trace.num_threads(), Words(words, 0));

  for (const Event& e : trace.events()) {
    Words& h = held[e.thread];
    switch (e.op) {
      case Op::Acquire: h[e.operand / 64] |= std::uint64_t{1} << (e.operand % 64); break;
      case Op::Release: h[e.operand / 64] &= ~(std::uint64_t{1} << (e.operand % 64)); break;
      default: {
        Words& b = per_var[e.operand];
        for (std::size_t i = 0; i < words; ++i) b[i] &= h[i];
      }
    }
  }

  std::vector<std::vector<LockId>> out(trace.num_vars());
  for (VarId x = 0; x < trace.num_vars(); ++x)
    for (LockId l = 0; l < trace.num_locks(); ++l)
      if (per_var[x][l / 64] >> (l % 64) & 1) out[x].push_back(l);
  return out;
}

std::vector<std::vector<LockId>> all_locksets(const Trace& trace) {
  if (trace.num_vars() > trace.num_locks()) return all_locksets_naive(trace);
  std::vector<std::vector<LockId>> out;
  out.reserve(trace.num_vars());
  for (VarId x = 0; x < trace.num_vars(); ++x) out.push_back(lockset_of_variable(trace, x));
  return out;
}

namespace {

// Tracks whether a variable has seen a conflicting pair, and remembers
// enough to name one the moment it appears.
struct ConflictTracker {
  EventId first_access = kNoEvent;
  ThreadId first_thread = kFree;
  EventId other_access = kNoEvent;  // first access by a thread != first_thread
  EventId first_write = kNoEvent;
  bool conflict = false;

  // Returns the pair that first makes the variable conflicting.
  std::optional<std::pair<EventId, EventId>> observe(const Event& e) {
    std::optional<std::pair<EventId, EventId>> fresh;
    if (!conflict) {
      if (e.op == Op::Write) {
        if (first_access != kNoEvent && first_thread != e.thread) fresh = {{first_access, e.id}};
        else if (other_access != kNoEvent) fresh = {{other_access, e.id}};
      } else if (first_write != kNoEvent && first_thread != e.thread) {
        // Before this read only one thread touched the variable.
        fresh = {{first_write, e.id}};
      }
      conflict = fresh.has_value();
    }
    if (first_access == kNoEvent) {
      first_access = e.id;
      first_thread = e.thread;
    } else if (other_access == kNoEvent && e.thread != first_thread) {
      other_access = e.id;
    }
    if (e.op == Op::Write && first_write == kNoEvent) first_write = e.id;
    return fresh;
  }
};

}  // namespace

std::vector<char> variables_with_conflicts(const Trace& trace) {
  std::vector<ConflictTracker> vars(trace.num_vars());
  for (const Event& e : trace.events())
    if (is_access(e.op)) vars[e.operand].observe(e);
  std::vector<char> out(trace.num_vars());
  for (VarId x = 0; x < trace.num_vars(); ++x) out[x] = vars[x].conflict;
  return out;
}

std::optional<RaceReport> detect_lockset_race(const Trace& trace) {
  auto conflicts = variables_with_conflicts(trace);
  if (std::none_of(conflicts.begin(), conflicts.end(), [](char c) { return c != 0; }))
    return std::nullopt;
  auto sets = all_locksets(trace);
  for (VarId x = 0; x < trace.num_vars(); ++x) {
    if (!conflicts[x] || !sets[x].empty()) continue;
    ConflictTracker tracker;
    for (const Event& e : trace.events()) {
      if (!is_access(e.op) || e.operand != x) continue;
      if (auto pair = tracker.observe(e))
        return RaceReport{RaceKind::LockSet, pair->first, pair->second, x, "lockset"};
    }
  }
  return std::nullopt;
}

Certificate emit_certificate(const Trace& trace) {
  auto conflicts = variables_with_conflicts(trace);
  auto sets = all_locksets(trace);
  Certificate cert;
  cert.verdicts.resize(trace.num_vars());
  for (VarId x = 0; x < trace.num_vars(); ++x) {
    if (!sets[x].empty()) cert.verdicts[x] = ProtectedBy{sets[x].front()};
    else if (!conflicts[x]) cert.verdicts[x] = NoConflictingPair{};
    else cert.verdicts[x] = Racy{};
  }
  return cert;
}

CertificateCheck verify_certificate(const Trace& trace, const Certificate& cert) {
  auto reject = [](std::string reason, EventId a = kNoEvent, EventId b = kNoEvent) {
    return CertificateCheck{false, std::move(reason), a, b};
  };
  if (!cert.unknown_variables.empty())
    return reject("unknown variable " + cert.unknown_variables.front());
  if (cert.verdicts.size() != trace.num_vars()) return reject("certificate size mismatch");

  const std::size_t words = word_count(trace.num_locks());
  std::vector<EventId> first_access(trace.num_vars(), kNoEvent);
  std::vector<ThreadId> holder(trace.num_locks(), kFree);
  std::vector<ConflictTracker> trackers(trace.num_vars());
  // Running intersections, only for variables claimed racy.
  std::vector<Words> inter(trace.num_vars());
  std::vector<Words> held(trace.num_threads(), Words(words, 0));
  for (VarId x = 0; x < trace.num_vars(); ++x) {
    const Verdict& v = cert.verdicts[x];
    if (std::holds_alternative<Unclaimed>(v)) return reject("no claim for " + trace.vars().name(x));
    if (const auto* u = std::get_if<UnknownLock>(&v))
      return reject("unknown lock " + u->name + " for " + trace.vars().name(x));
    if (const auto* p = std::get_if<ProtectedBy>(&v); p && p->lock >= trace.num_locks())
      return reject("lock id out of range for " + trace.vars().name(x));
    if (std::holds_alternative<Racy>(v)) inter[x].assign(words, ~std::uint64_t{0});
  }

  for (const Event& e : trace.events()) {
    switch (e.op) {
      case Op::Acquire:
        holder[e.operand] = e.thread;
        held[e.thread][e.operand / 64] |= std::uint64_t{1} << (e.operand % 64);
        continue;
      case Op::Release:
        holder[e.operand] = kFree;
        held[e.thread][e.operand / 64] &= ~(std::uint64_t{1} << (e.operand % 64));
        continue;
      default: break;
    }
    const VarId x = e.operand;
    if (first_access[x] == kNoEvent) first_access[x] = e.id;
    auto pair = trackers[x].observe(e);
    const Verdict& v = cert.verdicts[x];
    if (const auto* p = std::get_if<ProtectedBy>(&v)) {
      if (holder[p->lock] != e.thread)
        return reject(trace.locks().name(p->lock) + " not held", e.id);
    } else if (std::holds_alternative<NoConflictingPair>(v)) {
      if (pair) return reject("conflicting pair", pair->first, pair->second);
    } else {
      for (std::size_t i = 0; i < words; ++i) inter[x][i] &= held[e.thread][i];
    }
  }

  for (VarId x = 0; x < trace.num_vars(); ++x) {
    if (!std::holds_alternative<Racy>(cert.verdicts[x])) continue;
    if (!trackers[x].conflict)
      return reject("no conflicting pair on " + trace.vars().name(x), first_access[x]);
    for (std::size_t i = 0; i < words; ++i) {
      if (inter[x][i] == 0) continue;
      LockId l = static_cast<LockId>(i * 64 + static_cast<std::size_t>(__builtin_ctzll(inter[x][i])));
      return reject(trace.vars().name(x) + " protected by " + trace.locks().name(l),
                    first_access[x]);
    }
  }
  return CertificateCheck{true, "", kNoEvent, kNoEvent};
}

std::string certificate_to_json(const Trace& trace, const Certificate& cert) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (VarId x = 0; x < cert.verdicts.size() && x < trace.num_vars(); ++x) {
    const Verdict& v = cert.verdicts[x];
    const std::string& name = trace.vars().name(x);
    if (const auto* p = std::get_if<ProtectedBy>(&v)) j[name] = {{"lock", trace.locks().name(p->lock)}};
    else if (const auto* u = std::get_if<UnknownLock>(&v)) j[name] = {{"lock", u->name}};
    else if (std::holds_alternative<NoConflictingPair>(v)) j[name] = "no-conflict";
    else if (std::holds_alternative<Racy>(v)) j[name] = "racy";
  }
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const Trace& trace, std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("certificate is not valid JSON: ") + err.what());
  }
  if (!j.is_object()) throw std::invalid_argument("certificate must be a JSON object");

  Certificate cert;
  cert.verdicts.assign(trace.num_vars(), Unclaimed{});
  for (const auto& [name, value] : j.items()) {
    auto x = trace.vars().find(name);
    if (!x) {
      cert.unknown_variables.push_back(name);
      continue;
    }
    Verdict& v = cert.verdicts[*x];
    if (value.is_string() && value == "no-conflict") {
      v = NoConflictingPair{};
    } else if (value.is_string() && value == "racy") {
      v = Racy{};
    } else if (value.is_object() && value.size() == 1 && value.contains("lock") &&
               value["lock"].is_string()) {
      std::string lock = value["lock"];
      if (auto l = trace.locks().find(lock)) v = ProtectedBy{*l};
      else v = UnknownLock{lock};
    } else {
      throw std::invalid_argument("bad certificate entry for " + name);
    }
  }
  return cert;
}

}  // namespace racelab
