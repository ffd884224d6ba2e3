#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace racelab {

using EventId = std::uint32_t;
using ThreadId = std::uint32_t;
using LockId = std::uint32_t;
using VarId = std::uint32_t;

inline constexpr EventId kNoEvent = UINT32_MAX;

enum class Op : std::uint8_t { Acquire, Release, Read, Write };

std::string_view op_token(Op op);

constexpr bool is_access(Op op) { return op == Op::Read || op == Op::Write; }
constexpr bool is_lock_op(Op op) { return op == Op::Acquire || op == Op::Release; }

// operand is a LockId for acquire/release and a VarId for read/write.
struct Event {
  EventId id = 0;
  ThreadId thread = 0;
  Op op = Op::Read;
  std::uint32_t operand = 0;

  bool operator==(const Event&) const = default;
};

// Names interned in first-occurrence order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

enum class WellFormednessKind { Overlap, Reentrant, UnmatchedRelease };

std::string_view kind_name(WellFormednessKind kind);

struct WellFormednessIssue {
  EventId event = 0;
  WellFormednessKind kind = WellFormednessKind::Overlap;

  std::string message() const;
  bool operator==(const WellFormednessIssue&) const = default;
};

class WellFormednessError : public std::runtime_error {
 public:
  explicit WellFormednessError(WellFormednessIssue issue);
  const WellFormednessIssue& issue() const { return issue_; }

 private:
  WellFormednessIssue issue_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Checks that every lock's projection alternates acquire/release by one
// thread at a time. A trailing acquire with no release is fine.
std::optional<WellFormednessIssue> validate(std::span<const Event> events);

class Trace {
 public:
  Trace() = default;
  // Throws WellFormednessError, or std::invalid_argument when ids or
  // operands are out of range.
  Trace(std::vector<Event> events, SymbolTable threads, SymbolTable locks, SymbolTable vars);

  std::span<const Event> events() const { return events_; }
  const Event& operator[](EventId id) const { return events_[id]; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const SymbolTable& threads() const { return threads_; }
  const SymbolTable& locks() const { return locks_; }
  const SymbolTable& vars() const { return vars_; }
  std::size_t num_threads() const { return threads_.size(); }
  std::size_t num_locks() const { return locks_.size(); }
  std::size_t num_vars() const { return vars_.size(); }

  // One trace line, without the newline.
  std::string describe(EventId id) const;

  bool operator==(const Trace&) const = default;

 private:
  std::vector<Event> events_;
  SymbolTable threads_;
  SymbolTable locks_;
  SymbolTable vars_;
};

class TraceBuilder {
 public:
  TraceBuilder& add(std::string_view thread, Op op, std::string_view operand);
  TraceBuilder& acquire(std::string_view thread, std::string_view lock) {
    return add(thread, Op::Acquire, lock);
  }
  TraceBuilder& release(std::string_view thread, std::string_view lock) {
    return add(thread, Op::Release, lock);
  }
  TraceBuilder& read(std::string_view thread, std::string_view var) {
    return add(thread, Op::Read, var);
  }
  TraceBuilder& write(std::string_view thread, std::string_view var) {
    return add(thread, Op::Write, var);
  }
  std::size_t size() const { return events_.size(); }

  Trace build() &&;

 private:
  std::vector<Event> events_;
  SymbolTable threads_;
  SymbolTable locks_;
  SymbolTable vars_;
};

bool is_identifier(std::string_view s);

// Throws ParseError (1-based line) or WellFormednessError.
Trace parse_trace(std::string_view text);
std::string write_trace(const Trace& trace);

Trace load_trace(const std::filesystem::path& path);
void save_trace(const Trace& trace, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace racelab
