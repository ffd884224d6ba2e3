#include "racelab/trace.hpp"

#include <fstream>
#include <sstream>

namespace racelab {

std::string_view op_token(Op op) {
  switch (op) {
    case Op::Acquire: return "acq";
    case Op::Release: return "rel";
    case Op::Read: return "r";
    case Op::Write: return "w";
  }
  return "?";
}

std::uint32_t SymbolTable::intern(std::string_view name) {
  std::string key(name);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view kind_name(WellFormednessKind kind) {
  switch (kind) {
    case WellFormednessKind::Overlap: return "overlap";
    case WellFormednessKind::Reentrant: return "reentrant";
    case WellFormednessKind::UnmatchedRelease: return "unmatched-release";
  }
  return "?";
}

std::string WellFormednessIssue::message() const {
  return "ill-formed trace at event " + std::to_string(event) + ": " +
         std::string(kind_name(kind));
}

WellFormednessError::WellFormednessError(WellFormednessIssue issue)
    : std::runtime_error(issue.message()), issue_(issue) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::optional<WellFormednessIssue> validate(std::span<const Event> events) {
  constexpr ThreadId kFree = UINT32_MAX;
  std::vector<ThreadId> holder;
  for (const Event& e : events) {
    if (!is_lock_op(e.op)) continue;
    if (e.operand >= holder.size()) holder.resize(e.operand + 1, kFree);
    ThreadId& h = holder[e.operand];
    if (e.op == Op::Acquire) {
      if (h == e.thread) return WellFormednessIssue{e.id, WellFormednessKind::Reentrant};
      if (h != kFree) return WellFormednessIssue{e.id, WellFormednessKind::Overlap};
      h = e.thread;
    } else {
      if (h != e.thread) return WellFormednessIssue{e.id, WellFormednessKind::UnmatchedRelease};
      h = kFree;
    }
  }
  return std::nullopt;
}

Trace::Trace(std::vector<Event> events, SymbolTable threads, SymbolTable locks, SymbolTable vars)
    : events_(std::move(events)),
      threads_(std::move(threads)),
      locks_(std::move(locks)),
      vars_(std::move(vars)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (e.id != i) throw std::invalid_argument("event id does not match its position");
    if (e.thread >= threads_.size()) throw std::invalid_argument("unknown thread id");
    std::size_t limit = is_lock_op(e.op) ? locks_.size() : vars_.size();
    if (e.operand >= limit) throw std::invalid_argument("unknown operand id");
  }
  if (auto issue = validate(events_)) throw WellFormednessError(*issue);
}

std::string Trace::describe(EventId id) const {
  const Event& e = events_.at(id);
  const SymbolTable& operands = is_lock_op(e.op) ? locks_ : vars_;
  std::string out = threads_.name(e.thread);
  out += '|';
  out += op_token(e.op);
  out += '(';
  out += operands.name(e.operand);
  out += ')';
  return out;
}

TraceBuilder& TraceBuilder::add(std::string_view thread, Op op, std::string_view operand) {
  Event e;
  e.id = static_cast<EventId>(events_.size());
  e.thread = threads_.intern(thread);
  e.op = op;
  e.operand = is_lock_op(op) ? locks_.intern(operand) : vars_.intern(operand);
  events_.push_back(e);
  return *this;
}

Trace TraceBuilder::build() && {
  return Trace(std::move(events_), std::move(threads_), std::move(locks_), std::move(vars_));
}

namespace {

bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool ident_rest(char c) {
  return ident_start(c) || (c >= '0' && c <= '9') || c == '.' || c == '-';
}

std::optional<Op> parse_op(std::string_view s) {
  if (s == "acq") return Op::Acquire;
  if (s == "rel") return Op::Release;
  if (s == "r") return Op::Read;
  if (s == "w") return Op::Write;
  return std::nullopt;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s.front())) return false;
  for (char c : s.substr(1))
    if (!ident_rest(c)) return false;
  return true;
}

Trace parse_trace(std::string_view text) {
  TraceBuilder builder;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }

    auto bar = line.find('|');
    if (bar == std::string_view::npos) throw ParseError(line_no, "expected '|'");
    std::string_view thread = line.substr(0, bar);
    if (!is_identifier(thread)) throw ParseError(line_no, "bad thread identifier");

    std::string_view rest = line.substr(bar + 1);
    auto open = rest.find('(');
    if (open == std::string_view::npos) throw ParseError(line_no, "expected '('");
    auto op = parse_op(rest.substr(0, open));
    if (!op) throw ParseError(line_no, "unknown operation");
    if (rest.back() != ')') throw ParseError(line_no, "expected ')' at end of line");
    std::string_view operand = rest.substr(open + 1, rest.size() - open - 2);
    if (!is_identifier(operand)) throw ParseError(line_no, "bad operand identifier");

    builder.add(thread, *op, operand);
    if (end == text.size()) break;
  }
  return std::move(builder).build();
}

std::string write_trace(const Trace& trace) {
  std::string out;
  out.reserve(trace.size() * 12);
  for (const Event& e : trace.events()) {
    out += trace.describe(e.id);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Trace load_trace(const std::filesystem::path& path) { return parse_trace(read_file(path)); }

void save_trace(const Trace& trace, const std::filesystem::path& path) {
  write_file(path, write_trace(trace));
}

}  // namespace racelab
