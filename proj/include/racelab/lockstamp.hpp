#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "racelab/trace.hpp"

namespace racelab {

inline constexpr std::uint32_t kInfinity = UINT32_MAX;

// One counter per lock. Acquire stamps count the acquires that happen
// before an event; release stamps the first release that happens after it
// (kInfinity when there is none).
class Lockstamp {
 public:
  Lockstamp() = default;
  Lockstamp(std::size_t locks, std::uint32_t fill) : v_(locks, fill) {}
  explicit Lockstamp(std::vector<std::uint32_t> values) : v_(std::move(values)) {}

  static Lockstamp bottom(std::size_t locks) { return Lockstamp(locks, 0); }
  static Lockstamp top(std::size_t locks) { return Lockstamp(locks, kInfinity); }

  std::size_t size() const { return v_.size(); }
  std::uint32_t operator[](LockId l) const { return v_[l]; }
  std::uint32_t& operator[](LockId l) { return v_[l]; }
  std::span<const std::uint32_t> values() const { return v_; }

  Lockstamp& join(std::span<const std::uint32_t> other);
  Lockstamp& meet(std::span<const std::uint32_t> other);

  bool operator==(const Lockstamp&) const = default;

 private:
  std::vector<std::uint32_t> v_;
};

// Pointwise a <= b.
bool stamp_leq(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

class LockstampTable {
 public:
  LockstampTable() = default;
  LockstampTable(std::size_t events, std::size_t locks)
      : width_(locks), rows_(events), data_(events * locks) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return rows_; }

  std::span<const std::uint32_t> row(EventId e) const {
    return {data_.data() + static_cast<std::size_t>(e) * width_, width_};
  }
  std::span<std::uint32_t> row(EventId e) {
    return {data_.data() + static_cast<std::size_t>(e) * width_, width_};
  }
  Lockstamp at(EventId e) const {
    auto r = row(e);
    return Lockstamp(std::vector<std::uint32_t>(r.begin(), r.end()));
  }

 private:
  std::size_t width_ = 0;
  std::size_t rows_ = 0;
  std::vector<std::uint32_t> data_;
};

// Forward pass; one row per event.
LockstampTable acquire_lockstamps(const Trace& trace);
// Backward pass; one row per event.
LockstampTable release_lockstamps(const Trace& trace);

// For events in different threads with acq2 taken at the later event and
// rel1 at the earlier one: true iff they are unordered by happens-before.
inline bool hb_unordered(std::span<const std::uint32_t> acq2, std::span<const std::uint32_t> rel1) {
  return stamp_leq(acq2, rel1);
}

}  // namespace racelab
