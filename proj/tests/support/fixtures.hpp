#pragma once

#include <string>

#include "racelab/instance.hpp"
#include "racelab/trace.hpp"

namespace fixtures {

// The four two-thread examples. Ids are 0-based.

// HB race between 1 and 3.
inline const std::string kSigmaA =
    "t1|acq(l)\n"
    "t1|w(x)\n"
    "t1|rel(l)\n"
    "t2|w(x)\n"
    "t2|acq(l)\n"
    "t2|rel(l)\n";

// No HB race; sync-preserving race (0, 5) witnessed by (3, 4).
inline const std::string kSigmaB =
    "t1|w(x)\n"
    "t1|acq(l)\n"
    "t1|rel(l)\n"
    "t2|acq(l)\n"
    "t2|rel(l)\n"
    "t2|w(x)\n";

// Lock-cover race (1, 6) only, besides lock-set.
inline const std::string kSigmaC =
    "t1|acq(l)\n"
    "t1|w(x)\n"
    "t1|rel(l)\n"
    "t2|acq(l)\n"
    "t2|r(x)\n"
    "t2|rel(l)\n"
    "t2|w(x)\n";

// Lock-set race only.
inline const std::string kSigmaD =
    "t1|acq(l1)\n"
    "t1|acq(l2)\n"
    "t1|w(x)\n"
    "t1|rel(l2)\n"
    "t1|rel(l1)\n"
    "t2|acq(l2)\n"
    "t2|acq(l3)\n"
    "t2|w(x)\n"
    "t2|rel(l3)\n"
    "t2|rel(l2)\n"
    "t1|acq(l1)\n"
    "t1|acq(l3)\n"
    "t1|w(x)\n"
    "t1|rel(l3)\n"
    "t1|rel(l1)\n";

inline racelab::Trace sigma_a() { return racelab::parse_trace(kSigmaA); }
inline racelab::Trace sigma_b() { return racelab::parse_trace(kSigmaB); }
inline racelab::Trace sigma_c() { return racelab::parse_trace(kSigmaC); }
inline racelab::Trace sigma_d() { return racelab::parse_trace(kSigmaD); }

inline racelab::OvInstance ov(std::initializer_list<std::initializer_list<const char*>> parts) {
  racelab::OvInstance inst;
  for (const auto& part : parts) {
    inst.parts.emplace_back();
    for (const char* v : part) inst.parts.back().push_back(racelab::parse_bits(v));
  }
  inst.dim = inst.parts.front().front().size();
  return inst;
}

// Orthogonal pair (x2, y2).
inline racelab::OvInstance ov2_example() { return ov({{"101", "100", "010"}, {"111", "011", "110"}}); }

// Orthogonal triple (x1, y2, z2).
inline racelab::OvInstance ov3_example() { return ov({{"11", "11"}, {"11", "01"}, {"11", "10"}}); }

// x4 hits every y.
inline racelab::HsInstance hs_example() {
  racelab::HsInstance inst;
  inst.dim = 3;
  for (const char* v : {"001", "100", "101", "011"}) inst.xs.push_back(racelab::parse_bits(v));
  for (const char* v : {"001", "010", "111", "110"}) inst.ys.push_back(racelab::parse_bits(v));
  return inst;
}

}  // namespace fixtures
