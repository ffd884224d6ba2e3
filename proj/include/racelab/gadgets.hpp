#pragma once

#include <cstdint>

#include "racelab/instance.hpp"
#include "racelab/trace.hpp"

namespace racelab {

// Has a write-read HB race iff the two-part instance has an orthogonal pair.
// Threads txA.i (i = 0..d) per vector A of the first part, then tyB per
// vector B of the second; everything touches the single variable z.
Trace gen_ov_to_hb(const OvInstance& inst);

// Has a sync-preserving race iff the three-part instance has an orthogonal
// triple. Threads: tk1..tkd (one per coordinate), aux, tx1..txn, ty1..tyn.
// Each sync(s) becomes acq(s), r(v_s), w(v_s), rel(s).
Trace gen_ov3_to_syncp(const OvInstance& inst);

// Two threads, one write each per vector, nested under the vector's locks.
Trace gen_ov_to_lockcover(const OvInstance& inst);

// d+1 threads, n locks, n variables; lock-set race iff some x hits every y.
Trace gen_hs_to_lockset(const HsInstance& inst);

struct RandomTraceParams {
  std::size_t events = 100;
  std::size_t threads = 4;
  std::size_t locks = 2;
  std::size_t vars = 2;
  double acquire_prob = 0.3;
  std::uint64_t seed = 0;
};

// Deterministic in the parameters. Threads acquire only free locks and
// release their innermost one; sections still open at the end stay open.
Trace gen_random_trace(const RandomTraceParams& params);

}  // namespace racelab
