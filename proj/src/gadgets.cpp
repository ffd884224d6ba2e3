#include "racelab/gadgets.hpp"

#include <random>
#include <stdexcept>

namespace racelab {

namespace {

std::string num(std::size_t i) { return std::to_string(i); }

void critical_section(TraceBuilder& b, const std::string& t, const std::string& lock) {
  b.acquire(t, lock).release(t, lock);
}

void sync(TraceBuilder& b, const std::string& t, const std::string& lock) {
  b.acquire(t, lock).read(t, "v_" + lock).write(t, "v_" + lock).release(t, lock);
}

void require_parts(const OvInstance& inst, std::size_t k) {
  if (inst.arity() != k)
    throw std::invalid_argument("expected an OV instance with " + num(k) + " parts");
  for (const auto& part : inst.parts)
    for (const auto& v : part)
      if (v.size() != inst.dim) throw std::invalid_argument("vector dimension mismatch");
}

}  // namespace

Trace gen_ov_to_hb(const OvInstance& inst) {
  require_parts(inst, 2);
  const auto& xs = inst.parts[0];
  const auto& ys = inst.parts[1];
  const std::size_t d = inst.dim;

  // Last vector of the first part with a 1 at each coordinate.
  std::vector<std::size_t> last_one(d, xs.size());
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t i = 0; i < d; ++i)
      if (xs[a][i]) last_one[i] = a;

  TraceBuilder b;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    const std::string own = "lx" + num(a + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      const std::string t = "tx" + num(a + 1) + "." + num(i);
      if (i == 0) {
        b.write(t, "z");
        critical_section(b, t, own);
        continue;
      }
      critical_section(b, t, own);
      if (!xs[a][i - 1]) continue;
      critical_section(b, t, "l" + num(i));
      if (last_one[i - 1] == a)
        for (std::size_t c = 0; c < ys.size(); ++c)
          critical_section(b, t, "ly" + num(c + 1) + "." + num(i));
    }
  }
  for (std::size_t c = 0; c < ys.size(); ++c) {
    const std::string t = "ty" + num(c + 1);
    for (std::size_t i = 1; i <= d; ++i)
      if (ys[c][i - 1]) critical_section(b, t, "ly" + num(c + 1) + "." + num(i));
    b.read(t, "z");
  }
  return std::move(b).build();
}

namespace {

// A thread program for the OV3 schedule: plain events, or syncs emitted as
// one atomic block of four.
struct Step {
  enum Kind { Acq, Rel, Sync } kind;
  std::string lock;
};

}  // namespace

Trace gen_ov3_to_syncp(const OvInstance& inst) {
  require_parts(inst, 3);
  const std::size_t n = inst.n();
  const std::size_t d = inst.dim;
  const auto& xs = inst.parts[0];
  const auto& ys = inst.parts[1];
  const auto& zs = inst.parts[2];
  auto lk = [](std::size_t k) { return "lk" + num(k + 1); };
  auto lq = [](std::size_t k) { return "lq" + num(k + 1); };
  auto sk = [](std::size_t k) { return "sk" + num(k + 1); };
  auto sy = [](std::size_t c) { return "sy" + num(c + 1); };

  // Coordinate threads and the auxiliary thread (everything before its
  // final acq(X), rel(X), rel(Y)).
  std::vector<std::string> names;
  std::vector<std::vector<Step>> programs;
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<Step> p;
    for (std::size_t i = 0; i < n; ++i) {
      if (!zs[i][k]) {
        p.push_back({Step::Sync, sk(k)});
        p.push_back({Step::Sync, sk(k)});
      } else {
        p.push_back({Step::Acq, lk(k)});
        p.push_back({Step::Sync, sk(k)});
        p.push_back({Step::Acq, lq(k)});
        p.push_back({Step::Rel, lk(k)});
        p.push_back({Step::Sync, sk(k)});
        p.push_back({Step::Rel, lq(k)});
      }
    }
    names.push_back("tk" + num(k + 1));
    programs.push_back(std::move(p));
  }
  {
    std::vector<Step> p;
    for (std::size_t k = 0; k < d; ++k) p.push_back({Step::Sync, sk(k)});
    for (std::size_t c = 0; c < n; ++c) p.push_back({Step::Sync, sy(c)});
    for (std::size_t round = 0; round + 1 < n; ++round) {
      p.push_back({Step::Acq, "Y"});
      for (int twice = 0; twice < 2; ++twice)
        for (std::size_t k = 0; k < d; ++k) p.push_back({Step::Sync, sk(k)});
      p.push_back({Step::Rel, "Y"});
    }
    p.push_back({Step::Acq, "Y"});
    for (std::size_t k = 0; k < d; ++k) p.push_back({Step::Sync, sk(k)});
    names.push_back("aux");
    programs.push_back(std::move(p));
  }
  const std::size_t aux = d;

  // The j-th sync on sk(k) (0-based) belongs to tk: j = 0, then pairs
  // alternate aux, tk, aux, ... so the last one is tk's again.
  auto owner = [&](std::size_t j, std::size_t k) {
    if (j == 0) return k;
    return ((j - 1) / 2) % 2 == 0 ? aux : k;
  };

  TraceBuilder b;
  std::vector<std::size_t> pc(programs.size(), 0);
  std::vector<std::size_t> syncs_done(d, 0);
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t t = 0; t < programs.size(); ++t) {
      while (pc[t] < programs[t].size()) {
        const Step& s = programs[t][pc[t]];
        if (s.kind == Step::Sync && s.lock[1] == 'k') {
          std::size_t k = std::stoul(s.lock.substr(2)) - 1;
          if (owner(syncs_done[k], k) != t) break;
          ++syncs_done[k];
        }
        if (s.kind == Step::Acq) b.acquire(names[t], s.lock);
        else if (s.kind == Step::Rel) b.release(names[t], s.lock);
        else sync(b, names[t], s.lock);
        ++pc[t];
        progress = true;
      }
    }
  }
  for (std::size_t t = 0; t < programs.size(); ++t)
    if (pc[t] != programs[t].size()) throw std::logic_error("OV3 schedule got stuck");

  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t k = 0; k < d; ++k)
      if (xs[a][k]) critical_section(b, "tx" + num(a + 1), lk(k));
  for (std::size_t c = 0; c < n; ++c) {
    const std::string t = "ty" + num(c + 1);
    sync(b, t, sy(c));
    for (std::size_t k = 0; k < d; ++k)
      if (ys[c][k]) critical_section(b, t, lq(k));
  }
  for (std::size_t a = 0; a < n; ++a) {
    const std::string t = "tx" + num(a + 1);
    b.acquire(t, "X").write(t, "z").release(t, "X");
  }
  b.acquire("aux", "X").release("aux", "X").release("aux", "Y");
  for (std::size_t c = 0; c < n; ++c) {
    const std::string t = "ty" + num(c + 1);
    b.acquire(t, "Y").read(t, "z").release(t, "Y");
  }
  return std::move(b).build();
}

Trace gen_ov_to_lockcover(const OvInstance& inst) {
  require_parts(inst, 2);
  TraceBuilder b;
  for (std::size_t p = 0; p < 2; ++p) {
    const std::string t = "t" + num(p + 1);
    for (const auto& v : inst.parts[p]) {
      for (std::size_t k = 0; k < inst.dim; ++k)
        if (v[k]) b.acquire(t, "l" + num(k + 1));
      b.write(t, "x");
      for (std::size_t k = inst.dim; k-- > 0;)
        if (v[k]) b.release(t, "l" + num(k + 1));
    }
  }
  return std::move(b).build();
}

Trace gen_hs_to_lockset(const HsInstance& inst) {
  const std::size_t n = inst.n();
  const std::size_t d = inst.dim;
  if (inst.ys.size() != n) throw std::invalid_argument("X and Y must have the same size");
  for (const auto* part : {&inst.xs, &inst.ys})
    for (const auto& v : *part)
      if (v.size() != d) throw std::invalid_argument("vector dimension mismatch");

  TraceBuilder b;
  for (std::size_t j = 0; j < d; ++j) {
    const std::string t = "t" + num(j + 1);
    for (std::size_t i = 0; i < n; ++i)
      if (!inst.ys[i][j]) b.acquire(t, "l" + num(i + 1));
    for (std::size_t k = 0; k < n; ++k)
      if (inst.xs[k][j]) b.write(t, "z" + num(k + 1));
    for (std::size_t i = n; i-- > 0;)
      if (!inst.ys[i][j]) b.release(t, "l" + num(i + 1));
  }
  for (std::size_t i = 0; i < n; ++i) b.acquire("t0", "l" + num(i + 1));
  for (std::size_t k = 0; k < n; ++k) b.write("t0", "z" + num(k + 1));
  for (std::size_t i = n; i-- > 0;) b.release("t0", "l" + num(i + 1));
  return std::move(b).build();
}

Trace gen_random_trace(const RandomTraceParams& params) {
  if (params.threads == 0 || params.vars == 0)
    throw std::invalid_argument("random traces need at least one thread and one variable");
  std::mt19937_64 rng(params.seed);
  // Fixed arithmetic on raw draws so output does not depend on the standard
  // library's distribution implementations.
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  std::vector<std::vector<std::size_t>> held(params.threads);
  std::vector<std::size_t> free_locks(params.locks);
  for (std::size_t l = 0; l < params.locks; ++l) free_locks[l] = l;

  TraceBuilder b;
  while (b.size() < params.events) {
    std::size_t t = below(params.threads);
    const std::string tn = "t" + num(t);
    auto& mine = held[t];
    if (params.locks > 0 && unit() < params.acquire_prob) {
      bool release = !mine.empty() && (free_locks.empty() || unit() < 0.5);
      if (release) {
        std::size_t l = mine.back();
        mine.pop_back();
        free_locks.push_back(l);
        b.release(tn, "l" + num(l));
        continue;
      }
      if (!free_locks.empty()) {
        std::size_t at = below(free_locks.size());
        std::size_t l = free_locks[at];
        free_locks[at] = free_locks.back();
        free_locks.pop_back();
        mine.push_back(l);
        b.acquire(tn, "l" + num(l));
        continue;
      }
    }
    std::size_t x = below(params.vars);
    if (unit() < 0.5) b.write(tn, "x" + num(x));
    else b.read(tn, "x" + num(x));
  }
  return std::move(b).build();
}

}  // namespace racelab
