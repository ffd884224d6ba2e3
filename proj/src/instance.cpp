#include "racelab/instance.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

namespace racelab {

BitVector parse_bits(std::string_view s) {
  BitVector v;
  v.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("vector must be a 0/1 string");
    v.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return v;
}

std::string bits_string(const BitVector& v) {
  std::string s;
  s.reserve(v.size());
  for (auto b : v) s += static_cast<char>('0' + b);
  return s;
}

Instance parse_instance(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw std::invalid_argument("empty instance");

  std::istringstream header(lines.front());
  std::string kind;
  long long n = -1, d = -1;
  std::string extra;
  if (!(header >> kind >> n >> d) || (header >> extra))
    throw std::invalid_argument("instance header must be '<kind> <n> <d>'");
  std::size_t arity;
  if (kind == "ov2") arity = 2;
  else if (kind == "ov3") arity = 3;
  else if (kind == "hs") arity = 2;
  else throw std::invalid_argument("unknown instance kind " + kind);
  if (n < 1 || d < 1) throw std::invalid_argument("n and d must be positive");

  std::vector<std::vector<BitVector>> parts(1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i] == "--") {
      parts.emplace_back();
      continue;
    }
    BitVector v = parse_bits(lines[i]);
    if (v.size() != static_cast<std::size_t>(d))
      throw std::invalid_argument("vector on line " + std::to_string(i + 1) + " has wrong length");
    parts.back().push_back(std::move(v));
  }
  if (parts.size() != arity) throw std::invalid_argument("wrong number of parts for " + kind);
  for (const auto& p : parts)
    if (p.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("each part must hold n vectors");

  if (kind == "hs") return HsInstance{static_cast<std::size_t>(d), parts[0], parts[1]};
  return OvInstance{static_cast<std::size_t>(d), std::move(parts)};
}

namespace {

std::string write_parts(const std::string& kind, std::size_t n, std::size_t d,
                        const std::vector<const std::vector<BitVector>*>& parts) {
  std::string out = kind + " " + std::to_string(n) + " " + std::to_string(d) + "\n";
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (p > 0) out += "--\n";
    for (const auto& v : *parts[p]) out += bits_string(v) + "\n";
  }
  return out;
}

bool orthogonal(const BitVector& a, const BitVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

}  // namespace

std::string write_instance(const OvInstance& inst) {
  std::vector<const std::vector<BitVector>*> parts;
  for (const auto& p : inst.parts) parts.push_back(&p);
  return write_parts("ov" + std::to_string(inst.arity()), inst.n(), inst.dim, parts);
}

std::string write_instance(const HsInstance& inst) {
  return write_parts("hs", inst.n(), inst.dim, {&inst.xs, &inst.ys});
}

std::optional<std::array<std::size_t, 2>> solve_ov2_bruteforce(const OvInstance& inst) {
  if (inst.arity() != 2) throw std::invalid_argument("expected an OV instance with two parts");
  const auto& a = inst.parts[0];
  const auto& b = inst.parts[1];
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (orthogonal(a[i], b[j])) return std::array<std::size_t, 2>{i, j};
  return std::nullopt;
}

std::optional<std::array<std::size_t, 3>> solve_ov3_bruteforce(const OvInstance& inst) {
  if (inst.arity() != 3) throw std::invalid_argument("expected an OV instance with three parts");
  const auto& a = inst.parts[0];
  const auto& b = inst.parts[1];
  const auto& c = inst.parts[2];
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t k = 0; k < c.size(); ++k) {
        bool zero = true;
        for (std::size_t t = 0; t < inst.dim && zero; ++t)
          if (a[i][t] && b[j][t] && c[k][t]) zero = false;
        if (zero) return std::array<std::size_t, 3>{i, j, k};
      }
  return std::nullopt;
}

std::optional<std::size_t> solve_hs_bruteforce(const HsInstance& inst) {
  for (std::size_t i = 0; i < inst.xs.size(); ++i) {
    bool hits_all = true;
    for (const auto& y : inst.ys)
      if (orthogonal(inst.xs[i], y)) {
        hits_all = false;
        break;
      }
    if (hits_all) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<BitVector> random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                                      double density) {
  std::bernoulli_distribution coin(density);
  std::vector<BitVector> out(n, BitVector(dim));
  for (auto& v : out)
    for (auto& b : v) b = coin(rng) ? 1 : 0;
  return out;
}

}  // namespace

OvInstance random_ov_instance(std::size_t arity, std::size_t n, std::size_t dim, double density,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  OvInstance inst{dim, {}};
  for (std::size_t p = 0; p < arity; ++p) inst.parts.push_back(random_vectors(rng, n, dim, density));
  return inst;
}

HsInstance random_hs_instance(std::size_t n, std::size_t dim, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  HsInstance inst{dim, random_vectors(rng, n, dim, density), {}};
  inst.ys = random_vectors(rng, n, dim, density);
  return inst;
}

}  // namespace racelab
