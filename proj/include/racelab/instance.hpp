#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace racelab {

using BitVector = std::vector<std::uint8_t>;  // entries 0 or 1

// k parts of n vectors each, all of dimension dim.
struct OvInstance {
  std::size_t dim = 0;
  std::vector<std::vector<BitVector>> parts;

  std::size_t arity() const { return parts.size(); }
  std::size_t n() const { return parts.empty() ? 0 : parts.front().size(); }
  bool operator==(const OvInstance&) const = default;
};

// Hitting set: is there an x in X sharing a 1 with every y in Y?
struct HsInstance {
  std::size_t dim = 0;
  std::vector<BitVector> xs;
  std::vector<BitVector> ys;

  std::size_t n() const { return xs.size(); }
  bool operator==(const HsInstance&) const = default;
};

using Instance = std::variant<OvInstance, HsInstance>;

// Text form: a header `ov2 n d`, `ov3 n d` or `hs n d`, then one 0/1 string
// per line, parts separated by `--`. Throws std::invalid_argument.
Instance parse_instance(std::string_view text);
std::string write_instance(const OvInstance& inst);
std::string write_instance(const HsInstance& inst);

BitVector parse_bits(std::string_view s);
std::string bits_string(const BitVector& v);

// Lexicographically first solution, 0-based.
std::optional<std::array<std::size_t, 2>> solve_ov2_bruteforce(const OvInstance& inst);
std::optional<std::array<std::size_t, 3>> solve_ov3_bruteforce(const OvInstance& inst);
std::optional<std::size_t> solve_hs_bruteforce(const HsInstance& inst);

// Uniform random bits with P(1) = density. Deterministic in seed.
OvInstance random_ov_instance(std::size_t arity, std::size_t n, std::size_t dim, double density,
                              std::uint64_t seed);
HsInstance random_hs_instance(std::size_t n, std::size_t dim, double density, std::uint64_t seed);

}  // namespace racelab
