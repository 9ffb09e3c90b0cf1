#pragma once

#include <cstdint>

#include "dcolor/gf2m.hpp"
#include "dcolor/rational.hpp"

namespace dcolor {

/// Pairwise independent family h(x) = low b bits of (s1*x + s2) in GF(2^m).
struct FamilySpec {
  int a = 1;  // input bits
  int b = 1;  // output bits
  int m = 1;  // max(a, b)
  FieldSpec field;

  int seed_len() const { return 2 * m; }
  std::uint64_t range() const { return std::uint64_t{1} << b; }
};

/// Seed bit j is bit j of s1 for j < m and bit (j - m) of s2 otherwise.
struct Seed {
  FieldElem s1 = 0;
  FieldElem s2 = 0;

  int bit(const FamilySpec& spec, int j) const;
  void set_bit(const FamilySpec& spec, int j, int value);
  bool operator==(const Seed&) const = default;
};

struct CoinSpec {
  std::uint64_t color = 0;  // psi(v), an a-bit field element
  std::uint64_t t = 0;      // threshold in [0, 2^b]
  Rational p;
};

/// a = max(1, ceil(log2 K)), m = max(a, b). Throws ValidationError if m > 63.
FamilySpec make_family(std::uint64_t K, int b);

std::uint64_t hash_eval(const FamilySpec& spec, const Seed& seed, std::uint64_t x);

/// ceil(p * 2^b).
std::uint64_t threshold(const Rational& p, int b);

CoinSpec make_coin(const FamilySpec& spec, std::uint64_t color, const Rational& p);

int coin_eval(const FamilySpec& spec, const Seed& seed, const CoinSpec& coin);

/// Seed as a bit string in fixing order ("0101...").
std::string seed_to_string(const FamilySpec& spec, const Seed& seed);

}  // namespace dcolor
