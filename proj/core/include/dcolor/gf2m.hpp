#pragma once

#include <cstdint>

namespace dcolor {

/// GF(2^m) given by a degree-m irreducible modulus (bit i = coefficient of x^i).
struct FieldSpec {
  int m = 0;
  std::uint64_t modulus = 0;

  std::uint64_t mask() const { return m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1; }
  bool operator==(const FieldSpec&) const = default;
};

using FieldElem = std::uint64_t;

/// Smallest mask with bits m and 0 set whose polynomial is irreducible.
/// For m >= 2 this is the smallest monic irreducible of degree m; for m = 1
/// it is x + 1. Requires 1 <= m <= 63.
FieldSpec find_irreducible(int m);

/// Rabin/Ben-Or irreducibility test for a polynomial of degree 1..63.
bool is_irreducible(std::uint64_t poly);

/// Carry-less product reduced modulo spec.modulus.
FieldElem mul(const FieldSpec& spec, FieldElem a, FieldElem b);

inline FieldElem add(FieldElem a, FieldElem b) { return a ^ b; }

namespace poly {
int degree(std::uint64_t p);
/// Remainder of a divided by b over GF(2); b != 0.
std::uint64_t mod(std::uint64_t a, std::uint64_t b);
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
}  // namespace poly

}  // namespace dcolor
