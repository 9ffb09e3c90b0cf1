#include "dcolor/gf2m.hpp"

#include <bit>
#include <string>

#include "dcolor/common.hpp"

namespace dcolor {

namespace poly {

int degree(std::uint64_t p) { return p == 0 ? -1 : std::bit_width(p) - 1; }

std::uint64_t mod(std::uint64_t a, std::uint64_t b) {
  const int db = degree(b);
  for (int da = degree(a); da >= db; da = degree(a)) a ^= b << (da - db);
  return a;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    a = mod(a, b);
    std::swap(a, b);
  }
  return a;
}

}  // namespace poly

namespace {

// Multiplication modulo an arbitrary degree-m polynomial (no irreducibility needed).
std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t f, int m) {
  std::uint64_t r = 0;
  const std::uint64_t top = std::uint64_t{1} << m;
  while (b != 0) {
    if (b & 1u) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= f;
  }
  return r;
}

}  // namespace

bool is_irreducible(std::uint64_t f) {
  const int m = poly::degree(f);
  if (m < 1 || m > 63) return false;
  if (m == 1) return true;
  if ((f & 1u) == 0) return false;
  // gcd(f, x^(2^i) - x) = 1 for all i <= m/2.
  std::uint64_t power = 0b10;
  for (int i = 1; i <= m / 2; ++i) {
    power = mulmod(power, power, f, m);
    if (poly::gcd(f, power ^ 0b10) != 1) return false;
  }
  return true;
}

FieldSpec find_irreducible(int m) {
  if (m < 1 || m > 63) throw Error("find_irreducible: m must be in [1, 63], got " + std::to_string(m));
  const std::uint64_t top = std::uint64_t{1} << m;
  for (std::uint64_t low = 1; low < top; low += 2) {
    if (is_irreducible(top | low)) return FieldSpec{m, top | low};
  }
  throw InvariantViolation("no irreducible polynomial of degree " + std::to_string(m));
}

FieldElem mul(const FieldSpec& spec, FieldElem a, FieldElem b) { return mulmod(a, b, spec.modulus, spec.m); }

}  // namespace dcolor
