#include "dcolor/coins.hpp"

#include <algorithm>
#include <string>

#include "dcolor/common.hpp"

namespace dcolor {

int Seed::bit(const FamilySpec& spec, int j) const {
  return j < spec.m ? static_cast<int>((s1 >> j) & 1u) : static_cast<int>((s2 >> (j - spec.m)) & 1u);
}

void Seed::set_bit(const FamilySpec& spec, int j, int value) {
  FieldElem& half = j < spec.m ? s1 : s2;
  const int pos = j < spec.m ? j : j - spec.m;
  const FieldElem mask = FieldElem{1} << pos;
  half = value ? (half | mask) : (half & ~mask);
}

FamilySpec make_family(std::uint64_t K, int b) {
  if (K < 1) throw ValidationError("make_family: K must be >= 1");
  if (b < 1) throw ValidationError("make_family: b must be >= 1");
  FamilySpec spec;
  spec.a = std::max(1, ceil_log2(K));
  spec.b = b;
  spec.m = std::max(spec.a, b);
  if (spec.m > 63) throw ValidationError("make_family: field degree " + std::to_string(spec.m) + " exceeds 63");
  spec.field = find_irreducible(spec.m);
  return spec;
}

std::uint64_t hash_eval(const FamilySpec& spec, const Seed& seed, std::uint64_t x) {
  const std::uint64_t low = (std::uint64_t{1} << spec.b) - 1;
  return (mul(spec.field, seed.s1, x) ^ seed.s2) & low;
}

std::uint64_t threshold(const Rational& p, int b) {
  if (p < 0 || p > 1) throw Error("threshold: probability outside [0, 1]");
  BigInt scaled = p.get_num();
  scaled <<= b;
  BigInt t;
  mpz_cdiv_q(t.get_mpz_t(), scaled.get_mpz_t(), p.get_den().get_mpz_t());
  return t.get_ui();
}

CoinSpec make_coin(const FamilySpec& spec, std::uint64_t color, const Rational& p) {
  if (spec.a < 64 && (color >> spec.a) != 0) throw Error("make_coin: color does not fit a bits");
  return CoinSpec{color, threshold(p, spec.b), p};
}

int coin_eval(const FamilySpec& spec, const Seed& seed, const CoinSpec& coin) {
  return hash_eval(spec, seed, coin.color) < coin.t ? 1 : 0;
}

std::string seed_to_string(const FamilySpec& spec, const Seed& seed) {
  std::string out;
  out.reserve(spec.seed_len());
  for (int j = 0; j < spec.seed_len(); ++j) out.push_back(seed.bit(spec, j) ? '1' : '0');
  return out;
}

}  // namespace dcolor
