#include <gtest/gtest.h>

#include <random>

#include "dcolor/gf2m.hpp"
#include "oracles.hpp"

using namespace dcolor;

TEST(Irreducible, SmallDegrees) {
  EXPECT_EQ(find_irreducible(1).modulus, 0b11u);
  EXPECT_EQ(find_irreducible(2).modulus, 0b111u);
  EXPECT_EQ(find_irreducible(8).modulus, 0b100011011u);
}

TEST(Irreducible, MatchesTrialDivision) {
  for (std::uint64_t p = 2; p < (1u << 13); ++p) EXPECT_EQ(is_irreducible(p), oracle::trial_irreducible(p)) << p;
}

TEST(Irreducible, SmallestAgreesWithSearch) {
  for (int m = 2; m <= 16; ++m) EXPECT_EQ(find_irreducible(m).modulus, oracle::smallest_irreducible(m)) << m;
}

TEST(Irreducible, LargeDegreesAreIrreducibleAndMonic) {
  for (int m : {20, 31, 32, 47, 63}) {
    const FieldSpec f = find_irreducible(m);
    EXPECT_EQ(f.m, m);
    EXPECT_EQ(poly::degree(f.modulus), m);
    EXPECT_TRUE(f.modulus & 1);
    EXPECT_TRUE(is_irreducible(f.modulus));
  }
}

TEST(Irreducible, RejectsProducts) {
  // (x^2+x+1)(x^3+x+1) and x^4 + x^2 = x^2 (x+1)^2
  EXPECT_FALSE(is_irreducible(0b110001));
  EXPECT_FALSE(is_irreducible(0b10100));
}

TEST(Field, MultiplicationIdentities) {
  const FieldSpec f = find_irreducible(7);
  for (FieldElem a = 0; a < 128; ++a) {
    EXPECT_EQ(mul(f, a, 0), 0u);
    EXPECT_EQ(mul(f, a, 1), a);
  }
}

TEST(Field, Gf4Table) {
  const FieldSpec f = find_irreducible(2);
  // elements 0, 1, x=2, x+1=3
  const FieldElem table[4][4] = {{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  for (FieldElem a = 0; a < 4; ++a)
    for (FieldElem b = 0; b < 4; ++b) EXPECT_EQ(mul(f, a, b), table[a][b]) << a << "*" << b;
}

TEST(Field, AgreesWithSchoolbookProduct) {
  std::mt19937_64 rng(3);
  for (int m : {1, 3, 8, 13, 24, 40, 63}) {
    const FieldSpec f = find_irreducible(m);
    for (int t = 0; t < 500; ++t) {
      const FieldElem a = rng() & f.mask();
      const FieldElem b = rng() & f.mask();
      EXPECT_EQ(mul(f, a, b), oracle::field_mul(a, b, f.modulus, m));
    }
  }
}

TEST(Field, RingLaws) {
  std::mt19937_64 rng(4);
  const FieldSpec f = find_irreducible(11);
  for (int t = 0; t < 1000; ++t) {
    const FieldElem a = rng() & f.mask(), b = rng() & f.mask(), c = rng() & f.mask();
    EXPECT_EQ(mul(f, a, b), mul(f, b, a));
    EXPECT_EQ(mul(f, mul(f, a, b), c), mul(f, a, mul(f, b, c)));
    EXPECT_EQ(mul(f, a, add(b, c)), add(mul(f, a, b), mul(f, a, c)));
  }
}

TEST(Field, EveryNonzeroElementIsInvertible) {
  const FieldSpec f = find_irreducible(6);
  for (FieldElem a = 1; a < 64; ++a) {
    int inverses = 0;
    for (FieldElem b = 1; b < 64; ++b) inverses += mul(f, a, b) == 1;
    EXPECT_EQ(inverses, 1) << a;
  }
}

TEST(Poly, GcdAndMod) {
  // x^3 + 1 = (x + 1)(x^2 + x + 1)
  EXPECT_EQ(poly::mod(0b1001, 0b11), 0u);
  EXPECT_EQ(poly::gcd(0b1001, 0b111), 0b111u);
  EXPECT_EQ(poly::degree(1), 0);
}
