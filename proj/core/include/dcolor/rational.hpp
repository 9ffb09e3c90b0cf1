#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "dcolor/common.hpp"

namespace dcolor {

/// Exact arbitrary-precision fraction. Always kept in canonical form.
using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(std::int64_t num, std::int64_t den = 1);
BigInt to_bigint(UInt128 v);
Rational ratio(UInt128 num, UInt128 den);

/// Renders as "num/den" (denominator always present, e.g. "2/1").
std::string to_string(const Rational& q);
Rational parse_rational(const std::string& text);

/// Byte encoding used for rationals on the wire: for numerator and
/// denominator, a one-byte length followed by big-endian magnitude bytes.
/// The numerator length byte carries the sign in its top bit.
void append_rational(std::vector<std::uint8_t>& out, const Rational& q);
Rational read_rational(const std::vector<std::uint8_t>& in, std::size_t& pos);

}  // namespace dcolor
