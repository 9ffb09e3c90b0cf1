#include "dcolor/rational.hpp"

#include <stdexcept>

#include "dcolor/common.hpp"

namespace dcolor {

Rational make_rational(std::int64_t num, std::int64_t den) {
  Rational q(BigInt(static_cast<long>(num)), BigInt(static_cast<long>(den)));
  q.canonicalize();
  return q;
}

BigInt to_bigint(UInt128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  BigInt r(static_cast<unsigned long>(hi));
  r <<= 64;
  r += BigInt(static_cast<unsigned long>(lo));
  return r;
}

Rational ratio(UInt128 num, UInt128 den) {
  Rational q(to_bigint(num), to_bigint(den));
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw ParseError("bad rational: " + text);
  q.canonicalize();
  return q;
}

namespace {

std::vector<std::uint8_t> magnitude_bytes(const BigInt& z) {
  std::size_t count = 0;
  std::vector<std::uint8_t> bytes((mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8 + 1);
  mpz_export(bytes.data(), &count, 1, 1, 1, 0, z.get_mpz_t());
  bytes.resize(count);
  return bytes;
}

}  // namespace

void append_rational(std::vector<std::uint8_t>& out, const Rational& q) {
  const auto num = magnitude_bytes(q.get_num());
  const auto den = magnitude_bytes(q.get_den());
  if (num.size() > 127 || den.size() > 255) throw Error("rational too large for wire encoding");
  const auto sign = static_cast<std::uint8_t>(sgn(q) < 0 ? 0x80 : 0);
  out.push_back(static_cast<std::uint8_t>(num.size()) | sign);
  out.insert(out.end(), num.begin(), num.end());
  out.push_back(static_cast<std::uint8_t>(den.size()));
  out.insert(out.end(), den.begin(), den.end());
}

Rational read_rational(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  auto read_mag = [&](std::size_t len) {
    if (pos + len > in.size()) throw ParseError("truncated rational");
    BigInt z;
    if (len > 0) mpz_import(z.get_mpz_t(), len, 1, 1, 1, 0, in.data() + pos);
    pos += len;
    return z;
  };
  if (pos >= in.size()) throw ParseError("truncated rational");
  const std::uint8_t head = in[pos++];
  BigInt num = read_mag(head & 0x7f);
  if (head & 0x80) num = -num;
  if (pos >= in.size()) throw ParseError("truncated rational");
  const std::uint8_t dlen = in[pos++];
  BigInt den = read_mag(dlen);
  if (den == 0) throw ParseError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace dcolor
