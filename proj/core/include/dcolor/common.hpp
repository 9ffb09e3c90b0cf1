#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dcolor {

using NodeId = std::uint32_t;
using Color = std::uint32_t;
__extension__ using UInt128 = unsigned __int128;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// An input (graph, instance, decomposition) breaks a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A run-time invariant of the algorithm failed. Always fatal.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class BandwidthViolation : public Error {
 public:
  using Error::Error;
};

class RoundCapExceeded : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration was asked to visit more seeds than allowed.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// ceil(log2(x)) for x >= 1; 0 for x <= 1.
constexpr int ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return static_cast<int>(std::bit_width(x - 1));
}

/// Number of bits needed to write values in [0, max_value].
constexpr int bits_for(std::uint64_t max_value) {
  return max_value == 0 ? 0 : static_cast<int>(std::bit_width(max_value));
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvariantViolation(what);
}

}  // namespace dcolor
