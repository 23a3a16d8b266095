#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polylat/numeric.hpp"

namespace polylat {

/// Largest number of fractional bits a dyadic coordinate may carry. One bit
/// of headroom is kept so the folded value 1 = 2^P / 2^P is representable.
inline constexpr int kMaxPrecision = 62;

/// Exact dyadic rational numerator / 2^precision in [0, 1].
struct Dyadic {
  std::uint64_t numerator = 0;
  int precision = 0;

  real value() const { return std::ldexp(static_cast<real>(numerator), -precision); }
  double to_double() const { return static_cast<double>(value()); }

  /// Binary digit xi_i (1-indexed) of the expansion; zero past `precision`.
  int digit(int i) const {
    if (i < 1 || i > precision) return 0;
    return static_cast<int>((numerator >> (precision - i)) & 1U);
  }

  /// Same value at a finer precision (zero-padded digits).
  Dyadic widened(int new_precision) const {
    if (new_precision < precision || new_precision > kMaxPrecision) {
      throw std::invalid_argument("cannot widen dyadic to the requested precision");
    }
    return {numerator << (new_precision - precision), new_precision};
  }

  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

/// One point of a point set: s dyadic coordinates sharing one precision.
struct DyadicPoint {
  std::vector<std::uint64_t> numerators;
  int precision = 0;

  std::size_t dimension() const { return numerators.size(); }
  Dyadic coordinate(std::size_t j) const { return {numerators.at(j), precision}; }
  real value(std::size_t j) const { return coordinate(j).value(); }

  friend bool operator==(const DyadicPoint&, const DyadicPoint&) = default;
};

}  // namespace polylat
