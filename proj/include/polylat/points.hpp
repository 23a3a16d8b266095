#pragma once

// Polynomial lattice point sets over F2 with exact dyadic coordinates, random
// digital shifts and the tent transform.

#include <cstdint>
#include <span>
#include <vector>

#include "polylat/dyadic.hpp"
#include "polylat/f2poly.hpp"
#include "polylat/weights.hpp"

namespace polylat {

inline constexpr int kDefaultShiftPrecision = 53;

/// A higher order polynomial lattice rule: 2^m points, modulus of degree m',
/// one generator per coordinate.
struct RuleSpec {
  int s = 0;
  int m = 0;
  int mprime = 0;
  F2Poly modulus;
  std::vector<F2Poly> generators;
  int alpha = 2;
  WeightModel weights;

  /// Throws std::invalid_argument on: s < 1, m > m', m' outside
  /// [1, kMaxModulusDegree], deg(p) != m', p reducible, generator count != s,
  /// deg(q_j) >= m', alpha outside [2, kMaxAlpha], weight dimension != s.
  void validate() const;
};

/// `size()` points of `dimension()` coordinates stored row-major as dyadic
/// numerators over 2^precision.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t count, int dimension, int precision);

  std::size_t size() const { return count_; }
  int dimension() const { return dimension_; }
  int precision() const { return precision_; }

  std::uint64_t numerator(std::size_t n, int j) const { return data_[n * static_cast<std::size_t>(dimension_) + static_cast<std::size_t>(j)]; }
  std::uint64_t& numerator(std::size_t n, int j) { return data_[n * static_cast<std::size_t>(dimension_) + static_cast<std::size_t>(j)]; }
  std::span<const std::uint64_t> row(std::size_t n) const {
    return {data_.data() + n * static_cast<std::size_t>(dimension_), static_cast<std::size_t>(dimension_)};
  }
  std::span<const std::uint64_t> numerators() const { return data_; }

  real value(std::size_t n, int j) const { return std::ldexp(static_cast<real>(numerator(n, j)), -precision_); }
  /// All coordinates of point n as reals.
  void values(std::size_t n, std::span<real> out) const;
  DyadicPoint point(std::size_t n) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t count_ = 0;
  int dimension_ = 0;
  int precision_ = 0;
  std::vector<std::uint64_t> data_;
};

/// splitmix64: state += 0x9E3779B97F4A7C15, then the output is the state
/// mixed by z = (z ^ z>>30) * 0xBF58476D1CE4E5B9; z = (z ^ z>>27) *
/// 0x94D049BB133111EB; z ^ z>>31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// Seed of replicate r: output number r (0-based) of splitmix64(master).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t r);

/// A digital shift sigma in [0,1)^s at `precision` bits.
struct ShiftVector {
  std::vector<std::uint64_t> numerators;
  int precision = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ShiftVector&, const ShiftVector&) = default;
};

/// sigma_j = top `precision` bits of the j-th output of splitmix64(seed).
ShiftVector draw_shift(int s, std::uint64_t seed, int precision = kDefaultShiftPrecision);
ShiftVector zero_shift(int s, int precision = kDefaultShiftPrecision);

/// v_{m'}(n(x) q_j(x) / p(x)) for every coordinate j. Throws for n >= 2^m.
DyadicPoint generate_point(const RuleSpec& rule, std::uint64_t n);

/// Coordinate j of point n for a single generator q.
std::uint64_t lattice_coordinate(F2Poly q, F2Poly p, int mprime, std::uint64_t n);

/// All 2^m points in order of n. Uses linearity over F2: x_n is the XOR of
/// the basis points x_{2^i} over the set bits of n.
PointSet generate_point_set(const RuleSpec& rule);

/// One coordinate column of the point set for generator q (length 2^m).
std::vector<std::uint64_t> generate_column(F2Poly q, F2Poly p, int m, int mprime);

/// x XOR sigma at sigma's precision (x is zero-extended).
Dyadic digital_shift(Dyadic x, Dyadic sigma);
PointSet digital_shift(const PointSet& points, const ShiftVector& sigma);

/// phi(x) = 1 - |2x - 1| at the same precision; phi(1/2) = 1 exactly.
Dyadic tent_transform(Dyadic x);
PointSet tent_transform(const PointSet& points);

struct RandomizedPointSet {
  PointSet points;
  ShiftVector shift;
};

/// z_n = phi(x_n XOR sigma) with sigma drawn from `seed`.
RandomizedPointSet randomize(const RuleSpec& rule, std::uint64_t seed, int precision = kDefaultShiftPrecision);
PointSet randomize(const PointSet& raw, const ShiftVector& sigma);

}  // namespace polylat
