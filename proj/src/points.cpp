#include "polylat/points.hpp"

#include <bit>
#include <stdexcept>

#include "polylat/kernel.hpp"

namespace polylat {

void RuleSpec::validate() const {
  if (s < 1) throw std::invalid_argument("dimension s must be >= 1");
  if (mprime < 1 || mprime > kMaxModulusDegree) throw std::invalid_argument("modulus degree m' must be in [1, 40]");
  if (m < 0 || m > mprime) throw std::invalid_argument("need 0 <= m <= m'");
  if (modulus.degree() != mprime) throw std::invalid_argument("deg(p) must equal m'");
  if (!is_irreducible(modulus)) throw std::invalid_argument("modulus " + modulus.to_hex() + " is not irreducible");
  if (generators.size() != static_cast<std::size_t>(s)) throw std::invalid_argument("need exactly s generators");
  for (F2Poly q : generators) {
    if (!(q.degree() < mprime)) throw std::invalid_argument("generator " + q.to_hex() + " has degree >= m'");
  }
  if (alpha < 2 || alpha > kMaxAlpha) throw std::invalid_argument("alpha out of range");
  if (weights.dimension() != s) throw std::invalid_argument("weight dimension must equal s");
}

PointSet::PointSet(std::size_t count, int dimension, int precision)
    : count_(count), dimension_(dimension), precision_(precision) {
  if (dimension < 0 || precision < 0 || precision > kMaxPrecision) throw std::invalid_argument("bad point set shape");
  data_.assign(count * static_cast<std::size_t>(dimension), 0);
}

void PointSet::values(std::size_t n, std::span<real> out) const {
  for (int j = 0; j < dimension_; ++j) out[static_cast<std::size_t>(j)] = value(n, j);
}

DyadicPoint PointSet::point(std::size_t n) const {
  const auto r = row(n);
  return {std::vector<std::uint64_t>(r.begin(), r.end()), precision_};
}

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t r) {
  SplitMix64 g(master);
  std::uint64_t v = g.next();
  for (std::uint64_t i = 0; i < r; ++i) v = g.next();
  return v;
}

namespace {

void check_precision(int precision) {
  if (precision < 1 || precision > kMaxPrecision) throw std::invalid_argument("shift precision must be in [1, 62]");
}

}  // namespace

ShiftVector draw_shift(int s, std::uint64_t seed, int precision) {
  check_precision(precision);
  ShiftVector sigma{{}, precision, seed};
  SplitMix64 g(seed);
  for (int j = 0; j < s; ++j) sigma.numerators.push_back(g.next() >> (64 - precision));
  return sigma;
}

ShiftVector zero_shift(int s, int precision) {
  check_precision(precision);
  return {std::vector<std::uint64_t>(static_cast<std::size_t>(s), 0), precision, 0};
}

std::uint64_t lattice_coordinate(F2Poly q, F2Poly p, int mprime, std::uint64_t n) {
  return laurent_numerator(mul_mod(F2Poly(n), q, p), p, mprime);
}

DyadicPoint generate_point(const RuleSpec& rule, std::uint64_t n) {
  if (rule.m >= 64 || (n >> rule.m) != 0) throw std::out_of_range("point index outside [0, 2^m)");
  DyadicPoint x{{}, rule.mprime};
  for (F2Poly q : rule.generators) x.numerators.push_back(lattice_coordinate(q, rule.modulus, rule.mprime, n));
  return x;
}

std::vector<std::uint64_t> generate_column(F2Poly q, F2Poly p, int m, int mprime) {
  if (m < 0 || m > mprime || m > 40) throw std::invalid_argument("need 0 <= m <= m'");
  const std::size_t count = std::size_t{1} << m;
  std::vector<std::uint64_t> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = lattice_coordinate(q, p, mprime, std::uint64_t{1} << i);
  std::vector<std::uint64_t> col(count, 0);
  for (std::size_t n = 1; n < count; ++n) {
    col[n] = col[n & (n - 1)] ^ basis[static_cast<std::size_t>(std::countr_zero(n))];
  }
  return col;
}

PointSet generate_point_set(const RuleSpec& rule) {
  rule.validate();
  PointSet ps(std::size_t{1} << rule.m, rule.s, rule.mprime);
  for (int j = 0; j < rule.s; ++j) {
    const auto col = generate_column(rule.generators[static_cast<std::size_t>(j)], rule.modulus, rule.m, rule.mprime);
    for (std::size_t n = 0; n < col.size(); ++n) ps.numerator(n, j) = col[n];
  }
  return ps;
}

Dyadic digital_shift(Dyadic x, Dyadic sigma) {
  if (sigma.precision < x.precision) throw std::invalid_argument("shift precision below point precision");
  return {(x.numerator << (sigma.precision - x.precision)) ^ sigma.numerator, sigma.precision};
}

PointSet digital_shift(const PointSet& points, const ShiftVector& sigma) {
  if (sigma.numerators.size() != static_cast<std::size_t>(points.dimension())) {
    throw std::invalid_argument("shift dimension differs from point dimension");
  }
  if (sigma.precision < points.precision()) throw std::invalid_argument("shift precision below point precision");
  const int widen = sigma.precision - points.precision();
  PointSet out(points.size(), points.dimension(), sigma.precision);
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int j = 0; j < points.dimension(); ++j) {
      out.numerator(n, j) = (points.numerator(n, j) << widen) ^ sigma.numerators[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

namespace {

std::uint64_t fold(std::uint64_t y, int precision) {
  const std::uint64_t half = std::uint64_t{1} << (precision - 1);
  return y < half ? 2 * y : (std::uint64_t{1} << (precision + 1)) - 2 * y;
}

}  // namespace

Dyadic tent_transform(Dyadic x) {
  if (x.precision < 1 || x.precision > kMaxPrecision || (x.numerator >> x.precision) != 0) {
    throw std::invalid_argument("tent transform needs x in [0, 1) with precision in [1, 62]");
  }
  return {fold(x.numerator, x.precision), x.precision};
}

PointSet tent_transform(const PointSet& points) {
  if (points.precision() < 1) throw std::invalid_argument("tent transform needs precision >= 1");
  PointSet out = points;
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int j = 0; j < points.dimension(); ++j) out.numerator(n, j) = fold(points.numerator(n, j), points.precision());
  }
  return out;
}

PointSet randomize(const PointSet& raw, const ShiftVector& sigma) { return tent_transform(digital_shift(raw, sigma)); }

RandomizedPointSet randomize(const RuleSpec& rule, std::uint64_t seed, int precision) {
  ShiftVector sigma = draw_shift(rule.s, seed, precision);
  PointSet z = randomize(generate_point_set(rule), sigma);
  return {std::move(z), std::move(sigma)};
}

}  // namespace polylat
