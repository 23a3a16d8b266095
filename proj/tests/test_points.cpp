#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "polylat/points.hpp"

using namespace polylat;

namespace {

RuleSpec one_dim_rule() {
  RuleSpec r;
  r.s = 1;
  r.m = 2;
  r.mprime = 2;
  r.modulus = F2Poly(0b111);
  r.generators = {F2Poly::one()};
  r.weights = WeightModel::product({1.0});
  return r;
}

RuleSpec random_rule(std::mt19937_64& rng, int s, int m, int mprime) {
  RuleSpec r;
  r.s = s;
  r.m = m;
  r.mprime = mprime;
  r.modulus = find_irreducible(mprime);
  for (int j = 0; j < s; ++j) r.generators.push_back(F2Poly(rng() & ((std::uint64_t{1} << mprime) - 1)));
  r.weights = WeightModel::product(std::vector<double>(static_cast<std::size_t>(s), 1.0));
  return r;
}

// Reference splitmix64 step.
std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TEST_CASE("the one-dimensional example") {
  const RuleSpec r = one_dim_rule();
  const PointSet pts = generate_point_set(r);
  REQUIRE(pts.size() == 4);
  CHECK(pts.value(0, 0) == 0.0L);
  CHECK(pts.value(1, 0) == 0.25L);
  CHECK(pts.value(2, 0) == 0.75L);
  CHECK(pts.value(3, 0) == 0.5L);
  CHECK(generate_point(r, 1).numerators == std::vector<std::uint64_t>{1});
  CHECK_THROWS(generate_point(r, 4));
}

TEST_CASE("degenerate rules") {
  RuleSpec r = one_dim_rule();
  r.m = 0;
  const PointSet single = generate_point_set(r);
  CHECK(single.size() == 1);
  CHECK(single.numerator(0, 0) == 0);

  std::mt19937_64 rng(5);
  RuleSpec z = random_rule(rng, 3, 4, 5);
  z.generators.assign(3, F2Poly::zero());
  const PointSet pts = generate_point_set(z);
  for (std::size_t n = 0; n < pts.size(); ++n) {
    for (int j = 0; j < 3; ++j) CHECK(pts.numerator(n, j) == 0);
  }
}

TEST_CASE("points match the per-point Laurent oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int mprime = 1 + static_cast<int>(rng() % 12);
    const int m = static_cast<int>(rng() % static_cast<unsigned>(mprime + 1));
    const RuleSpec r = random_rule(rng, 3, m, mprime);
    const PointSet pts = generate_point_set(r);
    CHECK(pts.precision() == mprime);
    for (std::size_t n = 0; n < pts.size(); ++n) {
      for (int j = 0; j < 3; ++j) {
        const auto q = r.generators[static_cast<std::size_t>(j)].bits();
        CHECK(pts.numerator(n, j) == oracle::laurent(oracle::mul(n, q), r.modulus.bits(), mprime));
        CHECK(pts.numerator(n, j) == lattice_coordinate(r.generators[static_cast<std::size_t>(j)], r.modulus, mprime, n));
      }
    }
  }
}

TEST_CASE("the raw point set is closed under XOR") {
  std::mt19937_64 rng(7);
  for (int m = 1; m <= 8; ++m) {
    const RuleSpec r = random_rule(rng, 2, m, m + 2);
    const PointSet pts = generate_point_set(r);
    std::set<std::vector<std::uint64_t>> rows;
    for (std::size_t n = 0; n < pts.size(); ++n) rows.insert({pts.row(n).begin(), pts.row(n).end()});
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = 0; b < pts.size(); ++b) {
        CHECK(rows.count({pts.numerator(a, 0) ^ pts.numerator(b, 0), pts.numerator(a, 1) ^ pts.numerator(b, 1)}) == 1);
      }
    }
  }
}

TEST_CASE("nonzero generator gives distinct first coordinates") {
  std::mt19937_64 rng(8);
  for (int m = 1; m <= 10; ++m) {
    RuleSpec r = random_rule(rng, 1, m, m + static_cast<int>(rng() % 4));
    if (r.generators[0].is_zero()) r.generators[0] = F2Poly::one();
    const PointSet pts = generate_point_set(r);
    std::set<std::uint64_t> seen;
    for (std::size_t n = 0; n < pts.size(); ++n) seen.insert(pts.numerator(n, 0));
    CHECK(seen.size() == pts.size());
  }
}

TEST_CASE("digital shift") {
  CHECK(digital_shift(Dyadic{1, 2}, Dyadic{3, 2}) == Dyadic{2, 2});  // 0.25 xor 0.75 = 0.5
  CHECK(digital_shift(Dyadic{5, 3}, Dyadic{0, 10}) == Dyadic{5 << 7, 10});
  CHECK(digital_shift(Dyadic{5, 3}, Dyadic{5 << 7, 10}).numerator == 0);
  CHECK_THROWS(digital_shift(Dyadic{5, 10}, Dyadic{1, 3}));
}

TEST_CASE("tent transform") {
  CHECK(tent_transform(Dyadic{0, 4}).value() == 0.0L);
  CHECK(tent_transform(Dyadic{3, 2}).value() == 0.5L);
  CHECK(tent_transform(Dyadic{1, 1}).value() == 1.0L);
  for (int prec = 1; prec <= 10; ++prec) {
    const std::uint64_t top = std::uint64_t{1} << prec;
    for (std::uint64_t l = 1; l < top; ++l) {
      const Dyadic y = tent_transform(Dyadic{l, prec});
      CHECK(y.precision == prec);
      CHECK(y.value() == 1 - std::fabs(2 * Dyadic{l, prec}.value() - 1));
      CHECK(y == tent_transform(Dyadic{top - l, prec}));
    }
  }
}

TEST_CASE("splitmix64 and shift reproducibility") {
  std::uint64_t state = 1234567;
  SplitMix64 g(1234567);
  for (int i = 0; i < 100; ++i) CHECK(g.next() == splitmix(state));
  {
    std::uint64_t st = 1234567;
    CHECK(splitmix(st) == 6457827717110365317ULL);
  }
  std::uint64_t st = 99;
  for (std::uint64_t r = 0; r < 10; ++r) CHECK(replicate_seed(99, r) == splitmix(st));

  const ShiftVector a = draw_shift(4, 2024, 53);
  CHECK(a == draw_shift(4, 2024, 53));
  CHECK(a.seed == 2024);
  std::uint64_t s2 = 2024;
  for (int j = 0; j < 4; ++j) CHECK(a.numerators[static_cast<std::size_t>(j)] == splitmix(s2) >> 11);
  CHECK(zero_shift(3).numerators == std::vector<std::uint64_t>(3, 0));
}

TEST_CASE("raising the shift precision keeps the leading digits") {
  std::mt19937_64 rng(9);
  const RuleSpec r = random_rule(rng, 2, 5, 7);
  const PointSet lo = randomize(generate_point_set(r), draw_shift(2, 3, 20));
  const PointSet hi = randomize(generate_point_set(r), draw_shift(2, 3, 40));
  for (std::size_t n = 0; n < lo.size(); ++n) {
    for (int j = 0; j < 2; ++j) {
      // The shifts share leading bits, so the shifted values do too; fold
      // doubles, so compare before folding.
      const auto xs_lo = digital_shift(generate_point_set(r), draw_shift(2, 3, 20));
      const auto xs_hi = digital_shift(generate_point_set(r), draw_shift(2, 3, 40));
      CHECK((xs_lo.numerator(n, j) >> (20 - 7)) == (xs_hi.numerator(n, j) >> (40 - 7)));
      CHECK(std::fabs(lo.value(n, j) - hi.value(n, j)) <= std::ldexp(1.0L, -19));
    }
  }
}

TEST_CASE("randomize") {
  std::mt19937_64 rng(10);
  const RuleSpec r = random_rule(rng, 3, 6, 6);
  const auto a = randomize(r, 77);
  const auto b = randomize(r, 77);
  CHECK(a.points == b.points);
  CHECK(a.shift.seed == 77);
  CHECK(randomize(generate_point_set(r), zero_shift(3)) ==
        tent_transform(digital_shift(generate_point_set(r), zero_shift(3))));
  real total = 0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto z = randomize(r, seed);
    for (std::size_t n = 0; n < z.points.size(); ++n) {
      for (int j = 0; j < 3; ++j) {
        const real v = z.points.value(n, j);
        CHECK(v >= 0);
        CHECK(v <= 1);
        total += v;
        ++count;
      }
    }
  }
  // Per seed the shifted net is uniform within each coordinate; 200 seeds
  // leave a standard error of about 1/sqrt(12 * 600).
  CHECK(std::fabs(total / static_cast<real>(count) - 0.5L) < 0.02L);
}

TEST_CASE("rule validation") {
  RuleSpec r = one_dim_rule();
  CHECK_NOTHROW(r.validate());
  RuleSpec bad = r;
  bad.modulus = F2Poly(0b101);
  CHECK_THROWS(bad.validate());
  bad = r;
  bad.generators = {F2Poly(0b100)};
  CHECK_THROWS(bad.validate());
  bad = r;
  bad.m = 3;
  CHECK_THROWS(bad.validate());
  bad = r;
  bad.generators.push_back(F2Poly::one());
  CHECK_THROWS(bad.validate());
}
