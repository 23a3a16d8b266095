#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polylat/kernel.hpp"
#include "polylat/kernel_exact.hpp"

using namespace polylat;
using exact::Rational;

TEST_CASE("digit functions") {
  CHECK(sum_of_digits(6) == 2);
  CHECK(sum_of_digits(0) == 0);
  CHECK(sum_of_digits(7) == 3);
  CHECK(in_E(3));
  CHECK_FALSE(in_E(7));
  CHECK(in_E(5));
  CHECK_FALSE(in_E(0));
  CHECK(mu_alpha(2, 6) == 5);
  CHECK(mu_alpha(2, 13) == 7);
  CHECK_THROWS(mu_alpha(2, 0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t k = (rng() >> (rng() % 63)) | 1;
    CHECK(mu_alpha(1, k) == 64 - std::countl_zero(k));
    for (int a = 1; a <= 5; ++a) {
      CHECK(mu_alpha(a, k) == oracle::mu(a, k));
      CHECK(mu_alpha(a, k) <= mu_alpha(a + 1, k));
    }
  }
  for (int j = 0; j < 63; ++j) CHECK(mu_alpha(3, std::uint64_t{1} << j) == j + 1);
}

TEST_CASE("walsh functions") {
  CHECK(walsh(0, Dyadic{5, 3}) == 1);
  CHECK(walsh(1, Dyadic{1, 1}) == -1);
  CHECK(walsh(3, Dyadic{1, 2}) == -1);
  for (int prec = 1; prec <= 8; ++prec) {
    const std::uint64_t top = std::uint64_t{1} << prec;
    for (std::uint64_t k = 0; k < 2 * top; ++k) {
      int sum = 0;
      for (std::uint64_t l = 0; l < top; ++l) {
        const int w = walsh(k, Dyadic{l, prec});
        CHECK(w == oracle::walsh(k, l, prec));
        sum += w;
      }
      // Averages to 1 exactly when k has no digit inside the grid's resolution.
      CHECK(sum == (k % top == 0 ? static_cast<int>(top) : 0));
    }
  }
  const std::uint64_t k[2] = {3, 5};
  const DyadicPoint x{{1, 2}, 2};
  CHECK(walsh(k, x) == walsh(3, Dyadic{1, 2}) * walsh(5, Dyadic{2, 2}));
}

TEST_CASE("smoothness constants") {
  CHECK(exact::c_tau(1) == Rational(1, 2));
  CHECK(exact::c_tilde(2) == Rational(25, 72));
  CHECK(exact::d_alpha(2) == Rational(59, 144));
  CHECK(exact::d_alpha_argmax(2) == 2);
  const auto c = d_alpha(2);
  CHECK(c.d_alpha == doctest::Approx(59.0 / 144).epsilon(1e-15));
  CHECK(c.argmax_nu == 2);
  CHECK_THROWS(d_alpha(1));
  for (int alpha = 2; alpha <= 6; ++alpha) {
    // max over nu by hand, in double
    double best = 0;
    auto ctau = [](int t) { return t == 1 ? 0.5 : std::pow(2.0, -t) * std::pow(5.0 / 3, t - 2); };
    const double ct = std::pow(2.0, -2 * alpha + 1) * std::pow(5.0 / 3, 2 * alpha - 2);
    for (int nu = 1; nu <= alpha; ++nu) {
      double cp = 0;
      for (int t = nu; t <= alpha; ++t) cp += ctau(t) * ctau(t) * std::pow(2.0, -2 * (t - nu));
      best = std::max(best, cp + ct * std::pow(2.0, -2 * (alpha - nu)));
    }
    CHECK(static_cast<double>(d_alpha(alpha).d_alpha) == doctest::Approx(best).epsilon(1e-13));
    CHECK(std::fabs(d_alpha(alpha).d_alpha - exact::to_real(exact::d_alpha(alpha))) < 1e-12L);
  }
}

TEST_CASE("A constants") {
  CHECK(exact::a_lambda_1(2, Rational(4)) == Rational(5, 14));
  CHECK(exact::a_lambda_2(2, Rational(4)) == Rational(8, 21));
  CHECK(std::fabs(a_lambda_1(2, 1.0L) - 5.0L / 14) < 1e-15L);
  CHECK(std::fabs(a_lambda_2(2, 1.0L) - 8.0L / 21) < 1e-15L);
  CHECK_THROWS(a_lambda_1(2, 0.25L));
  CHECK_THROWS(a_lambda_1(2, 1.5L));
  for (int alpha = 2; alpha <= 6; ++alpha) {
    CHECK(std::fabs(a_lambda_1(alpha, 1.0L) - exact::to_real(exact::a_lambda_1(alpha, Rational(4)))) < 1e-12L);
    CHECK(std::fabs(a_lambda_2(alpha, 1.0L) - exact::to_real(exact::a_lambda_2(alpha, Rational(4)))) < 1e-12L);
    CHECK(std::fabs(a_lambda_1(alpha, 0.5L) - exact::to_real(exact::a_lambda_1(alpha, Rational(2)))) < 1e-12L);
    CHECK(std::fabs(a_lambda_2(alpha, 0.5L) - exact::to_real(exact::a_lambda_2(alpha, Rational(2)))) < 1e-12L);
    // growing without bound as lambda approaches 1/(2 alpha)
    const real edge = 1.0L / (2 * alpha);
    CHECK(a_lambda_1(alpha, edge + 1e-6L) > 100 * a_lambda_1(alpha, edge + 0.1L));
  }
}

TEST_CASE("A_{alpha,1,1} is the full series") {
  for (int alpha = 2; alpha <= 4; ++alpha) {
    const int b = 22;
    long double sum = 0;  // 2^21 terms; double accumulation would drift by ~1e-13
    for (std::uint64_t k = 3; k < (std::uint64_t{1} << b); ++k) {
      if (oracle::in_E(k)) sum += std::ldexp(1.0L, -2 * oracle::mu(alpha, k >> 1));
    }
    CHECK(std::fabs(sum - a_lambda_1(alpha, 1.0L)) <= oracle::series_tail(b) + 1e-15);
  }
}

TEST_CASE("omega closed form against the term-by-term series") {
  const int b = 16;
  for (int alpha = 2; alpha <= 4; ++alpha) {
    for (int mp = 1; mp <= 7; ++mp) {
      const OmegaEvaluator omega(alpha, mp);
      for (std::uint64_t l = 0; l < (std::uint64_t{1} << mp); ++l) {
        const double series = oracle::omega_series(alpha, l, mp, b);
        CHECK_MESSAGE(std::fabs(static_cast<double>(omega(l)) - series) <= oracle::series_tail(b) + 1e-12,
                      "alpha " << alpha << " m' " << mp << " l " << l);
      }
    }
  }
}

TEST_CASE("omega examples and properties") {
  CHECK(std::fabs(OmegaEvaluator(2, 5).at_zero() - 5.0L / 14) < 1e-15L);
  CHECK(std::fabs(OmegaEvaluator(2, 5)(0) - 5.0L / 14) < 1e-14L);
  CHECK(std::fabs(omega_alpha(2, Dyadic{1, 1}) + 5.0L / 16) < 1e-14L);
  for (int alpha = 2; alpha <= 4; ++alpha) {
    for (int mp = 2; mp <= 10; ++mp) {
      const OmegaEvaluator omega(alpha, mp);
      CompensatedSum<real> avg;
      for (std::uint64_t l = 0; l < (std::uint64_t{1} << mp); ++l) {
        avg += omega(l);
        // zero-padding the digits changes nothing
        CHECK(std::fabs(omega(l) - omega_alpha(alpha, Dyadic{l << 3, mp + 3})) < 1e-14L);
      }
      // The grid average keeps only k in E that vanish mod 2^{m'}.
      CHECK(std::fabs(avg.value() / std::ldexp(1.0L, mp)) <= oracle::series_tail(mp) + 1e-15);
    }
  }
}

TEST_CASE("series oracle and its tail") {
  const auto single = omega_series_oracle(2, Dyadic{1, 2}, 4);
  CHECK(single.value == 0.25L * walsh(3, Dyadic{1, 2}));
  real prev = omega_series_tail(3, 4);
  for (std::uint64_t k = 8; k <= (std::uint64_t{1} << 30); k *= 2) {
    const real t = omega_series_tail(3, k);
    CHECK(t < prev);
    CHECK(t <= oracle::series_tail(std::bit_width(k) - 1) + 1e-18);
    prev = t;
  }
  const auto grid = omega_series_grid(3, 5, std::uint64_t{1} << 12);
  for (std::uint64_t l = 0; l < 32; ++l) {
    CHECK(std::fabs(grid[l] - omega_series_oracle(3, Dyadic{l, 5}, std::uint64_t{1} << 12).value) < 1e-15L);
  }
}

TEST_CASE("bernoulli polynomials") {
  CHECK(bernoulli(1, 0.5L) == 0);
  CHECK(std::fabs(bernoulli(2, 0) - 1.0L / 6) < 1e-18L);
  CHECK(std::fabs(bernoulli(4, 0.5L) - 7.0L / 240) < 1e-18L);
  CHECK(exact::bernoulli(4, Rational(1, 2)) == Rational(7, 240));
  CHECK(exact::bernoulli_number(1) == Rational(-1, 2));
  CHECK(exact::bernoulli_number(12) == Rational(-691, 2730));
  for (int tau = 0; tau <= 20; ++tau) {
    for (int i = 0; i <= 16; ++i) {
      const Rational x(i, 16);
      CHECK(std::fabs(bernoulli(tau, exact::to_real(x)) - exact::to_real(exact::bernoulli(tau, x))) < 1e-12L);
    }
    // B_tau(1 - x) = (-1)^tau B_tau(x)
    CHECK(exact::bernoulli(tau, Rational(3, 7)) == (tau % 2 ? -1 : 1) * exact::bernoulli(tau, Rational(4, 7)));
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    CHECK(static_cast<double>(bernoulli(2, x)) == doctest::Approx(oracle::b2(x)).epsilon(1e-13));
    CHECK(static_cast<double>(bernoulli(4, x)) == doctest::Approx(oracle::b4(x)).epsilon(1e-12));
  }
}

TEST_CASE("reproducing kernel") {
  CHECK(std::fabs(kernel_1d(2, 0, 0) - 31.0L / 120) < 1e-15L);
  CHECK(exact::kernel_1d(2, Rational(0), Rational(0)) == Rational(31, 120));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    CHECK(static_cast<double>(kernel_1d(2, x, y)) == doctest::Approx(oracle::kernel_alpha2(x, y)).epsilon(1e-12));
    for (int alpha = 2; alpha <= 5; ++alpha) CHECK(kernel_1d(alpha, x, y) == doctest::Approx(kernel_1d(alpha, y, x)));
  }
  CHECK_NOTHROW(kernel_1d(2, 1, 1));
  CHECK(std::fabs(kernel_1d(3, 1, 0.25L) - exact::to_real(exact::kernel_1d(3, Rational(1), Rational(1, 4)))) < 1e-15L);
  CHECK_THROWS(kernel_1d(2, 1.5L, 0));

  // Only the empty set carries weight.
  const std::vector<real> x{0.1L, 0.7L, 0.3L};
  const std::vector<real> y{0.9L, 0.2L, 0.5L};
  CHECK(kernel_s(2, WeightModel::product({0, 0, 0}), x, y) == 1);
  CHECK(kernel_s(2, WeightModel::general(3, {}), x, y) == 1);

  // Product and general weights agree.
  const std::vector<double> g{0.8, 0.4, 0.2};
  std::map<SubsetMask, double> gen;
  for (SubsetMask u = 1; u < 8; ++u) {
    double w = 1;
    for (int j = 0; j < 3; ++j) {
      if (u >> j & 1) w *= g[static_cast<std::size_t>(j)];
    }
    gen[u] = w;
  }
  const real kp = kernel_s(3, WeightModel::product(g), x, y);
  const real kg = kernel_s(3, WeightModel::general(3, gen), x, y);
  CHECK(std::fabs(kp - kg) < 1e-15L);
  real prod = 1;
  for (std::size_t j = 0; j < 3; ++j) prod *= 1 + static_cast<real>(g[j]) * kernel_1d(3, x[j], y[j]);
  CHECK(std::fabs(kp - prod) < 1e-15L);
}
