#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polylat/cbc.hpp"
#include "polylat/criterion.hpp"
#include "polylat/qmc.hpp"

using namespace polylat;

namespace {

RuleSpec build(int s, int m, int mprime, std::vector<double> g) {
  CbcParams p;
  p.s = s;
  p.m = m;
  p.mprime = mprime;
  p.alpha = 2;
  p.weights = WeightModel::product(std::move(g));
  return cbc_fast(p).rule;
}

}  // namespace

TEST_CASE("integrands and their integrals") {
  for (const auto& name : integrand_names()) {
    const Integrand f = make_integrand(name, 3);
    REQUIRE(f.exact.has_value());
    // midpoint rule with 200^... is too big; integrate coordinatewise by Monte Carlo instead
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    real sum = 0;
    const int n = 200000;
    std::vector<real> x(3);
    for (int i = 0; i < n; ++i) {
      for (auto& v : x) v = u(rng);
      sum += f.f(x);
    }
    CHECK(std::fabs(sum / n - *f.exact) < 0.01L * std::max<real>(1, *f.exact));
  }
  CHECK_THROWS(make_integrand("nope", 2));
  CHECK_THROWS(make_integrand("one", 0));
}

TEST_CASE("integration with a rule") {
  const RuleSpec r = build(2, 6, 6, {1, 0.5});
  const auto one = integrate(r, make_integrand("one", 2), 8, 3);
  CHECK(one.estimate == 1);
  CHECK(one.replicates.size() == 8);
  CHECK(one.seeds[2] == replicate_seed(3, 2));
  // digital net with shift and fold: each coordinate is exactly equidistributed
  const auto lin = integrate(r, make_integrand("linear", 2), 8, 3);
  CHECK(*lin.rms_error < 1e-15L);
  const auto same = integrate(r, make_integrand("b2prod", 2), 8, 3);
  CHECK(same.replicates == integrate(r, make_integrand("b2prod", 2), 8, 3).replicates);
  CHECK(*same.rms_error < 1e-3L);
  CHECK_THROWS(integrate(r, make_integrand("one", 3), 2, 0));
}

TEST_CASE("kernel error of a single point") {
  PointSet pts(1, 1, 10);
  const auto e = worst_case_error_kernel(pts, 2, WeightModel::product({1.0}));
  CHECK(std::fabs(e.value - 31.0L / 120) < 1e-15L);
  CHECK_FALSE(e.estimated);
}

TEST_CASE("kernel error against a direct double sum") {
  std::mt19937_64 rng(2);
  const RuleSpec r = build(2, 5, 5, {1, 0.5});
  const PointSet z = randomize(r, 9).points;
  double direct = 0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    for (std::size_t b = 0; b < z.size(); ++b) {
      double prod = 1;
      const double g[2] = {1, 0.5};
      for (int j = 0; j < 2; ++j) {
        prod *= 1 + g[j] * oracle::kernel_alpha2(static_cast<double>(z.value(a, j)), static_cast<double>(z.value(b, j)));
      }
      direct += prod;
    }
  }
  direct = direct / static_cast<double>(z.size() * z.size()) - 1;
  const auto e = worst_case_error_kernel(z, 2, r.weights);
  CHECK(static_cast<double>(e.value) == doctest::Approx(direct).epsilon(1e-6));

  KernelErrorOptions sampled;
  sampled.exact_max_m = 2;
  sampled.sampled_pairs = 1 << 18;
  const auto est = worst_case_error_kernel(z, 2, r.weights, sampled);
  CHECK(est.estimated);
  CHECK(est.value > 0);
}

TEST_CASE("mean-square error stays below the criterion") {
  for (int m : {4, 6}) {
    const RuleSpec r = build(2, m, m, {1, 0.5});
    const auto c = mse_vs_bound(r, 32, 11);
    CHECK(c.holds);
    CHECK(c.replicates.size() == 32);
    CHECK(std::fabs(c.b - b_points(r).value) == 0);
  }
}

TEST_CASE("slope fit") {
  const std::vector<real> x{1, 2, 3, 4};
  const std::vector<real> y{3, 1, -1, -3};
  CHECK(std::fabs(fit_slope(x, y) + 2) < 1e-15L);
  CHECK(std::isnan(fit_slope(std::vector<real>{1}, std::vector<real>{1})));
}

TEST_CASE("small convergence study") {
  StudyOptions opt;
  opt.replicates = 8;
  opt.kernel_mse = false;
  const auto st = convergence_study(2, 2, WeightModel::product({0.5, 0.25}), 3, 8, opt);
  CHECK(st.records.size() == 6);
  CHECK(st.half_from == 6);
  CHECK(st.records.front().n == 8);
  CHECK(st.b_slope.full < -2);
  CHECK(st.rms_slope.full < -1);
  CHECK_FALSE(st.mse_slope.has_value());
  for (const auto& rec : st.records) CHECK(rec.mprime == default_mprime(2, rec.m));
}
