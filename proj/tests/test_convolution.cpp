#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "polylat/convolution.hpp"

using namespace polylat;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<real> widen(const std::vector<double>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("direct and transform paths match the naive sum") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {1u, 2u, 3u, 7u, 15u, 31u, 100u, 255u, 511u, 1023u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const auto ref = oracle::cyclic(a, b);
    const auto d = cyclic_convolution_direct(widen(a), widen(b));
    const auto f = cyclic_convolution_fft(widen(a), widen(b));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(static_cast<double>(d[i]) - ref[i]) < 1e-12);
      CHECK(std::fabs(static_cast<double>(f[i]) - ref[i]) < 1e-12);
    }
  }
}

TEST_CASE("convolver respects its error bound") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {63u, 511u, 4095u}) {
    const auto a = widen(random_vec(rng, n));
    for (std::size_t threshold : {std::size_t{0}, std::size_t{1} << 20}) {
      const CyclicConvolver conv(a, threshold);
      CHECK(conv.uses_transform() == (threshold == 0));
      CHECK(conv.length() == n);
      if (conv.uses_transform()) CHECK(conv.transform_length() >= 2 * n - 1);
      for (int rep = 0; rep < 3; ++rep) {
        const auto b = widen(random_vec(rng, n));
        const auto out = conv.apply(b);
        const auto ref = cyclic_convolution_direct(a, b);
        const real bound = conv.error_bound(b);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(out[i] - ref[i]) <= bound);
      }
    }
  }
}

TEST_CASE("threshold selects the path") {
  std::mt19937_64 rng(3);
  const auto a = widen(random_vec(rng, 600));
  const auto b = widen(random_vec(rng, 600));
  CHECK(cyclic_convolution(a, b, 10000) == cyclic_convolution_direct(a, b));
  CHECK(cyclic_convolution(a, b, 0) == cyclic_convolution_fft(a, b));
  const std::vector<real> small{1, 2};
  CHECK_THROWS(cyclic_convolution_direct(small, std::vector<real>{1}));
}

TEST_CASE("delta kernel shifts") {
  std::vector<real> delta(10, 0);
  delta[3] = 1;
  std::vector<real> b(10);
  for (std::size_t i = 0; i < 10; ++i) b[i] = static_cast<real>(i);
  const auto out = cyclic_convolution_fft(delta, b);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::fabs(out[i] - b[(i + 7) % 10]) < 1e-15L);
}
