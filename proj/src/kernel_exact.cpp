#include "polylat/kernel_exact.hpp"

#include <mutex>
#include <stdexcept>

#include "detail/a_lambda.hpp"

namespace polylat::exact {

namespace {

Rational pow_int(Rational base, int e) {
  Rational r = 1;
  if (e < 0) {
    base = 1 / base;
    e = -e;
  }
  for (; e > 0; --e) r *= base;
  return r;
}

Rational pow2(int e) { return pow_int(Rational(2), e); }

boost::multiprecision::cpp_int binom(int n, int k) {
  boost::multiprecision::cpp_int r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

Rational factorial(int n) {
  boost::multiprecision::cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return Rational(r);
}

}  // namespace

Rational c_tau(int tau) {
  if (tau < 1) throw std::invalid_argument("C_tau needs tau >= 1");
  if (tau == 1) return Rational(1, 2);
  return pow2(-tau) * pow_int(Rational(5, 3), tau - 2);
}

Rational c_tilde(int alpha) {
  if (alpha < 1) throw std::invalid_argument("C~_{2alpha} needs alpha >= 1");
  return pow2(-2 * alpha + 1) * pow_int(Rational(5, 3), 2 * alpha - 2);
}

Rational c_prime(int alpha, int nu) {
  if (nu < 1 || nu > alpha) throw std::invalid_argument("C'_{alpha,nu} needs 1 <= nu <= alpha");
  Rational sum = 0;
  for (int tau = nu; tau <= alpha; ++tau) {
    const Rational c = c_tau(tau);
    sum += c * c * pow2(-2 * (tau - nu));
  }
  return sum;
}

namespace {

Rational d_candidate(int alpha, int nu) { return c_prime(alpha, nu) + c_tilde(alpha) * pow2(-2 * (alpha - nu)); }

void check_alpha(int alpha) {
  if (alpha < 2) throw std::invalid_argument("alpha must be >= 2");
}

}  // namespace

Rational d_alpha(int alpha) { return d_candidate(alpha, d_alpha_argmax(alpha)); }

int d_alpha_argmax(int alpha) {
  check_alpha(alpha);
  int best = 1;
  Rational best_value = d_candidate(alpha, 1);
  for (int nu = 2; nu <= alpha; ++nu) {
    Rational v = d_candidate(alpha, nu);
    if (v > best_value) {
      best_value = v;
      best = nu;
    }
  }
  return best;
}

Rational a_lambda_1(int alpha, const Rational& base) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (base <= 1) throw std::invalid_argument("base 2^{2 lambda} must exceed 1");
  return detail::a_lambda_1_generic<Rational>(alpha, base);
}

Rational a_lambda_2(int alpha, const Rational& base) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (base <= 1) throw std::invalid_argument("base 2^{2 lambda} must exceed 1");
  return detail::a_lambda_2_generic<Rational>(alpha, base);
}

Rational bernoulli_number(int n) {
  if (n < 0) throw std::invalid_argument("Bernoulli index must be nonnegative");
  static std::mutex mutex;
  static std::vector<Rational> cache{Rational(1)};
  std::lock_guard lock(mutex);
  while (static_cast<int>(cache.size()) <= n) {
    const int m = static_cast<int>(cache.size());
    // sum_{k=0}^{m} C(m+1, k) B_k = 0
    Rational s = 0;
    for (int k = 0; k < m; ++k) s += Rational(binom(m + 1, k)) * cache[static_cast<std::size_t>(k)];
    cache.push_back(-s / Rational(binom(m + 1, m)));
  }
  return cache[static_cast<std::size_t>(n)];
}

std::vector<Rational> bernoulli_coefficients(int tau) {
  if (tau < 0) throw std::invalid_argument("Bernoulli degree must be nonnegative");
  std::vector<Rational> c(static_cast<std::size_t>(tau) + 1);
  for (int k = 0; k <= tau; ++k) c[static_cast<std::size_t>(tau - k)] = Rational(binom(tau, k)) * bernoulli_number(k);
  return c;
}

Rational bernoulli(int tau, const Rational& x) {
  const auto c = bernoulli_coefficients(tau);
  Rational r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

Rational kernel_1d(int alpha, const Rational& x, const Rational& y) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  Rational sum = 0;
  for (int tau = 1; tau <= alpha; ++tau) {
    const Rational f = factorial(tau);
    sum += bernoulli(tau, x) * bernoulli(tau, y) / (f * f);
  }
  const Rational d = x > y ? Rational(x - y) : Rational(y - x);
  const Rational tail = bernoulli(2 * alpha, d) / factorial(2 * alpha);
  return alpha % 2 == 1 ? Rational(sum + tail) : Rational(sum - tail);
}

long double to_real(const Rational& r) {
  return r.convert_to<long double>();
}

}  // namespace polylat::exact
