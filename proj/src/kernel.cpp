#include "polylat/kernel.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "detail/a_lambda.hpp"
#include "polylat/kernel_exact.hpp"

namespace polylat {

namespace {

void check_alpha(int alpha) {
  if (alpha < 2 || alpha > kMaxAlpha) {
    throw std::invalid_argument("alpha must be in [2, " + std::to_string(kMaxAlpha) + "]");
  }
}

void check_lambda(int alpha, real lambda) {
  if (!(lambda > 1.0L / (2 * alpha)) || !(lambda <= 1.0L)) {
    throw std::invalid_argument("lambda must lie in (1/(2 alpha), 1]");
  }
}

/// Bit i of the result is bit (precision - 1 - i) of v.
std::uint64_t reverse_low_bits(std::uint64_t v, int precision) {
  std::uint64_t r = 0;
  for (int i = 0; i < precision; ++i) {
    r = (r << 1) | (v & 1U);
    v >>= 1;
  }
  return r;
}

int walsh_sign(std::uint64_t k, std::uint64_t reversed_numerator) {
  return (std::popcount(k & reversed_numerator) & 1) ? -1 : 1;
}

/// Coefficient 2^{-2 mu_alpha(j)} of the omega series for j = floor(k/2).
real omega_coefficient(int alpha, std::uint64_t j) { return std::ldexp(1.0L, -2 * mu_alpha(alpha, j)); }

/// Calls f(k, coefficient) for every k in E below k_max, via j = floor(k/2).
template <class F>
void for_each_series_term(int alpha, std::uint64_t k_max, F&& f) {
  for (std::uint64_t j = 1;; ++j) {
    const std::uint64_t k = 2 * j + static_cast<std::uint64_t>(std::popcount(j) & 1);
    if (k >= k_max) break;
    f(k, omega_coefficient(alpha, j));
  }
}

void check_series_args(int alpha, std::uint64_t k_max) {
  check_alpha(alpha);
  if (k_max < 4) throw std::invalid_argument("series cutoff must be >= 4");
}

}  // namespace

int sum_of_digits(std::uint64_t k) { return std::popcount(k); }

bool in_E(std::uint64_t k) { return k != 0 && (std::popcount(k) % 2 == 0); }

int mu_alpha(int alpha, std::uint64_t k) {
  if (alpha < 1) throw std::invalid_argument("mu_alpha needs alpha >= 1");
  if (k == 0) throw std::invalid_argument("mu_alpha(0) is undefined");
  int sum = 0;
  for (int taken = 0; taken < alpha && k != 0; ++taken) {
    const int top = std::bit_width(k);  // 1-indexed position of the leading bit
    sum += top;
    k ^= std::uint64_t{1} << (top - 1);
  }
  return sum;
}

int walsh(std::uint64_t k, Dyadic x) {
  if (x.precision < 0 || x.precision > kMaxPrecision) throw std::invalid_argument("dyadic precision out of range");
  return walsh_sign(k, reverse_low_bits(x.numerator, x.precision));
}

int walsh(std::span<const std::uint64_t> k, const DyadicPoint& x) {
  if (k.size() != x.dimension()) throw std::invalid_argument("Walsh index and point dimensions differ");
  int sign = 1;
  for (std::size_t j = 0; j < k.size(); ++j) sign *= walsh(k[j], x.coordinate(j));
  return sign;
}

SmoothnessConstants d_alpha(int alpha) {
  check_alpha(alpha);
  SmoothnessConstants c;
  c.alpha = alpha;
  for (int tau = 1; tau <= alpha; ++tau) c.c_tau.push_back(exact::to_real(exact::c_tau(tau)));
  c.c_tilde_2alpha = exact::to_real(exact::c_tilde(alpha));
  for (int nu = 1; nu <= alpha; ++nu) c.c_prime.push_back(exact::to_real(exact::c_prime(alpha, nu)));
  c.argmax_nu = exact::d_alpha_argmax(alpha);
  c.d_alpha = exact::to_real(exact::d_alpha(alpha));
  return c;
}

real a_lambda_1(int alpha, real lambda) {
  check_alpha(alpha);
  check_lambda(alpha, lambda);
  if (lambda == 1.0L) return exact::to_real(exact::a_lambda_1(alpha, 4));
  if (lambda == 0.5L) return exact::to_real(exact::a_lambda_1(alpha, 2));
  return detail::a_lambda_1_generic<real>(alpha, std::exp2(2 * lambda));
}

real a_lambda_2(int alpha, real lambda) {
  check_alpha(alpha);
  check_lambda(alpha, lambda);
  if (lambda == 1.0L) return exact::to_real(exact::a_lambda_2(alpha, 4));
  if (lambda == 0.5L) return exact::to_real(exact::a_lambda_2(alpha, 2));
  return detail::a_lambda_2_generic<real>(alpha, std::exp2(2 * lambda));
}

OmegaTables make_omega_tables(int alpha, int precision) {
  check_alpha(alpha);
  if (precision < 2 || precision > kMaxPrecision) throw std::invalid_argument("omega tables need 2 <= m' <= 62");
  OmegaTables t;
  t.alpha = alpha;
  t.precision = precision;
  t.u.assign(static_cast<std::size_t>(alpha), 0);
  t.u[0] = 1;
  real prod = 1;
  for (int i = 1; i < alpha; ++i) {
    prod /= (std::ldexp(1.0L, 2 * i) - 1);
    t.u[static_cast<std::size_t>(i)] = std::ldexp(prod, -2 * i * (precision - 1));
  }
  for (int xi = 0; xi < 2; ++xi) {
    auto& ut = t.u_tilde[static_cast<std::size_t>(xi)];
    ut.assign(static_cast<std::size_t>(alpha), 0);
    for (int s = 0; s < alpha; ++s) {
      real sum = 0;
      for (int v = s; v < alpha; ++v) {
        const real sign = (xi == 1 && v % 2 == 1) ? -1 : 1;
        sum += sign * t.u[static_cast<std::size_t>(v - s)];
      }
      ut[static_cast<std::size_t>(s)] = sum;
    }
  }
  return t;
}

OmegaEvaluator::OmegaEvaluator(int alpha, int precision)
    : alpha_(alpha),
      precision_(precision),
      eval_precision_(precision + 1 < 2 ? 2 : precision + 1),
      tables_(make_omega_tables(alpha, eval_precision_)),
      at_zero_(exact::to_real(exact::a_lambda_1(alpha, 4))) {
  if (precision < 0 || precision >= kMaxPrecision) throw std::invalid_argument("omega precision must be in [0, 61]");
}

real OmegaEvaluator::operator()(std::uint64_t numerator) const {
  if (precision_ < 64 && (numerator >> precision_) != 0) throw std::invalid_argument("omega argument outside [0, 1)");
  if (numerator == 0) return at_zero_;
  const int mp = eval_precision_;
  const std::uint64_t l = numerator << (mp - precision_);
  const int xi1 = static_cast<int>((l >> (mp - 1)) & 1U);
  // Number of leading digits equal to xi_1. The chain weight 2^{a-1} survives
  // iff xi_2..xi_a all equal xi_1, i.e. iff run >= a.
  const std::uint64_t top_aligned = l << (64 - mp);
  const int run = xi1 == 0 ? std::countl_zero(top_aligned) : std::countl_one(top_aligned);

  const auto n = static_cast<std::size_t>(alpha_);
  real e[kMaxAlpha + 1] = {};   // V_0..V_{alpha-1}
  real f[kMaxAlpha + 1] = {};   // V~_1..V~_alpha
  e[0] = 1;
  for (int a = 1; a <= mp - 1; ++a) {
    const bool negative = ((l >> (mp - 1 - a)) & 1U) != 0;
    const real c = std::ldexp(negative ? -1.0L : 1.0L, -2 * a);
    const bool bracket = run >= a;
    for (std::size_t t = n; t >= 2; --t) f[t] += f[t - 1] * c;
    if (bracket) f[1] += std::ldexp(c, a - 1);
    for (std::size_t t = n - 1; t >= 1; --t) e[t] += e[t - 1] * c;
  }

  const auto& ut = tables_.u_tilde[static_cast<std::size_t>(xi1)];
  CompensatedSum<real> sum;
  for (std::size_t t = 1; t < n; ++t) sum += ut[t] * e[t];
  sum += ut[0] - 1;
  const real sign = (xi1 == 1 && alpha_ % 2 == 1) ? -1 : 1;
  CompensatedSum<real> tilde;
  for (std::size_t t = 1; t <= n; ++t) tilde += tables_.u[n - t] * f[t];
  sum += sign * tilde.value();
  return sum.value();
}

real omega_alpha(int alpha, Dyadic x) { return OmegaEvaluator(alpha, x.precision)(x.numerator); }

real omega_series_tail(int alpha, std::uint64_t k_max) {
  check_series_args(alpha, k_max);
  const int b = std::bit_width(k_max) - 1;
  const real a_prev = detail::a_lambda_1_generic<real>(alpha - 1, 4.0L);
  return (4.0L / 3.0L) * std::ldexp(1.0L, -2 * b) * (1 + a_prev);
}

TruncatedSeries omega_series_oracle(int alpha, Dyadic x, std::uint64_t k_max) {
  check_series_args(alpha, k_max);
  if (x.precision < 0 || x.precision > kMaxPrecision) throw std::invalid_argument("dyadic precision out of range");
  const std::uint64_t rev = reverse_low_bits(x.numerator, x.precision);
  CompensatedSum<real> sum;
  for_each_series_term(alpha, k_max, [&](std::uint64_t k, real coef) { sum += walsh_sign(k, rev) * coef; });
  return {sum.value(), omega_series_tail(alpha, k_max)};
}

std::vector<real> omega_series_grid(int alpha, int precision, std::uint64_t k_max) {
  check_series_args(alpha, k_max);
  if (precision < 0 || precision > 20) throw std::invalid_argument("series grid precision must be in [0, 20]");
  const std::size_t size = std::size_t{1} << precision;
  const std::uint64_t mask = size - 1;
  std::vector<CompensatedSum<real>> bins(size);
  for_each_series_term(alpha, k_max, [&](std::uint64_t k, real coef) { bins[k & mask] += coef; });
  std::vector<real> h(size);
  for (std::size_t r = 0; r < size; ++r) h[r] = bins[r].value();
  // Walsh-Hadamard transform: h[t] <- sum_r h[r] (-1)^{popcount(r & t)}.
  for (std::size_t len = 1; len < size; len <<= 1) {
    for (std::size_t i = 0; i < size; i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const real a = h[j];
        const real b = h[j + len];
        h[j] = a + b;
        h[j + len] = a - b;
      }
    }
  }
  std::vector<real> out(size);
  for (std::size_t l = 0; l < size; ++l) out[l] = h[reverse_low_bits(l, precision)];
  return out;
}

namespace {

struct BernoulliTable {
  std::vector<std::vector<real>> coefficients;  // [tau][i]
  BernoulliTable() {
    for (int tau = 0; tau <= 2 * kMaxAlpha; ++tau) {
      std::vector<real> c;
      for (const auto& r : exact::bernoulli_coefficients(tau)) c.push_back(exact::to_real(r));
      coefficients.push_back(std::move(c));
    }
  }
};

const BernoulliTable& bernoulli_table() {
  static const BernoulliTable table;
  return table;
}

real horner(const std::vector<real>& c, real x) {
  real r = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

real factorial(int n) {
  real r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

real bernoulli(int tau, real x) {
  if (tau < 0 || tau > 2 * kMaxAlpha) throw std::invalid_argument("Bernoulli degree out of range");
  return horner(bernoulli_table().coefficients[static_cast<std::size_t>(tau)], x);
}

SobolevKernel::SobolevKernel(int alpha, WeightModel weights)
    : alpha_(alpha), weights_(std::move(weights)), tail_sign_over_fact_(0) {
  if (alpha < 1 || alpha > kMaxAlpha) throw std::invalid_argument("kernel smoothness out of range");
  tail_sign_over_fact_ = (alpha % 2 == 1 ? 1.0L : -1.0L) / factorial(2 * alpha);
}

void SobolevKernel::features(real x, std::span<real> out) const {
  if (out.size() != static_cast<std::size_t>(alpha_)) throw std::invalid_argument("feature buffer must hold alpha values");
  real fact = 1;
  for (int tau = 1; tau <= alpha_; ++tau) {
    fact *= tau;
    out[static_cast<std::size_t>(tau - 1)] = bernoulli(tau, x) / fact;
  }
}

real SobolevKernel::k1_from_features(std::span<const real> fx, std::span<const real> fy, real x, real y) const {
  real sum = 0;
  for (std::size_t i = 0; i < fx.size(); ++i) sum += fx[i] * fy[i];
  return sum + tail_sign_over_fact_ * bernoulli(2 * alpha_, std::fabs(x - y));
}

real SobolevKernel::k1(real x, real y) const {
  if (!(x >= 0 && x <= 1 && y >= 0 && y <= 1)) throw std::invalid_argument("kernel arguments must lie in [0, 1]");
  real fx[kMaxAlpha];
  real fy[kMaxAlpha];
  const auto n = static_cast<std::size_t>(alpha_);
  features(x, {fx, n});
  features(y, {fy, n});
  return k1_from_features({fx, n}, {fy, n}, x, y);
}

real SobolevKernel::minus_empty(std::span<const real> x, std::span<const real> y) const {
  const auto s = static_cast<std::size_t>(weights_.dimension());
  if (x.size() != s || y.size() != s) throw std::invalid_argument("kernel arguments must match the weight dimension");
  if (weights_.is_product()) {
    const auto g = weights_.product_weights();
    real t = 0;
    for (std::size_t j = 0; j < s; ++j) {
      const real a = static_cast<real>(g[j]) * k1(x[j], y[j]);
      t += a * (1 + t);
    }
    return t;
  }
  std::vector<real> k(s);
  for (std::size_t j = 0; j < s; ++j) k[j] = k1(x[j], y[j]);
  CompensatedSum<real> sum;
  for (const auto& [u, g] : weights_.general_weights()) {
    if (u == 0 || g == 0.0) continue;
    real prod = g;
    for (std::size_t j = 0; j < s; ++j) {
      if ((u >> j) & 1U) prod *= k[j];
    }
    sum += prod;
  }
  return sum.value();
}

real SobolevKernel::operator()(std::span<const real> x, std::span<const real> y) const {
  return static_cast<real>(weights_.empty_set_weight()) + minus_empty(x, y);
}

real kernel_1d(int alpha, real x, real y) { return SobolevKernel(alpha, WeightModel::product({1.0})).k1(x, y); }

real kernel_s(int alpha, const WeightModel& weights, std::span<const real> x, std::span<const real> y) {
  return SobolevKernel(alpha, weights)(x, y);
}

}  // namespace polylat
