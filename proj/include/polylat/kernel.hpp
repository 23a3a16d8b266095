#pragma once

// Smoothness-space mathematics for the tent-folded polynomial lattice rules:
// digit functions, Walsh functions, the decay constants D_alpha and
// A_{alpha,lambda,1/2}, the function omega_alpha that turns the dual-lattice
// criterion into a point average, Bernoulli polynomials and the reproducing
// kernel of the weighted unanchored Sobolev space.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "polylat/dyadic.hpp"
#include "polylat/numeric.hpp"
#include "polylat/weights.hpp"

namespace polylat {

/// Largest smoothness handled. Bernoulli polynomials up to degree 2*alpha are
/// evaluated in the monomial basis, whose cancellation grows with the degree.
inline constexpr int kMaxAlpha = 10;

/// delta(k): number of nonzero binary digits.
int sum_of_digits(std::uint64_t k);

/// k in E: positive with an even digit sum.
bool in_E(std::uint64_t k);

/// mu_alpha(k): sum of the min(alpha, v) largest 1-indexed bit positions of
/// k = 2^{a_1-1} + ... + 2^{a_v-1}. Throws for k == 0 (left undefined).
int mu_alpha(int alpha, std::uint64_t k);

/// wal_k(x) in {-1, +1} for a finite dyadic x in [0, 1).
int walsh(std::uint64_t k, Dyadic x);
/// Product of the coordinate Walsh functions.
int walsh(std::span<const std::uint64_t> k, const DyadicPoint& x);

/// Constants of the mean-square error bound for smoothness alpha.
struct SmoothnessConstants {
  int alpha = 0;
  std::vector<real> c_tau;    ///< C_1..C_alpha (index tau - 1)
  real c_tilde_2alpha = 0;    ///< C~_{2 alpha}
  std::vector<real> c_prime;  ///< C'_{alpha,nu}, nu = 1..alpha (index nu - 1)
  real d_alpha = 0;           ///< max_nu (C'_{alpha,nu} + C~_{2alpha} 2^{-2(alpha-nu)})
  int argmax_nu = 0;
};

/// Evaluated in exact rational arithmetic, rounded at the end. alpha >= 2.
SmoothnessConstants d_alpha(int alpha);

/// sum_{k in E} 2^{-2 lambda mu_alpha(floor(k/2))}, closed form.
/// Requires 1/(2 alpha) < lambda <= 1.
real a_lambda_1(int alpha, real lambda);
/// Bound constant for the multiples of an irreducible modulus, closed form.
/// Requires 1/(2 alpha) < lambda <= 1.
real a_lambda_2(int alpha, real lambda);

/// Precomputed vectors U and U~(xi_1) for a fixed (alpha, m').
struct OmegaTables {
  int alpha = 0;
  int precision = 0;
  std::vector<real> u;                      ///< U_0..U_{alpha-1}
  std::array<std::vector<real>, 2> u_tilde;  ///< U~_0..U~_{alpha-1} for xi_1 = 0, 1
};

/// Requires precision >= 2.
OmegaTables make_omega_tables(int alpha, int precision);

/// Closed-form omega_alpha on the grid l / 2^precision in O(alpha * precision).
///
/// The V and V~ vectors are the elementary symmetric sums of the digit terms
/// c_a = 2^{-2a} (-1)^{xi_{a+1}}, a = 1..m'-1; both are accumulated in one
/// ascending pass with alpha running accumulators. For V~ the smallest index
/// a_t of each chain additionally carries 2^{a_t - 1} when xi_2..xi_{a_t} all
/// equal xi_1. Written through the folded value this is phi(x) < 2^{1 - a_t}
/// for xi_1 = 0 but phi(x) <= 2^{1 - a_t} for xi_1 = 1, so the run of leading
/// digits is tested directly.
///
/// The closed form drops chains with every index >= m', which is only exact
/// when x is not 1 - 2^{-m'}. Points are therefore evaluated at precision
/// m' + 1 (one extra zero digit, same value), which also covers m' <= 1.
class OmegaEvaluator {
 public:
  OmegaEvaluator(int alpha, int precision);

  int alpha() const { return alpha_; }
  int precision() const { return precision_; }
  const OmegaTables& tables() const { return tables_; }
  /// omega_alpha(0) = A_{alpha,1,1}.
  real at_zero() const { return at_zero_; }

  /// omega_alpha(numerator / 2^precision); numerator < 2^precision.
  real operator()(std::uint64_t numerator) const;

 private:
  int alpha_;
  int precision_;
  int eval_precision_;
  OmegaTables tables_;
  real at_zero_;
};

/// omega_alpha(x) for a dyadic x (builds the tables on every call).
real omega_alpha(int alpha, Dyadic x);

/// A truncated series value together with a rigorous bound on what was cut.
struct TruncatedSeries {
  real value = 0;
  real tail = 0;
};

/// Bound on sum_{k in E, k >= k_max} 2^{-2 mu_alpha(floor(k/2))}, which also
/// bounds the modulus of the cut part of the omega series. k_max >= 4.
real omega_series_tail(int alpha, std::uint64_t k_max);

/// sum_{k in E, k < k_max} 2^{-2 mu_alpha(floor(k/2))} wal_k(x), term by term.
TruncatedSeries omega_series_oracle(int alpha, Dyadic x, std::uint64_t k_max);

/// The same truncated series for every x = l / 2^precision at once: the terms
/// are first binned by k mod 2^precision (wal_k on this grid only sees those
/// bits), then one Walsh-Hadamard transform gives every grid value. Precision <= 20.
std::vector<real> omega_series_grid(int alpha, int precision, std::uint64_t k_max);

/// Bernoulli polynomial B_tau(x), 0 <= tau <= 2 * kMaxAlpha.
real bernoulli(int tau, real x);

/// Reproducing kernel of H_{s,alpha,gamma}.
class SobolevKernel {
 public:
  SobolevKernel(int alpha, WeightModel weights);

  int alpha() const { return alpha_; }
  const WeightModel& weights() const { return weights_; }

  /// K_{1,alpha,(1)}(x, y); accepts x, y in [0, 1] (continuous extension at 1).
  real k1(real x, real y) const;

  /// B_tau(x) / tau! for tau = 1..alpha; speeds up repeated k1 evaluations.
  void features(real x, std::span<real> out) const;
  real k1_from_features(std::span<const real> fx, std::span<const real> fy, real x, real y) const;

  /// K_{s,alpha,gamma}(x, y).
  real operator()(std::span<const real> x, std::span<const real> y) const;
  /// K(x, y) - gamma_{}; for product weights computed without the cancellation
  /// of subtracting 1 from the product.
  real minus_empty(std::span<const real> x, std::span<const real> y) const;

 private:
  int alpha_;
  WeightModel weights_;
  real tail_sign_over_fact_;  // (-1)^{alpha+1} / (2 alpha)!
};

real kernel_1d(int alpha, real x, real y);
real kernel_s(int alpha, const WeightModel& weights, std::span<const real> x, std::span<const real> y);

}  // namespace polylat
