#pragma once

// Exact rational evaluation of the constants used by the error bounds.

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace polylat::exact {

using Rational = boost::multiprecision::cpp_rational;

/// C_tau: 1/2 for tau = 1, 2^{-tau} (5/3)^{tau-2} otherwise.
Rational c_tau(int tau);
/// C~_{2 alpha} = 2^{-2 alpha + 1} (5/3)^{2 alpha - 2}.
Rational c_tilde(int alpha);
/// C'_{alpha,nu} = sum_{tau=nu}^{alpha} C_tau^2 2^{-2(tau - nu)}.
Rational c_prime(int alpha, int nu);
Rational d_alpha(int alpha);
/// Index nu attaining the maximum in d_alpha (smallest on ties).
int d_alpha_argmax(int alpha);

/// The two closed forms with base = 2^{2 lambda}; exact whenever the base is
/// rational (lambda = 1/2 or 1). alpha >= 1 for the first form.
Rational a_lambda_1(int alpha, const Rational& base);
Rational a_lambda_2(int alpha, const Rational& base);

/// Bernoulli numbers with B_1 = -1/2.
Rational bernoulli_number(int n);
/// Coefficients c_0..c_tau of B_tau(x) = sum_i c_i x^i.
std::vector<Rational> bernoulli_coefficients(int tau);
Rational bernoulli(int tau, const Rational& x);

/// K_{1,alpha,(1)}(x, y) for rational x, y in [0, 1].
Rational kernel_1d(int alpha, const Rational& x, const Rational& y);

long double to_real(const Rational& r);

}  // namespace polylat::exact
