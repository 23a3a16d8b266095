#pragma once

// Closed forms of the sum-of-digits sums, generic over the number type so the
// floating and exact paths share one transcription. `b` is 2^{2 lambda}.

namespace polylat::detail {

template <class T>
T a_lambda_1_generic(int alpha, const T& b) {
  T sum = 0;
  T prod = 1;
  T b_pow = 1;
  for (int v = 1; v <= alpha - 1; ++v) {
    b_pow *= b;
    prod /= (b_pow - 1);
    sum += prod;
  }
  b_pow *= b;  // b^alpha
  return sum + prod / (b_pow - 2);
}

template <class T>
T a_lambda_2_generic(int alpha, const T& b) {
  T sum = 0;
  T prod = 1;
  T b_pow = 1;
  for (int i = 1; i <= alpha - 1; ++i) {
    b_pow *= b;
    prod *= b / (b_pow - 1);
    if (i % 2 == 0) sum += prod;
  }
  b_pow *= b;  // b^alpha
  return sum + b / (b_pow - 2) * prod;
}

}  // namespace polylat::detail
