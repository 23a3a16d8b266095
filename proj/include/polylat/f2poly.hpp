#pragma once

// Arithmetic in F2[x] and in the residue field F2[x]/(p).
//
// A polynomial is packed LSB-first into a 64-bit word: bit i holds the
// coefficient of x^i. With this packing the usual identification of an
// integer n = n_0 + n_1 2 + ... with n(x) = n_0 + n_1 x + ... is the identity
// on encodings, so generators, moduli and point indices share one type.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polylat {

/// Largest supported modulus degree. The order test for primitive elements
/// factors 2^m' - 1 by trial division, which stays cheap up to here.
inline constexpr int kMaxModulusDegree = 40;

/// Degree of a polynomial over F2. The zero polynomial has degree -infinity,
/// which compares below every finite degree and has no integer value.
class Degree {
 public:
  static constexpr Degree neg_infinity() { return Degree(); }
  static constexpr Degree of(int d) { return Degree(d); }

  constexpr bool is_finite() const { return finite_; }
  /// Throws std::domain_error for the zero polynomial's degree.
  int value() const {
    if (!finite_) throw std::domain_error("degree of the zero polynomial has no integer value");
    return d_;
  }

  friend constexpr bool operator==(Degree a, Degree b) {
    return a.finite_ == b.finite_ && (!a.finite_ || a.d_ == b.d_);
  }
  friend constexpr std::strong_ordering operator<=>(Degree a, Degree b) {
    if (!a.finite_ || !b.finite_) return a.finite_ <=> b.finite_;
    return a.d_ <=> b.d_;
  }
  friend constexpr bool operator==(Degree a, int b) { return a.finite_ && a.d_ == b; }
  friend constexpr std::strong_ordering operator<=>(Degree a, int b) {
    if (!a.finite_) return std::strong_ordering::less;
    return a.d_ <=> b;
  }

 private:
  constexpr Degree() = default;
  constexpr explicit Degree(int d) : d_(d), finite_(true) {}
  int d_ = 0;
  bool finite_ = false;
};

class F2Poly {
 public:
  constexpr F2Poly() = default;
  constexpr explicit F2Poly(std::uint64_t bits) : bits_(bits) {}

  static constexpr F2Poly zero() { return F2Poly(); }
  static constexpr F2Poly one() { return F2Poly(1); }
  /// x^k, 0 <= k <= 63.
  static F2Poly monomial(int k);

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool is_zero() const { return bits_ == 0; }
  Degree degree() const;
  bool coefficient(int i) const { return i >= 0 && i < 64 && ((bits_ >> i) & 1U); }

  /// Lowercase hex of the bit packing, no leading zeros ("0" for zero).
  std::string to_hex() const;
  /// Accepts an optional "0x" prefix; rejects empty, non-hex or >16 digits.
  static F2Poly from_hex(std::string_view hex);
  /// Human-readable form such as "x^4 + x + 1".
  std::string to_string() const;

  friend constexpr bool operator==(F2Poly a, F2Poly b) = default;
  friend constexpr auto operator<=>(F2Poly a, F2Poly b) { return a.bits_ <=> b.bits_; }

 private:
  std::uint64_t bits_ = 0;
};

/// Coefficientwise XOR.
constexpr F2Poly add(F2Poly a, F2Poly b) { return F2Poly(a.bits() ^ b.bits()); }
constexpr F2Poly operator+(F2Poly a, F2Poly b) { return add(a, b); }

/// Full product; throws std::overflow_error when deg(a) + deg(b) > 63.
F2Poly mul(F2Poly a, F2Poly b);

/// (a * b) mod p. Requires deg(p) >= 1 (deg(p) <= 63); operands of any degree.
F2Poly mul_mod(F2Poly a, F2Poly b, F2Poly p);

/// a mod p, p != 0.
F2Poly mod(F2Poly a, F2Poly p);

struct DivRem {
  F2Poly quotient;
  F2Poly remainder;
};

/// a = quotient * b + remainder with deg(remainder) < deg(b). Throws
/// std::domain_error when b is zero.
DivRem divrem(F2Poly a, F2Poly b);

F2Poly gcd(F2Poly a, F2Poly b);

/// a^e mod p.
F2Poly pow_mod(F2Poly a, std::uint64_t e, F2Poly p);

/// Exact irreducibility test (Ben-Or): p is irreducible iff
/// gcd(x^{2^i} - x, p) = 1 for every 1 <= i <= deg(p)/2.
bool is_irreducible(F2Poly p);

/// The irreducible polynomial of degree `degree` with the smallest encoding.
F2Poly find_irreducible(int degree);

/// Prime factorization of a positive integer, factors ascending.
struct IntegerFactorization {
  struct Factor {
    std::uint64_t prime;
    int multiplicity;
  };
  std::vector<Factor> factors;

  std::uint64_t product() const;
};

/// Trial division. Intended for L = 2^m' - 1 with m' <= kMaxModulusDegree.
IntegerFactorization factor(std::uint64_t n);

/// Smallest-encoding generator of the multiplicative group of F2[x]/(p).
/// Throws std::invalid_argument when p is not irreducible or too large.
F2Poly find_primitive(F2Poly p);

/// First `digits` coefficients t_1..t_digits of the Laurent expansion
/// a(x)/p(x) = sum_l t_l x^{-l}; `a` is reduced mod p first.
std::vector<std::uint8_t> laurent_digits(F2Poly a, F2Poly p, int digits);

/// The digits of laurent_digits packed as a dyadic numerator over 2^digits,
/// t_1 in the most significant position: v(a/p) = numerator / 2^digits.
std::uint64_t laurent_numerator(F2Poly a, F2Poly p, int digits);

/// tr_{m'}(k): the polynomial formed by the low `digits` binary digits of k.
constexpr F2Poly truncate_integer_to_poly(std::uint64_t k, int digits) {
  if (digits >= 64) return F2Poly(k);
  if (digits <= 0) return F2Poly();
  return F2Poly(k & ((std::uint64_t{1} << digits) - 1));
}

}  // namespace polylat
