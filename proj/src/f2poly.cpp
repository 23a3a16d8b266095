#include "polylat/f2poly.hpp"

#include <bit>
#include <cctype>

namespace polylat {

namespace {

int top_bit(std::uint64_t v) { return 63 - std::countl_zero(v); }

void require_modulus(F2Poly p) {
  if (p.is_zero()) throw std::domain_error("zero modulus");
  if (p.degree() < 1) throw std::invalid_argument("modulus must have degree >= 1");
}

// (r * x) mod p for deg(r) < deg(p) <= 63.
inline std::uint64_t times_x_mod(std::uint64_t r, std::uint64_t p, std::uint64_t top) {
  r <<= 1;
  if (r & top) r ^= p;
  return r;
}

}  // namespace

F2Poly F2Poly::monomial(int k) {
  if (k < 0 || k > 63) throw std::out_of_range("monomial degree outside [0, 63]");
  return F2Poly(std::uint64_t{1} << k);
}

Degree F2Poly::degree() const {
  if (bits_ == 0) return Degree::neg_infinity();
  return Degree::of(top_bit(bits_));
}

std::string F2Poly::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  if (bits_ == 0) return "0";
  std::string out;
  for (std::uint64_t v = bits_; v != 0; v >>= 4) out.insert(out.begin(), kDigits[v & 0xF]);
  return out;
}

F2Poly F2Poly::from_hex(std::string_view hex) {
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
  if (hex.empty() || hex.size() > 16) throw std::invalid_argument("bad polynomial hex string");
  std::uint64_t v = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw std::invalid_argument("bad polynomial hex string");
    }
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return F2Poly(v);
}

std::string F2Poly::to_string() const {
  if (bits_ == 0) return "0";
  std::string out;
  for (int i = top_bit(bits_); i >= 0; --i) {
    if (!coefficient(i)) continue;
    if (!out.empty()) out += " + ";
    if (i == 0) {
      out += "1";
    } else if (i == 1) {
      out += "x";
    } else {
      out += "x^" + std::to_string(i);
    }
  }
  return out;
}

F2Poly mul(F2Poly a, F2Poly b) {
  if (a.is_zero() || b.is_zero()) return F2Poly();
  if (a.degree().value() + b.degree().value() > 63) throw std::overflow_error("F2Poly product exceeds degree 63");
  std::uint64_t r = 0;
  std::uint64_t bb = b.bits();
  for (int i = 0; bb != 0; ++i, bb >>= 1) {
    if (bb & 1U) r ^= a.bits() << i;
  }
  return F2Poly(r);
}

F2Poly mod(F2Poly a, F2Poly p) { return divrem(a, p).remainder; }

F2Poly mul_mod(F2Poly a, F2Poly b, F2Poly p) {
  require_modulus(p);
  const std::uint64_t pb = p.bits();
  const std::uint64_t top = std::uint64_t{1} << p.degree().value();
  const std::uint64_t ar = mod(a, p).bits();
  std::uint64_t br = mod(b, p).bits();
  std::uint64_t r = 0;
  // Horner over the bits of b, most significant first.
  for (int i = br == 0 ? -1 : top_bit(br); i >= 0; --i) {
    r = times_x_mod(r, pb, top);
    if ((br >> i) & 1U) r ^= ar;
  }
  return F2Poly(r);
}

DivRem divrem(F2Poly a, F2Poly b) {
  if (b.is_zero()) throw std::domain_error("division by the zero polynomial");
  const int db = b.degree().value();
  std::uint64_t r = a.bits();
  std::uint64_t q = 0;
  while (r != 0 && top_bit(r) >= db) {
    const int shift = top_bit(r) - db;
    q |= std::uint64_t{1} << shift;
    r ^= b.bits() << shift;
  }
  return {F2Poly(q), F2Poly(r)};
}

F2Poly gcd(F2Poly a, F2Poly b) {
  while (!b.is_zero()) {
    F2Poly r = mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

F2Poly pow_mod(F2Poly a, std::uint64_t e, F2Poly p) {
  require_modulus(p);
  F2Poly result = mod(F2Poly::one(), p);
  F2Poly base = mod(a, p);
  while (e != 0) {
    if (e & 1U) result = mul_mod(result, base, p);
    base = mul_mod(base, base, p);
    e >>= 1;
  }
  return result;
}

bool is_irreducible(F2Poly p) {
  if (p.is_zero() || p.degree() < 1) return false;
  const int d = p.degree().value();
  if (d == 1) return true;
  if (!p.coefficient(0)) return false;  // divisible by x
  const F2Poly x(2);
  F2Poly h = x;
  for (int i = 1; i <= d / 2; ++i) {
    h = mul_mod(h, h, p);  // x^{2^i} mod p
    if (gcd(p, add(h, x)) != F2Poly::one()) return false;
  }
  return true;
}

F2Poly find_irreducible(int degree) {
  if (degree < 1 || degree > 63) throw std::invalid_argument("irreducible degree must be in [1, 63]");
  const std::uint64_t lo = std::uint64_t{1} << degree;
  for (std::uint64_t low = 0; low < lo; ++low) {
    if (is_irreducible(F2Poly(lo | low))) return F2Poly(lo | low);
  }
  throw std::logic_error("no irreducible polynomial found");
}

std::uint64_t IntegerFactorization::product() const {
  std::uint64_t v = 1;
  for (const auto& f : factors) {
    for (int i = 0; i < f.multiplicity; ++i) v *= f.prime;
  }
  return v;
}

IntegerFactorization factor(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("cannot factor zero");
  IntegerFactorization out;
  auto take = [&](std::uint64_t d) {
    int k = 0;
    while (n % d == 0) {
      n /= d;
      ++k;
    }
    if (k > 0) out.factors.push_back({d, k});
  };
  take(2);
  for (std::uint64_t d = 3; d * d <= n; d += 2) take(d);
  if (n > 1) out.factors.push_back({n, 1});
  return out;
}

F2Poly find_primitive(F2Poly p) {
  if (!is_irreducible(p)) throw std::invalid_argument("find_primitive needs an irreducible modulus");
  const int d = p.degree().value();
  if (d > kMaxModulusDegree) throw std::invalid_argument("modulus degree above the supported maximum");
  const std::uint64_t order = (std::uint64_t{1} << d) - 1;
  if (order == 1) return F2Poly::one();
  const auto fac = factor(order);
  for (std::uint64_t g = 2; g <= order; ++g) {
    bool ok = true;
    for (const auto& f : fac.factors) {
      if (pow_mod(F2Poly(g), order / f.prime, p) == F2Poly::one()) {
        ok = false;
        break;
      }
    }
    if (ok) return F2Poly(g);
  }
  throw std::logic_error("no primitive element found");
}

std::uint64_t laurent_numerator(F2Poly a, F2Poly p, int digits) {
  require_modulus(p);
  if (digits < 0 || digits > 63) throw std::invalid_argument("digit count outside [0, 63]");
  const std::uint64_t pb = p.bits();
  const std::uint64_t top = std::uint64_t{1} << p.degree().value();
  std::uint64_t r = mod(a, p).bits();
  std::uint64_t out = 0;
  // Long division: multiply the remainder by x, the x^{deg p} coefficient is
  // the next digit of the expansion.
  for (int l = 0; l < digits; ++l) {
    r <<= 1;
    out <<= 1;
    if (r & top) {
      out |= 1U;
      r ^= pb;
    }
  }
  return out;
}

std::vector<std::uint8_t> laurent_digits(F2Poly a, F2Poly p, int digits) {
  const std::uint64_t v = laurent_numerator(a, p, digits);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(digits));
  for (int l = 0; l < digits; ++l) out[static_cast<std::size_t>(l)] = (v >> (digits - 1 - l)) & 1U;
  return out;
}

}  // namespace polylat
