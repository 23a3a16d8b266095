#include "polylat/criterion.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "polylat/kernel.hpp"

namespace polylat {

namespace {

constexpr std::size_t kBlock = 4096;

std::string rule_id(const RuleSpec& rule) {
  std::string id = rule.modulus.to_hex() + ":";
  for (std::size_t j = 0; j < rule.generators.size(); ++j) {
    if (j) id += ",";
    id += rule.generators[j].to_hex();
  }
  return id;
}

}  // namespace

real product_minus_one(std::span<const real> a) {
  real t = 0;
  for (real v : a) t += v * (1 + t);
  return t;
}

bool dual_membership(std::span<const std::uint64_t> k, const RuleSpec& rule) {
  if (k.size() != rule.generators.size()) throw std::invalid_argument("dual vector dimension differs from s");
  F2Poly sum;
  for (std::size_t j = 0; j < k.size(); ++j) {
    sum = sum + mul_mod(truncate_integer_to_poly(k[j], rule.mprime), rule.generators[j], rule.modulus);
  }
  return sum.degree() < rule.mprime - rule.m;
}

real character_sum(std::span<const std::uint64_t> k, const PointSet& points) {
  if (k.size() != static_cast<std::size_t>(points.dimension())) throw std::invalid_argument("dual vector dimension differs from s");
  std::int64_t total = 0;
  for (std::size_t n = 0; n < points.size(); ++n) total += walsh(k, points.point(n));
  if (total != 0 && total != static_cast<std::int64_t>(points.size())) {
    throw std::logic_error("character sum is neither 0 nor N");
  }
  return total == 0 ? 0.0L : 1.0L;
}

real character_sum(std::span<const std::uint64_t> k, const RuleSpec& rule) {
  return character_sum(k, generate_point_set(rule));
}

CriterionResult b_points(const RuleSpec& rule, const CriterionOptions& options) {
  rule.validate();
  const std::size_t count = std::size_t{1} << rule.m;
  const auto s = static_cast<std::size_t>(rule.s);
  const real d = d_alpha(rule.alpha).d_alpha;
  const OmegaEvaluator omega(rule.alpha, rule.mprime);

  // omega values per coordinate column, row-major by point
  std::vector<real> w(count * s);
  for (std::size_t j = 0; j < s; ++j) {
    const auto col = generate_column(rule.generators[j], rule.modulus, rule.m, rule.mprime);
    for (std::size_t n = 0; n < count; ++n) w[n * s + j] = omega(col[n]);
  }

  std::vector<real> coef(s);
  std::vector<std::pair<SubsetMask, real>> general;
  if (rule.weights.is_product()) {
    const auto g = rule.weights.product_weights();
    for (std::size_t j = 0; j < s; ++j) coef[j] = static_cast<real>(g[j]) * d;
  } else {
    for (const auto& [u, g] : rule.weights.general_weights()) {
      if (u != 0 && g != 0.0) general.emplace_back(u, static_cast<real>(g) * std::pow(d, std::popcount(u)));
    }
  }

  auto term = [&](std::size_t n) -> real {
    const real* wn = &w[n * s];
    if (rule.weights.is_product()) {
      real t = 0;
      for (std::size_t j = 0; j < s; ++j) t += coef[j] * wn[j] * (1 + t);
      return t;
    }
    CompensatedSum<real> acc;
    for (const auto& [u, c] : general) {
      real prod = c;
      for (SubsetMask v = u; v != 0; v &= v - 1) prod *= wn[std::countr_zero(v)];
      acc += prod;
    }
    return acc.value();
  };

  CriterionResult r;
  if (options.keep_terms) {
    r.per_point.resize(count);
    for (std::size_t n = 0; n < count; ++n) r.per_point[n] = term(n);
  }
  const real total = reduce_blocks(count, kBlock, options.threads, [&](std::size_t lo, std::size_t hi) {
    CompensatedSum<real> acc;
    for (std::size_t n = lo; n < hi; ++n) acc += options.keep_terms ? r.per_point[n] : term(n);
    return acc.value();
  });
  r.value = total / static_cast<real>(count);
  r.alpha = rule.alpha;
  r.s = rule.s;
  r.m = rule.m;
  r.mprime = rule.mprime;
  r.rule_id = rule_id(rule);
  return r;
}

namespace {

/// g(r) = sum of 2^{-2 mu_alpha(floor(k/2))} over k in E, k < k_max,
/// k = r mod 2^{m'}.
std::vector<real> folded_coefficients(int alpha, int mprime, std::uint64_t k_max) {
  const std::size_t size = std::size_t{1} << mprime;
  std::vector<CompensatedSum<real>> acc(size);
  for (std::uint64_t j = 1;; ++j) {
    const std::uint64_t k = 2 * j + static_cast<std::uint64_t>(std::popcount(j) & 1);
    if (k >= k_max) break;
    acc[k & (size - 1)] += std::ldexp(1.0L, -2 * mu_alpha(alpha, j));
  }
  std::vector<real> g(size);
  for (std::size_t r = 0; r < size; ++r) g[r] = acc[r].value();
  return g;
}

/// f <- f XOR-convolved with h: out[t] = sum_a f[a] h[a ^ t].
std::vector<real> xor_convolve(const std::vector<real>& f, const std::vector<real>& h) {
  const std::size_t size = f.size();
  std::vector<real> out(size, 0);
  for (std::size_t a = 0; a < size; ++a) {
    if (f[a] == 0) continue;
    for (std::size_t b = 0; b < size; ++b) out[a ^ b] += f[a] * h[b];
  }
  return out;
}

}  // namespace

DualTruncation b_dual_oracle(const RuleSpec& rule, std::uint64_t k_max) {
  rule.validate();
  if (rule.s > 4 || rule.mprime > 8) throw std::invalid_argument("dual oracle limited to s <= 4, m' <= 8");
  if (k_max < 4) throw std::invalid_argument("dual oracle cutoff must be >= 4");
  const auto s = static_cast<std::size_t>(rule.s);
  const std::size_t size = std::size_t{1} << rule.mprime;
  const real d = d_alpha(rule.alpha).d_alpha;
  const auto g = folded_coefficients(rule.alpha, rule.mprime, k_max);

  // h_j(t): folded coefficients keyed by the residue tr(k) q_j mod p.
  std::vector<std::vector<real>> h(s, std::vector<real>(size, 0));
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t r = 0; r < size; ++r) {
      if (g[r] == 0) continue;
      const auto t = mul_mod(F2Poly(r), rule.generators[j], rule.modulus).bits();
      h[j][t] += g[r];
    }
  }
  const std::size_t admissible = std::size_t{1} << (rule.mprime - rule.m);  // deg(t) < m' - m
  auto admissible_sum = [&](const std::vector<real>& f) {
    CompensatedSum<real> acc;
    for (std::size_t t = 0; t < admissible; ++t) acc += f[t];
    return acc.value();
  };

  DualTruncation out;
  out.k_max = k_max;
  const real a_all = a_lambda_1(rule.alpha, 1);
  const real tail_1d = omega_series_tail(rule.alpha, k_max);

  if (rule.weights.is_product()) {
    const auto gam = rule.weights.product_weights();
    std::vector<real> f(size, 0);
    f[0] = 1;
    for (std::size_t j = 0; j < s; ++j) {
      const real c = static_cast<real>(gam[j]) * d;
      if (c == 0) continue;
      auto conv = xor_convolve(f, h[j]);
      for (std::size_t t = 0; t < size; ++t) f[t] += c * conv[t];
    }
    out.value = admissible_sum(f) - 1;
    // sum_u prod_{j in u}(c_j) |u| T A^{|u|-1} = T sum_j c_j prod_{i != j}(1 + c_i A)
    CompensatedSum<real> tail;
    for (std::size_t j = 0; j < s; ++j) {
      real prod = static_cast<real>(gam[j]) * d;
      for (std::size_t i = 0; i < s; ++i) {
        if (i != j) prod *= 1 + static_cast<real>(gam[i]) * d * a_all;
      }
      tail += prod;
    }
    out.tail = tail_1d * tail.value();
    return out;
  }

  CompensatedSum<real> value;
  CompensatedSum<real> tail;
  for (const auto& [u, gu] : rule.weights.general_weights()) {
    if (u == 0 || gu == 0.0) continue;
    const int size_u = std::popcount(u);
    const real c = static_cast<real>(gu) * std::pow(d, size_u);
    std::vector<real> f(size, 0);
    f[0] = 1;
    for (SubsetMask v = u; v != 0; v &= v - 1) f = xor_convolve(f, h[static_cast<std::size_t>(std::countr_zero(v))]);
    value += c * admissible_sum(f);
    tail += c * size_u * tail_1d * std::pow(a_all, size_u - 1);
  }
  out.value = value.value();
  out.tail = tail.value();
  return out;
}

namespace {

enum class BoundKind { existence, cbc };

real bound(BoundKind kind, int alpha, const WeightModel& weights, int m, int mprime, real lambda) {
  if (m < 0 || mprime < m) throw std::invalid_argument("need 0 <= m <= m'");
  const real a1 = a_lambda_1(alpha, lambda);
  const real a2 = a_lambda_2(alpha, lambda);
  const real dl = std::pow(d_alpha(alpha).d_alpha, lambda);
  real sum = 0;
  if (weights.is_product()) {
    std::vector<real> x1;
    std::vector<real> x2;
    for (double g : weights.product_weights()) {
      const real base = std::pow(static_cast<real>(g), lambda) * dl;
      if (kind == BoundKind::existence) {
        x1.push_back(base * a1);
        x2.push_back(base * a2);
      } else {
        x1.push_back(base * (a1 + a2));
      }
    }
    sum = product_minus_one(x1) + product_minus_one(x2);
  } else {
    CompensatedSum<real> acc;
    for (const auto& [u, g] : weights.general_weights()) {
      if (u == 0 || g == 0.0) continue;
      const int k = std::popcount(u);
      const real base = std::pow(static_cast<real>(g), lambda) * std::pow(dl, k);
      acc += kind == BoundKind::existence ? base * (std::pow(a1, k) + std::pow(a2, k)) : base * std::pow(a1 + a2, k);
    }
    sum = acc.value();
  }
  const real rate = std::min(static_cast<real>(m) / lambda, static_cast<real>(4 * mprime));
  return std::exp2(-rate) * std::pow(sum, 1 / lambda);
}

}  // namespace

real existence_bound(int alpha, const WeightModel& weights, int m, int mprime, real lambda) {
  return bound(BoundKind::existence, alpha, weights, m, mprime, lambda);
}

real cbc_bound(int alpha, const WeightModel& weights, int m, int mprime, real lambda) {
  return bound(BoundKind::cbc, alpha, weights, m, mprime, lambda);
}

std::vector<real> lambda_grid(int alpha) {
  if (alpha < 2) throw std::invalid_argument("alpha must be >= 2");
  const real start = 1.0L / (2 * alpha) + 0.01L;
  std::vector<real> grid;
  for (int i = 0;; ++i) {
    real l = start + 0.02L * i;
    if (std::fabs(l - 1) < 1e-12L) l = 1;
    if (l > 1) break;
    grid.push_back(l);
  }
  if (grid.empty() || grid.back() != 1) grid.push_back(1);
  return grid;
}

std::vector<LambdaBound> cbc_bounds_on_grid(int alpha, const WeightModel& weights, int m, int mprime) {
  std::vector<LambdaBound> out;
  for (real l : lambda_grid(alpha)) out.push_back({l, cbc_bound(alpha, weights, m, mprime, l)});
  return out;
}

LambdaBound min_cbc_bound(int alpha, const WeightModel& weights, int m, int mprime) {
  LambdaBound best{0, INFINITY};
  for (const auto& b : cbc_bounds_on_grid(alpha, weights, m, mprime)) {
    if (b.value < best.value) best = b;
  }
  return best;
}

}  // namespace polylat
