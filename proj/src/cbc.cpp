#include "polylat/cbc.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "polylat/kernel.hpp"

namespace polylat {

int default_mprime(int alpha, int m) { return std::max(1, (alpha * m + 1) / 2); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RuleSpec prepare(const CbcParams& params) {
  RuleSpec rule;
  rule.s = params.s;
  rule.m = params.m;
  rule.alpha = params.alpha;
  rule.mprime = params.mprime > 0 ? params.mprime : default_mprime(params.alpha, params.m);
  if (params.m < 0 || rule.mprime < params.m) throw std::invalid_argument("need 0 <= m <= m'");
  if (rule.mprime > kMaxModulusDegree) throw std::invalid_argument("modulus degree m' must be <= 40");
  if (rule.mprime > 30) throw std::invalid_argument("construction needs m' <= 30");
  rule.modulus = params.modulus.is_zero() ? find_irreducible(rule.mprime) : params.modulus;
  rule.weights = params.weights;
  rule.generators.assign(static_cast<std::size_t>(params.s), F2Poly());
  rule.validate();
  return rule;
}

/// S(q) = sum_n omega(x_n(q)) w(n), n ascending, compensated.
template <class OmegaAt>
real step_sum(std::size_t count, OmegaAt&& omega_at, const std::vector<real>& w) {
  CompensatedSum<real> acc;
  for (std::size_t n = 0; n < count; ++n) acc += omega_at(n) * w[n];
  return acc.value();
}

/// Two candidates whose sums differ by less than this are treated as tied.
real tie_tolerance(real omega0, const std::vector<real>& w) {
  real total = 0;
  for (real v : w) total += std::fabs(v);
  return 64 * LDBL_EPSILON * omega0 * total;
}

struct Scored {
  std::uint64_t q;
  real sum;
};

/// Smallest encoding among the candidates within `tie` of the minimum.
Scored select(std::vector<Scored> scored, real tie) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) { return a.q < b.q; });
  real best = scored.front().sum;
  for (const auto& c : scored) best = std::min(best, c.sum);
  for (const auto& c : scored) {
    if (c.sum <= best + tie) return c;
  }
  return scored.front();
}

inline real update_factor(real coef, real omega) { return 1 + coef * omega; }

/// Shortcuts shared by both paths. Returns true when the step is decided
/// without a full search; candidates to score exactly are put in `forced`.
bool trivial_step(real coef, const std::vector<real>& w, const RuleSpec& rule, std::vector<std::uint64_t>& forced) {
  const bool all_zero = std::all_of(w.begin(), w.end(), [](real v) { return v == 0; });
  if (coef == 0 || all_zero) {
    forced = {0};  // every candidate gives the same B
    return true;
  }
  const bool constant = std::all_of(w.begin(), w.end(), [&](real v) { return v == w.front(); });
  if (constant && rule.m == rule.mprime) {
    // Every nonzero q permutes the full grid, so all nonzero q tie exactly.
    forced = {0, 1};
    return true;
  }
  return false;
}

class GeneralWeightsState {
 public:
  GeneralWeightsState(const RuleSpec& rule, real d, std::size_t count)
      : rule_(rule), d_(d), count_(count), omega_cols_(static_cast<std::size_t>(rule.s)) {}

  /// R(n) = sum over v with tau in v, v within the first tau coordinates, of
  /// gamma_v D^{|v|-1} prod_{j in v, j != tau} omega_j(n).
  std::vector<real> weights_for(int tau) const {
    std::vector<real> r(count_, 0);
    const SubsetMask own = SubsetMask{1} << (tau - 1);
    const SubsetMask allowed = (own << 1) - 1;
    for (const auto& [v, g] : rule_.weights.general_weights()) {
      if (!(v & own) || (v & ~allowed) || g == 0.0) continue;
      const SubsetMask rest = v & ~own;
      const real c = static_cast<real>(g) * std::pow(d_, std::popcount(rest));
      for (std::size_t n = 0; n < count_; ++n) {
        real prod = c;
        for (SubsetMask u = rest; u != 0; u &= u - 1) prod *= omega_cols_[static_cast<std::size_t>(std::countr_zero(u))][n];
        r[n] += prod;
      }
    }
    return r;
  }

  void record(int tau, std::vector<real> omega_col) { omega_cols_[static_cast<std::size_t>(tau - 1)] = std::move(omega_col); }

 private:
  const RuleSpec& rule_;
  real d_;
  std::size_t count_;
  std::vector<std::vector<real>> omega_cols_;
};

}  // namespace

CbcResult cbc_slow(const CbcParams& params) {
  const auto t_start = Clock::now();
  RuleSpec rule = prepare(params);
  const std::size_t count = std::size_t{1} << rule.m;
  const std::uint64_t candidates = std::uint64_t{1} << rule.mprime;
  const real d = d_alpha(rule.alpha).d_alpha;
  const OmegaEvaluator omega(rule.alpha, rule.mprime);
  const bool product = rule.weights.is_product();

  std::vector<real> p(count, 1);
  GeneralWeightsState general(rule, d, count);
  ConstructionReport report;
  report.method = "slow";
  real b = 0;

  auto column_omega = [&](std::uint64_t q) {
    const auto col = generate_column(F2Poly(q), rule.modulus, rule.m, rule.mprime);
    std::vector<real> w(count);
    for (std::size_t n = 0; n < count; ++n) w[n] = omega(col[n]);
    return w;
  };

  for (int tau = 1; tau <= rule.s; ++tau) {
    const auto t0 = Clock::now();
    const real coef = product ? static_cast<real>(rule.weights.product_weights()[static_cast<std::size_t>(tau - 1)]) * d : d;
    const std::vector<real> w = product ? p : general.weights_for(tau);

    std::vector<std::uint64_t> forced;
    std::vector<Scored> scored;
    if (trivial_step(coef, w, rule, forced)) {
      for (std::uint64_t q : forced) {
        const auto om = column_omega(q);
        scored.push_back({q, step_sum(count, [&](std::size_t n) { return om[n]; }, w)});
      }
    } else {
      for (std::uint64_t q = 0; q < candidates; ++q) {
        const auto om = column_omega(q);
        scored.push_back({q, step_sum(count, [&](std::size_t n) { return om[n]; }, w)});
      }
    }
    const Scored chosen = select(scored, tie_tolerance(omega.at_zero(), w));
    rule.generators[static_cast<std::size_t>(tau - 1)] = F2Poly(chosen.q);
    b += coef * chosen.sum / static_cast<real>(count);

    auto om = column_omega(chosen.q);
    if (product) {
      for (std::size_t n = 0; n < count; ++n) p[n] *= update_factor(coef, om[n]);
    } else {
      general.record(tau, std::move(om));
    }
    report.steps.push_back({tau, F2Poly(chosen.q), b, seconds_since(t0), scored.size()});
  }
  report.bounds = cbc_bounds_on_grid(rule.alpha, rule.weights, rule.m, rule.mprime);
  report.total_seconds = seconds_since(t_start);
  return {std::move(rule), std::move(report)};
}

CbcResult cbc_fast(const CbcParams& params) {
  const auto t_start = Clock::now();
  if (!params.weights.is_product()) throw std::invalid_argument("the fast construction needs product weights");
  RuleSpec rule = prepare(params);
  const std::size_t count = std::size_t{1} << rule.m;
  const std::size_t size = std::size_t{1} << rule.mprime;
  const std::size_t L = size - 1;
  const real d = d_alpha(rule.alpha).d_alpha;
  const OmegaEvaluator omega(rule.alpha, rule.mprime);
  const real omega0 = omega.at_zero();
  const auto gammas = rule.weights.product_weights();

  // Powers of a primitive element and the discrete logarithm.
  const F2Poly g = find_primitive(rule.modulus);
  std::vector<std::uint64_t> g_pow(L);
  std::vector<std::uint32_t> dlog(size, 0);
  F2Poly cur = F2Poly::one();
  for (std::size_t j = 0; j < L; ++j) {
    g_pow[j] = cur.bits();
    dlog[cur.bits()] = static_cast<std::uint32_t>(j);
    cur = mul_mod(cur, g, rule.modulus);
  }
  // Circulant column c_j = omega(v(g^j / p)).
  std::vector<real> c(L);
  for (std::size_t j = 0; j < L; ++j) c[j] = omega(laurent_numerator(F2Poly(g_pow[j]), rule.modulus, rule.mprime));
  const CyclicConvolver conv(c, params.direct_threshold);

  // omega(x_n(q)) read from the column: n q = g^{log q + log n}.
  auto omega_of = [&](std::uint64_t q, std::size_t n) -> real {
    if (q == 0 || n == 0) return omega0;
    std::size_t idx = static_cast<std::size_t>(dlog[q]) + dlog[n];
    if (idx >= L) idx -= L;
    return c[idx];
  };
  auto exact_sum = [&](std::uint64_t q, const std::vector<real>& w) {
    return step_sum(count, [&](std::size_t n) { return omega_of(q, n); }, w);
  };

  std::vector<real> p(count, 1);
  std::vector<real> qvec(L);
  ConstructionReport report;
  report.method = "fast";
  real b = 0;

  for (int tau = 1; tau <= rule.s; ++tau) {
    const auto t0 = Clock::now();
    const real coef = static_cast<real>(gammas[static_cast<std::size_t>(tau - 1)]) * d;
    const real tie = tie_tolerance(omega0, p);

    std::vector<std::uint64_t> forced;
    std::vector<Scored> scored;
    if (trivial_step(coef, p, rule, forced)) {
      for (std::uint64_t q : forced) scored.push_back({q, exact_sum(q, p)});
    } else {
      // Q(k) = P(g^{-k} mod p) when that index is below 2^m, else 0.
      for (std::size_t k = 0; k < L; ++k) {
        const std::uint64_t n = g_pow[(L - k) % L];
        qvec[k] = n < count ? p[n] : 0;
      }
      const auto est = conv.apply(qvec);
      const real guard = conv.error_bound(qvec) + 4 * LDBL_EPSILON * omega0 * std::fabs(p[0]);
      const real zero_sum = exact_sum(0, p);
      real best = zero_sum;
      for (std::size_t i = 0; i < L; ++i) best = std::min(best, omega0 * p[0] + est[i]);
      const real threshold = best + tie + 2 * guard;
      if (zero_sum <= threshold) scored.push_back({0, zero_sum});
      for (std::size_t i = 0; i < L; ++i) {
        if (omega0 * p[0] + est[i] <= threshold) scored.push_back({g_pow[i], exact_sum(g_pow[i], p)});
      }
    }
    const Scored chosen = select(scored, tie);
    rule.generators[static_cast<std::size_t>(tau - 1)] = F2Poly(chosen.q);
    b += coef * chosen.sum / static_cast<real>(count);
    for (std::size_t n = 0; n < count; ++n) p[n] *= update_factor(coef, omega_of(chosen.q, n));
    report.steps.push_back({tau, F2Poly(chosen.q), b, seconds_since(t0), scored.size()});
  }
  report.bounds = cbc_bounds_on_grid(rule.alpha, rule.weights, rule.m, rule.mprime);
  report.total_seconds = seconds_since(t_start);
  return {std::move(rule), std::move(report)};
}

VerificationReport verify_construction(const RuleSpec& rule, bool require) {
  VerificationReport v;
  v.b = b_points(rule).value;
  v.grid = cbc_bounds_on_grid(rule.alpha, rule.weights, rule.m, rule.mprime);
  v.tightest = v.grid.front();
  for (const auto& g : v.grid) {
    if (g.value < v.tightest.value) v.tightest = g;
  }
  v.holds = v.b <= v.tightest.value;
  if (require && !v.holds) throw std::runtime_error("constructed rule violates the CBC error bound");
  return v;
}

}  // namespace polylat
