#include "polylat/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "polylat/cbc.hpp"
#include "polylat/convolution.hpp"
#include "polylat/criterion.hpp"
#include "polylat/f2poly.hpp"
#include "polylat/kernel.hpp"
#include "polylat/kernel_exact.hpp"
#include "polylat/points.hpp"
#include "polylat/qmc.hpp"
#include "polylat/rule_io.hpp"

namespace polylat {

namespace {

std::string fmt(real v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << static_cast<double>(v);
  return ss.str();
}

struct Runner {
  std::vector<SelftestCheck> out;

  void run(const std::string& module, const std::string& name, const std::function<std::string(bool&)>& body) {
    SelftestCheck c{module, name, false, {}};
    try {
      c.detail = body(c.passed);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(c));
  }
};

RuleSpec small_rule(int s, int m, int mprime, int alpha, std::vector<double> gammas) {
  CbcParams p;
  p.s = s;
  p.m = m;
  p.mprime = mprime;
  p.alpha = alpha;
  p.weights = WeightModel::product(std::move(gammas));
  return cbc_slow(p).rule;
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  Runner r;

  r.run("f2poly", "irreducible counts match the necklace formula up to degree 12", [](bool& ok) {
    // N(d) = (1/d) sum_{e | d} mu(d/e) 2^e
    auto mobius = [](int n) {
      int result = 1;
      for (int p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        result = -result;
      }
      return n > 1 ? -result : result;
    };
    ok = true;
    for (int d = 1; d <= 12; ++d) {
      long expected = 0;
      for (int e = 1; e <= d; ++e) {
        if (d % e == 0) expected += mobius(d / e) * (1L << e);
      }
      expected /= d;
      long count = 0;
      for (std::uint64_t b = 1ULL << d; b < (2ULL << d); ++b) count += is_irreducible(F2Poly(b));
      if (count != expected) {
        ok = false;
        return "degree " + std::to_string(d) + ": " + std::to_string(count) + " vs " + std::to_string(expected);
      }
    }
    return std::string("degrees 1..12");
  });

  r.run("f2poly", "division identity a = q b + r on random pairs", [](bool& ok) {
    std::mt19937_64 rng(7);
    ok = true;
    for (int i = 0; i < 2000; ++i) {
      const F2Poly a(rng() >> 34);
      const F2Poly b((rng() >> 44) | 1);
      const auto qr = divrem(a, b);
      if (mul(qr.quotient, b) + qr.remainder != a || !(qr.remainder.degree() < b.degree())) ok = false;
    }
    return std::string("2000 pairs");
  });

  r.run("points", "m = m' columns permute the grid", [](bool& ok) {
    const F2Poly p = find_irreducible(6);
    ok = true;
    for (std::uint64_t q = 1; q < 64; ++q) {
      auto col = generate_column(F2Poly(q), p, 6, 6);
      std::vector<bool> seen(64, false);
      for (auto v : col) seen[v] = true;
      for (bool b : seen) ok = ok && b;
    }
    return std::string("p of degree 6, all q != 0");
  });

  r.run("points", "tent transform maps 1 - x to x", [](bool& ok) {
    ok = true;
    for (std::uint64_t l = 1; l < 64; ++l) {
      if (tent_transform(Dyadic{l, 6}).value() != tent_transform(Dyadic{64 - l, 6}).value()) ok = false;
    }
    return std::string("precision 6");
  });

  r.run("kernel", "omega_2(0) = A_{2,1,1} = 5/14 and D_2 = 59/144", [](bool& ok) {
    const real w0 = OmegaEvaluator(2, 6).at_zero();
    const real a = a_lambda_1(2, 1.0L);
    const real d = d_alpha(2).d_alpha;
    ok = std::fabs(w0 - 5.0L / 14) < 1e-12L && std::fabs(a - 5.0L / 14) < 1e-12L && std::fabs(d - 59.0L / 144) < 1e-12L;
    return "omega(0)=" + fmt(w0) + " D=" + fmt(d);
  });

  r.run("kernel", "closed-form omega matches the truncated series", [](bool& ok) {
    ok = true;
    real worst = 0;
    const std::uint64_t k_max = std::uint64_t{1} << 20;
    for (int alpha = 2; alpha <= 3; ++alpha) {
      const real tail = omega_series_tail(alpha, k_max);
      for (int mp = 2; mp <= 6; ++mp) {
        const auto series = omega_series_grid(alpha, mp, k_max);
        const OmegaEvaluator omega(alpha, mp);
        for (std::uint64_t l = 0; l < (std::uint64_t{1} << mp); ++l) {
          const real diff = std::fabs(omega(l) - series[l]);
          worst = std::max(worst, diff);
          if (diff > tail + 1e-10L) ok = false;
        }
      }
    }
    return "max diff " + fmt(worst);
  });

  r.run("criterion", "character sums equal dual membership", [](bool& ok) {
    const RuleSpec rule = small_rule(2, 3, 4, 2, {1.0, 0.5});
    ok = true;
    const std::uint64_t top = std::uint64_t{1} << 6;
    for (std::uint64_t k1 = 0; k1 < top; ++k1) {
      for (std::uint64_t k2 = 0; k2 < top; ++k2) {
        const std::uint64_t k[2] = {k1, k2};
        const real c = character_sum(k, rule);
        if (c != (dual_membership(k, rule) ? 1 : 0)) ok = false;
      }
    }
    return std::string("s=2 m=3 m'=4, k < 64");
  });

  r.run("criterion", "point form equals the dual-lattice sum", [](bool& ok) {
    const RuleSpec rule = small_rule(2, 3, 4, 2, {1.0, 0.5});
    const real b = b_points(rule).value;
    const auto dual = b_dual_oracle(rule, std::uint64_t{1} << 16);
    const real diff = std::fabs(b - dual.value);
    ok = diff <= dual.tail + 1e-12L;
    return "diff " + fmt(diff) + " tail " + fmt(dual.tail);
  });

  r.run("convolution", "transform agrees with the direct sum", [](bool& ok) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<real> a(1023), b(1023);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const auto d = cyclic_convolution_direct(a, b);
    const auto f = cyclic_convolution_fft(a, b);
    real worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(d[i] - f[i]));
    ok = worst < 1e-12L;
    return "max diff " + fmt(worst);
  });

  r.run("cbc", "fast and slow constructions agree", [](bool& ok) {
    ok = true;
    for (int alpha = 2; alpha <= 3; ++alpha) {
      CbcParams p;
      p.s = 3;
      p.m = 4;
      p.mprime = 6;
      p.alpha = alpha;
      p.weights = WeightModel::product({0.5, 0.25, 0.125});
      const auto slow = cbc_slow(p);
      const auto fast = cbc_fast(p);
      for (int j = 0; j < p.s; ++j) {
        const auto& a = slow.report.steps[static_cast<std::size_t>(j)];
        const auto& b = fast.report.steps[static_cast<std::size_t>(j)];
        if (a.q != b.q || std::fabs(a.b - b.b) > 1e-9L * std::fabs(a.b)) ok = false;
      }
    }
    return std::string("s=3 m=4 m'=6");
  });

  r.run("cbc", "constructed rules meet the CBC bound", [](bool& ok) {
    CbcParams p;
    p.s = 3;
    p.m = 6;
    p.alpha = 2;
    p.weights = WeightModel::product({0.5, 0.25, 0.125});
    const auto v = verify_construction(cbc_fast(p).rule, false);
    ok = v.holds;
    return "B=" + fmt(v.b) + " bound=" + fmt(v.tightest.value);
  });

  r.run("qmc", "constant and linear integrands are exact", [](bool& ok) {
    const RuleSpec rule = small_rule(2, 4, 4, 2, {1.0, 1.0});
    const auto one = integrate(rule, make_integrand("one", 2), 4, 1);
    const auto lin = integrate(rule, make_integrand("linear", 2), 4, 1);
    ok = std::fabs(one.estimate - 1) < 1e-15L && *lin.rms_error < 1e-12L;
    return "linear rms " + fmt(*lin.rms_error);
  });

  r.run("qmc", "mean kernel error is within the bound", [](bool& ok) {
    const RuleSpec rule = small_rule(2, 5, 5, 2, {1.0, 0.5});
    const auto c = mse_vs_bound(rule, 16, 3);
    ok = c.holds;
    return "mean " + fmt(c.mean) + " B " + fmt(c.b);
  });

  r.run("cli", "rule file round trip is byte-identical", [](bool& ok) {
    RuleFile f;
    f.rule = small_rule(3, 3, 5, 2, {0.9, 0.5, 0.1});
    const std::string once = write_rule(f);
    ok = write_rule(read_rule(once)) == once;
    return std::string("s=3");
  });

  return r.out;
}

nlohmann::json constants_report(int max_alpha) {
  using nlohmann::json;
  auto both = [](const exact::Rational& q) {
    std::ostringstream ss;
    ss << q;
    return json{{"exact", ss.str()}, {"value", static_cast<double>(exact::to_real(q))}};
  };
  json out = json::array();
  for (int alpha = 2; alpha <= max_alpha; ++alpha) {
    json c_tau = json::array();
    for (int tau = 1; tau <= alpha; ++tau) c_tau.push_back(both(exact::c_tau(tau)));
    json c_prime = json::array();
    for (int nu = 1; nu <= alpha; ++nu) c_prime.push_back(both(exact::c_prime(alpha, nu)));
    out.push_back({{"alpha", alpha},
                   {"D_alpha", both(exact::d_alpha(alpha))},
                   {"D_alpha_argmax_nu", exact::d_alpha_argmax(alpha)},
                   {"C_tau", c_tau},
                   {"C_tilde_2alpha", both(exact::c_tilde(alpha))},
                   {"C_prime", c_prime},
                   {"A_1_at_lambda_1", both(exact::a_lambda_1(alpha, exact::Rational(4)))},
                   {"A_2_at_lambda_1", both(exact::a_lambda_2(alpha, exact::Rational(4)))},
                   {"omega_at_zero", static_cast<double>(OmegaEvaluator(alpha, 2).at_zero())}});
  }
  return {{"version", 1}, {"constants", out}};
}

}  // namespace polylat
