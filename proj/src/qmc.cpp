#include "polylat/qmc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "polylat/cbc.hpp"
#include "polylat/criterion.hpp"
#include "polylat/kernel.hpp"

namespace polylat {

namespace {

struct MeanStderr {
  real mean = 0;
  real std_error = 0;
};

MeanStderr mean_stderr(const std::vector<real>& v) {
  MeanStderr r;
  if (v.empty()) return r;
  CompensatedSum<real> acc;
  for (real x : v) acc += x;
  r.mean = acc.value() / static_cast<real>(v.size());
  if (v.size() > 1) {
    CompensatedSum<real> sq;
    for (real x : v) sq += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(sq.value() / static_cast<real>(v.size() - 1) / static_cast<real>(v.size()));
  }
  return r;
}

}  // namespace

std::vector<std::string> integrand_names() { return {"one", "linear", "prodx", "b2prod", "exp", "genz"}; }

Integrand make_integrand(const std::string& name, int s) {
  if (s < 1) throw std::invalid_argument("integrand dimension must be >= 1");
  Integrand f;
  f.name = name;
  f.dimension = s;
  if (name == "one") {
    f.f = [](std::span<const real>) { return 1.0L; };
    f.exact = 1;
  } else if (name == "linear") {
    f.f = [](std::span<const real> x) {
      real t = 0;
      for (real v : x) t += v;
      return t;
    };
    f.exact = static_cast<real>(s) / 2;
  } else if (name == "prodx") {
    f.f = [](std::span<const real> x) {
      real t = 1;
      for (real v : x) t *= v;
      return t;
    };
    f.exact = std::ldexp(1.0L, -s);
  } else if (name == "b2prod") {
    f.f = [](std::span<const real> x) {
      real t = 1;
      for (real v : x) t *= 1 + (v * v - v + 1.0L / 6);
      return t;
    };
    f.exact = 1;
  } else if (name == "exp") {
    f.f = [](std::span<const real> x) {
      real t = 1;
      for (real v : x) t *= std::exp(v);
      return t;
    };
    f.exact = std::pow(std::numbers::e_v<real> - 1, static_cast<real>(s));
  } else if (name == "genz") {
    f.f = [](std::span<const real> x) {
      real t = 1;
      for (real v : x) t /= 1 + (v - 0.5L) * (v - 0.5L);
      return t;
    };
    f.exact = std::pow(2 * std::atan(0.5L), static_cast<real>(s));
  } else {
    throw std::invalid_argument("unknown integrand '" + name + "'");
  }
  return f;
}

real integrate_points(const PointSet& points, const Integrand& f) {
  if (points.dimension() != f.dimension) throw std::invalid_argument("integrand dimension differs from s");
  std::vector<real> x(static_cast<std::size_t>(points.dimension()));
  CompensatedSum<real> acc;
  for (std::size_t n = 0; n < points.size(); ++n) {
    points.values(n, x);
    acc += f.f(x);
  }
  return acc.value() / static_cast<real>(points.size());
}

IntegrationResult integrate(const RuleSpec& rule, const Integrand& f, const std::vector<ShiftVector>& shifts) {
  if (shifts.empty()) throw std::invalid_argument("need at least one randomization");
  const PointSet raw = generate_point_set(rule);
  IntegrationResult r;
  r.exact = f.exact;
  for (const auto& sigma : shifts) {
    r.replicates.push_back(integrate_points(randomize(raw, sigma), f));
    r.seeds.push_back(sigma.seed);
  }
  const auto ms = mean_stderr(r.replicates);
  r.estimate = ms.mean;
  r.std_error = ms.std_error;
  if (f.exact) {
    CompensatedSum<real> sq;
    for (real v : r.replicates) sq += (v - *f.exact) * (v - *f.exact);
    r.rms_error = std::sqrt(sq.value() / static_cast<real>(r.replicates.size()));
  }
  return r;
}

IntegrationResult integrate(const RuleSpec& rule, const Integrand& f, int replicates, std::uint64_t seed, int precision) {
  if (replicates < 1) throw std::invalid_argument("need at least one randomization");
  std::vector<ShiftVector> shifts;
  for (int r = 0; r < replicates; ++r) {
    shifts.push_back(draw_shift(rule.s, replicate_seed(seed, static_cast<std::uint64_t>(r)), precision));
  }
  return integrate(rule, f, shifts);
}

KernelError worst_case_error_kernel(const PointSet& points, int alpha, const WeightModel& weights,
                                    const KernelErrorOptions& options) {
  const auto s = static_cast<std::size_t>(points.dimension());
  if (weights.dimension() != points.dimension()) throw std::invalid_argument("weight dimension differs from s");
  const std::size_t count = points.size();
  if (count == 0) throw std::invalid_argument("empty point set");
  const SobolevKernel kernel(alpha, weights);
  const auto a = static_cast<std::size_t>(alpha);

  std::vector<real> x(count * s);
  std::vector<real> feat(count * s * a);
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t j = 0; j < s; ++j) {
      const real v = points.value(n, static_cast<int>(j));
      x[n * s + j] = v;
      kernel.features(v, {&feat[(n * s + j) * a], a});
    }
  }

  std::vector<real> coef;
  if (weights.is_product()) {
    for (double g : weights.product_weights()) coef.push_back(static_cast<real>(g));
  }
  auto pair_term = [&](std::size_t n, std::size_t k) -> real {
    if (weights.is_product()) {
      real t = 0;
      for (std::size_t j = 0; j < s; ++j) {
        if (coef[j] == 0) continue;
        const real k1 = kernel.k1_from_features({&feat[(n * s + j) * a], a}, {&feat[(k * s + j) * a], a}, x[n * s + j],
                                                x[k * s + j]);
        t += coef[j] * k1 * (1 + t);
      }
      return t;
    }
    return kernel.minus_empty({&x[n * s], s}, {&x[k * s], s});
  };

  KernelError out;
  const bool exact = count <= (std::size_t{1} << options.exact_max_m);
  if (exact) {
    const real total = reduce_blocks(count, 16, options.threads, [&](std::size_t lo, std::size_t hi) {
      CompensatedSum<real> acc;
      for (std::size_t n = lo; n < hi; ++n) {
        CompensatedSum<real> row;
        for (std::size_t k = n + 1; k < count; ++k) row += pair_term(n, k);
        acc += 2 * row.value();
        acc += pair_term(n, n);
      }
      return acc.value();
    });
    out.value = total / (static_cast<real>(count) * static_cast<real>(count));
    return out;
  }
  SplitMix64 rng(options.seed);
  CompensatedSum<real> acc;
  const std::uint64_t mask = count - 1;  // count is a power of two
  for (std::size_t i = 0; i < options.sampled_pairs; ++i) {
    const std::size_t n = rng.next() & mask;
    const std::size_t k = rng.next() & mask;
    acc += pair_term(n, k);
  }
  out.value = acc.value() / static_cast<real>(options.sampled_pairs);
  out.estimated = true;
  return out;
}

MseComparison mse_vs_bound(const RuleSpec& rule, int replicates, std::uint64_t seed, const KernelErrorOptions& options) {
  if (replicates < 1) throw std::invalid_argument("need at least one randomization");
  const PointSet raw = generate_point_set(rule);
  MseComparison c;
  for (int r = 0; r < replicates; ++r) {
    const auto sigma = draw_shift(rule.s, replicate_seed(seed, static_cast<std::uint64_t>(r)));
    const auto e2 = worst_case_error_kernel(randomize(raw, sigma), rule.alpha, rule.weights, options);
    c.replicates.push_back(e2.value);
    c.estimated = c.estimated || e2.estimated;
  }
  const auto ms = mean_stderr(c.replicates);
  c.mean = ms.mean;
  c.std_error = ms.std_error;
  c.b = b_points(rule).value;
  c.holds = c.mean - 3 * c.std_error <= c.b;
  return c;
}

real fit_slope(std::span<const real> x, std::span<const real> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<real>::quiet_NaN();
  real mx = 0;
  real my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<real>(x.size());
  my /= static_cast<real>(y.size());
  real sxy = 0;
  real sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

Slopes slopes(const std::vector<StudyRecord>& recs, int half_from, real (*pick)(const StudyRecord&)) {
  std::vector<real> xf, yf, xh, yh;
  for (const auto& r : recs) {
    const real y = std::log2(pick(r));
    xf.push_back(r.m);
    yf.push_back(y);
    if (r.m >= half_from) {
      xh.push_back(r.m);
      yh.push_back(y);
    }
  }
  return {fit_slope(xf, yf), fit_slope(xh, yh)};
}

}  // namespace

ErrorStudy convergence_study(int s, int alpha, const WeightModel& weights, int m_lo, int m_hi, const StudyOptions& options) {
  if (m_lo < 0 || m_hi < m_lo) throw std::invalid_argument("need 0 <= m_lo <= m_hi");
  const Integrand f = make_integrand(options.integrand, s);
  if (!f.exact) throw std::invalid_argument("convergence study needs an integrand with a known integral");
  ErrorStudy study;
  study.s = s;
  study.alpha = alpha;
  study.half_from = m_lo + (m_hi - m_lo + 1) / 2;
  for (int m = m_lo; m <= m_hi; ++m) {
    CbcParams params;
    params.s = s;
    params.m = m;
    params.mprime = options.mprime;
    params.alpha = alpha;
    params.weights = weights;
    const CbcResult built = weights.is_product() ? cbc_fast(params) : cbc_slow(params);
    StudyRecord rec;
    rec.m = m;
    rec.mprime = built.rule.mprime;
    rec.n = std::uint64_t{1} << m;
    rec.b = b_points(built.rule).value;
    rec.generators = built.rule.generators;
    rec.modulus = built.rule.modulus;
    rec.rms_error = *integrate(built.rule, f, options.replicates, options.seed).rms_error;
    if (options.kernel_mse) {
      const auto mse = mse_vs_bound(built.rule, options.replicates, options.seed, options.kernel);
      rec.mse_mean = mse.mean;
      rec.mse_stderr = mse.std_error;
      rec.mse_estimated = mse.estimated;
    }
    study.records.push_back(std::move(rec));
  }
  study.b_slope = slopes(study.records, study.half_from, [](const StudyRecord& r) { return r.b; });
  study.rms_slope = slopes(study.records, study.half_from, [](const StudyRecord& r) { return r.rms_error; });
  if (options.kernel_mse) {
    study.mse_slope = slopes(study.records, study.half_from, [](const StudyRecord& r) { return *r.mse_mean; });
  }
  return study;
}

}  // namespace polylat
