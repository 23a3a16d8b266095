#pragma once

// Randomized QMC integration with constructed rules, the squared worst-case
// error of realized point sets, and convergence studies.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polylat/numeric.hpp"
#include "polylat/points.hpp"

namespace polylat {

struct Integrand {
  std::string name;
  int dimension = 0;
  std::function<real(std::span<const real>)> f;
  std::optional<real> exact;
};

/// Built-in test integrands on [0,1]^s:
///   one      1                               exact 1
///   linear   sum_j x_j                       exact s/2
///   prodx    prod_j x_j                      exact 2^{-s}
///   b2prod   prod_j (1 + B_2(x_j))           exact 1
///   exp      prod_j e^{x_j}                  exact (e - 1)^s
///   genz     prod_j 1/(1 + (x_j - 1/2)^2)    exact (2 atan(1/2))^s
Integrand make_integrand(const std::string& name, int s);
std::vector<std::string> integrand_names();

/// (1/N) sum_n f(z_n), compensated.
real integrate_points(const PointSet& points, const Integrand& f);

struct IntegrationResult {
  real estimate = 0;  ///< mean over replicates
  real std_error = 0;  ///< standard error of the mean
  std::optional<real> exact;
  std::optional<real> rms_error;
  std::vector<real> replicates;
  std::vector<std::uint64_t> seeds;
};

/// R randomizations with shift seeds replicate_seed(seed, r).
IntegrationResult integrate(const RuleSpec& rule, const Integrand& f, int replicates, std::uint64_t seed,
                            int precision = kDefaultShiftPrecision);
/// Explicit shifts (for example zero shifts).
IntegrationResult integrate(const RuleSpec& rule, const Integrand& f, const std::vector<ShiftVector>& shifts);

struct KernelErrorOptions {
  /// Exact O(N^2) double sum up to 2^exact_max_m points; random pairs above.
  int exact_max_m = 12;
  std::size_t sampled_pairs = 1u << 22;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct KernelError {
  real value = 0;
  bool estimated = false;
};

/// e^2 = (1/N^2) sum_{n,n'} K(z_n, z_n') - gamma_{}, for points in [0,1]^s.
KernelError worst_case_error_kernel(const PointSet& points, int alpha, const WeightModel& weights,
                                    const KernelErrorOptions& options = {});

struct MseComparison {
  real mean = 0;
  real std_error = 0;
  real b = 0;
  bool estimated = false;
  bool holds = false;  ///< mean - 3 stderr <= B
  std::vector<real> replicates;
};

MseComparison mse_vs_bound(const RuleSpec& rule, int replicates, std::uint64_t seed,
                           const KernelErrorOptions& options = {});

/// Least-squares slope of y against x.
real fit_slope(std::span<const real> x, std::span<const real> y);

struct StudyOptions {
  int replicates = 64;
  std::uint64_t seed = 42;
  std::string integrand = "b2prod";
  /// 0 selects max(1, ceil(alpha m / 2)) for every m.
  int mprime = 0;
  bool kernel_mse = true;
  KernelErrorOptions kernel;
};

struct StudyRecord {
  int m = 0;
  int mprime = 0;
  std::uint64_t n = 0;
  real b = 0;
  std::optional<real> mse_mean;
  std::optional<real> mse_stderr;
  bool mse_estimated = false;
  real rms_error = 0;
  std::vector<F2Poly> generators;
  F2Poly modulus;
};

struct Slopes {
  real full = 0;
  real half = 0;
};

struct ErrorStudy {
  int s = 0;
  int alpha = 0;
  std::vector<StudyRecord> records;
  Slopes b_slope;
  Slopes rms_slope;
  std::optional<Slopes> mse_slope;
  /// First m of the upper-half fit range.
  int half_from = 0;
};

ErrorStudy convergence_study(int s, int alpha, const WeightModel& weights, int m_lo, int m_hi,
                             const StudyOptions& options = {});

}  // namespace polylat
