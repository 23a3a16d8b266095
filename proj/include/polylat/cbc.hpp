#pragma once

// Component-by-component construction of the generating vector.

#include <cstdint>
#include <string>
#include <vector>

#include "polylat/convolution.hpp"
#include "polylat/criterion.hpp"
#include "polylat/points.hpp"

namespace polylat {

struct CbcParams {
  int s = 1;
  int m = 0;
  /// Modulus degree; 0 selects max(1, ceil(alpha m / 2)).
  int mprime = 0;
  int alpha = 2;
  WeightModel weights;
  /// Zero selects the smallest-encoding irreducible polynomial of degree m'.
  F2Poly modulus;
  std::size_t direct_threshold = kDirectConvolutionThreshold;
};

int default_mprime(int alpha, int m);

struct CbcStep {
  int tau = 0;
  F2Poly q;
  /// B of the first tau coordinates after the selection.
  real b = 0;
  double seconds = 0;
  /// Candidates scored exactly (all 2^{m'} on the slow path).
  std::size_t exact_scores = 0;
};

struct ConstructionReport {
  std::string method;
  std::vector<CbcStep> steps;
  std::vector<LambdaBound> bounds;
  double total_seconds = 0;
};

struct CbcResult {
  RuleSpec rule;
  ConstructionReport report;
};

/// Exhaustive search over all q in G_{m'} at every step, scoring each
/// candidate from its point column. Product or general weights.
CbcResult cbc_slow(const CbcParams& params);

/// The same selections through one cyclic convolution per step. Candidates
/// whose estimate lies within the tie tolerance plus twice the convolution
/// error bound of the best estimate are re-scored with the exact scorer of
/// the slow path, so both paths choose identically. Product weights only.
CbcResult cbc_fast(const CbcParams& params);

struct VerificationReport {
  real b = 0;
  std::vector<LambdaBound> grid;
  LambdaBound tightest;
  bool holds = false;
};

/// Recomputes B with b_points and compares it with the CBC bound on the
/// lambda grid. Throws std::runtime_error when `require` is set and the
/// bound is violated.
VerificationReport verify_construction(const RuleSpec& rule, bool require = true);

}  // namespace polylat
