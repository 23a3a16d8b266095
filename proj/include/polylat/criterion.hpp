#pragma once

// The quality criterion B_{alpha,gamma}(q, p): the point form used for
// construction, a truncated dual-lattice oracle, and the a priori bounds.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polylat/numeric.hpp"
#include "polylat/points.hpp"

namespace polylat {

struct CriterionResult {
  real value = 0;
  /// Term of each point n (only filled when requested).
  std::vector<real> per_point;
  int alpha = 0;
  int s = 0;
  int m = 0;
  int mprime = 0;
  /// modulus and generators in hex, e.g. "13:1,7".
  std::string rule_id;
};

struct CriterionOptions {
  bool keep_terms = false;
  unsigned threads = 1;
};

/// True iff tr(k_1) q_1 + ... + tr(k_s) q_s mod p has degree < m' - m.
bool dual_membership(std::span<const std::uint64_t> k, const RuleSpec& rule);

/// (1/2^m) sum_n wal_k(x_n), counted in integers; exactly 0 or 1.
real character_sum(std::span<const std::uint64_t> k, const RuleSpec& rule);
real character_sum(std::span<const std::uint64_t> k, const PointSet& points);

/// B as the average over the points of
/// sum_{u nonempty} gamma_u D^|u| prod_{j in u} omega_alpha(x_{n,j}).
/// Product weights use prod_j (1 + gamma_j D omega) - 1, accumulated as
/// t <- t + a (1 + t) so the -1 never cancels against the product.
CriterionResult b_points(const RuleSpec& rule, const CriterionOptions& options = {});

struct DualTruncation {
  std::uint64_t k_max = 0;
  real value = 0;
  real tail = 0;
};

/// Truncated dual-lattice sum over k_j in E, k_j < k_max, with a rigorous
/// bound on the omitted part. Terms only depend on k_j through tr_{m'}(k_j),
/// so coefficients are folded per residue and the admissible residues are
/// enumerated. Limited to s <= 4, m' <= 8.
DualTruncation b_dual_oracle(const RuleSpec& rule, std::uint64_t k_max);

/// sum_{u nonempty} gamma_u^lambda D^{lambda |u|} (A_1^|u| + A_2^|u|) scaled
/// by 2^{-min(m/lambda, 4m')} and raised to 1/lambda.
real existence_bound(int alpha, const WeightModel& weights, int m, int mprime, real lambda);
/// As existence_bound with (A_1 + A_2)^|u|.
real cbc_bound(int alpha, const WeightModel& weights, int m, int mprime, real lambda);

/// 1/(2 alpha) + 0.01 in steps of 0.02, closed with 1.0.
std::vector<real> lambda_grid(int alpha);

struct LambdaBound {
  real lambda = 0;
  real value = 0;
};

/// cbc_bound at every grid lambda.
std::vector<LambdaBound> cbc_bounds_on_grid(int alpha, const WeightModel& weights, int m, int mprime);
/// The smallest of cbc_bounds_on_grid.
LambdaBound min_cbc_bound(int alpha, const WeightModel& weights, int m, int mprime);

/// prod_j (1 + a_j) - 1 without cancellation (a_j >= 0).
real product_minus_one(std::span<const real> a);

}  // namespace polylat
