#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace polylat {

/// Bitmask of a coordinate subset u of {1..s}: bit j-1 set iff j is in u.
using SubsetMask = std::uint32_t;

/// Largest dimension for explicitly listed (general) weights.
inline constexpr int kMaxGeneralWeightDimension = 20;

/// Weights gamma_u of the weighted Sobolev space.
///
/// Product weights store gamma_1..gamma_s with gamma_u = prod_{j in u} gamma_j
/// and gamma_{} = 1. General weights store an explicit subset map; missing
/// subsets have weight 0 except the empty set, which defaults to 1.
class WeightModel {
 public:
  WeightModel() = default;

  static WeightModel product(std::vector<double> gammas);
  static WeightModel general(int dimension, std::map<SubsetMask, double> weights);

  bool is_product() const { return product_; }
  int dimension() const { return dimension_; }

  /// gamma_u for any subset of {1..dimension}.
  double gamma(SubsetMask u) const;
  /// Product weights only.
  std::span<const double> product_weights() const;
  /// General weights as stored (without the implicit empty-set default).
  const std::map<SubsetMask, double>& general_weights() const { return general_; }
  double empty_set_weight() const;

  /// True when every gamma_u with u nonempty is zero.
  bool all_nonempty_zero() const;

  /// Restriction to the first `s` coordinates.
  WeightModel leading(int s) const;

  friend bool operator==(const WeightModel&, const WeightModel&) = default;

 private:
  bool product_ = true;
  int dimension_ = 0;
  std::vector<double> gammas_;
  std::map<SubsetMask, double> general_;
};

}  // namespace polylat
