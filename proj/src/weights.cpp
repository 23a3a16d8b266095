#include "polylat/weights.hpp"

#include <cmath>
#include <stdexcept>

namespace polylat {

namespace {

void check_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be finite and nonnegative");
}

}  // namespace

WeightModel WeightModel::product(std::vector<double> gammas) {
  for (double g : gammas) check_weight(g);
  WeightModel w;
  w.product_ = true;
  w.dimension_ = static_cast<int>(gammas.size());
  w.gammas_ = std::move(gammas);
  return w;
}

WeightModel WeightModel::general(int dimension, std::map<SubsetMask, double> weights) {
  if (dimension < 0 || dimension > kMaxGeneralWeightDimension) {
    throw std::invalid_argument("general weights are limited to dimension <= 20");
  }
  const SubsetMask full = dimension == 0 ? 0 : ((SubsetMask{1} << dimension) - 1);
  for (const auto& [u, g] : weights) {
    if ((u & ~full) != 0) throw std::invalid_argument("weight subset outside {1..s}");
    check_weight(g);
  }
  WeightModel w;
  w.product_ = false;
  w.dimension_ = dimension;
  w.general_ = std::move(weights);
  return w;
}

double WeightModel::gamma(SubsetMask u) const {
  if (product_) {
    double g = 1.0;
    for (int j = 0; u != 0; ++j, u >>= 1) {
      if (u & 1U) {
        if (j >= dimension_) throw std::out_of_range("weight subset outside {1..s}");
        g *= gammas_[static_cast<std::size_t>(j)];
      }
    }
    return g;
  }
  auto it = general_.find(u);
  if (it != general_.end()) return it->second;
  return u == 0 ? 1.0 : 0.0;
}

std::span<const double> WeightModel::product_weights() const {
  if (!product_) throw std::logic_error("product_weights() on general weights");
  return gammas_;
}

double WeightModel::empty_set_weight() const { return gamma(0); }

bool WeightModel::all_nonempty_zero() const {
  if (product_) {
    for (double g : gammas_) {
      if (g != 0.0) return false;
    }
    return true;
  }
  for (const auto& [u, g] : general_) {
    if (u != 0 && g != 0.0) return false;
  }
  return true;
}

WeightModel WeightModel::leading(int s) const {
  if (s < 0 || s > dimension_) throw std::out_of_range("leading() beyond weight dimension");
  if (product_) return product(std::vector<double>(gammas_.begin(), gammas_.begin() + s));
  const SubsetMask full = s == 0 ? 0 : ((SubsetMask{1} << s) - 1);
  std::map<SubsetMask, double> sub;
  for (const auto& [u, g] : general_) {
    if ((u & ~full) == 0) sub.emplace(u, g);
  }
  return general(s, std::move(sub));
}

}  // namespace polylat
