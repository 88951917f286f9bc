#pragma once

#include "arc/c2g.hpp"

#include <map>
#include <span>
#include <string>

namespace arc {

// Per-estimator pooling exponents; estimators without an entry weigh 1.
struct FusionWeights {
  std::map<std::string, double> weights;

  double weight(const std::string& estimator_id) const;
  void validate() const;
};

inline constexpr const char* kFusedId = "fused";

// Weighted log-linear pool: sum_i lambda_i log p_i, renormalized over the grid.
// Inputs are floored at log(kProbabilityFloor) first.
GridLogLikelihood fuse_loglik(std::span<const GridLogLikelihood> likelihoods,
                              const FusionWeights& weights = {});

// Shannon entropy in nats, 0 log 0 := 0.
double entropy_nats(std::span<const double> probabilities);
double posterior_entropy(const GridLogLikelihood& loglik);

}  // namespace arc
