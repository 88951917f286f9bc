#include "arc/fusion.hpp"

#include "arc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arc {

double FusionWeights::weight(const std::string& estimator_id) const {
  const auto it = weights.find(estimator_id);
  return it == weights.end() ? 1.0 : it->second;
}

void FusionWeights::validate() const {
  for (const auto& [id, w] : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("fusion weight for '" + id + "' must be a finite value >= 0");
    }
  }
}

GridLogLikelihood fuse_loglik(std::span<const GridLogLikelihood> likelihoods,
                              const FusionWeights& weights) {
  if (likelihoods.empty()) throw std::invalid_argument("fuse_loglik: no likelihoods to fuse");
  weights.validate();
  const RpmGrid& grid = likelihoods.front().grid;
  const double floor = std::log(kProbabilityFloor);

  GridLogLikelihood fused{grid, std::vector<double>(grid.size(), 0.0), kFusedId};
  bool any_positive = false;
  for (const auto& lik : likelihoods) {
    if (!(lik.grid == grid) || lik.log_values.size() != grid.size()) {
      throw std::invalid_argument("fuse_loglik: grid mismatch for '" + lik.estimator_id + "'");
    }
    const double lambda = weights.weight(lik.estimator_id);
    if (lambda == 0.0) continue;
    any_positive = true;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      fused.log_values[g] += lambda * std::max(lik.log_values[g], floor);
    }
  }
  if (!any_positive) throw std::invalid_argument("fuse_loglik: all fusion weights are zero");

  const double norm = logsumexp(fused.log_values);
  for (double& v : fused.log_values) v -= norm;
  return fused;
}

double entropy_nats(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double posterior_entropy(const GridLogLikelihood& loglik) {
  double h = 0.0;
  for (double lv : loglik.log_values) {
    const double p = std::exp(lv);
    if (p > 0.0) h -= p * lv;
  }
  return h;
}

}  // namespace arc
