#include "arc/metrics.hpp"

#include "arc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace arc {

StabilityMetrics stability_metrics(std::span<const double> estimated) {
  if (estimated.size() < 2) throw std::invalid_argument("metrics: need at least 2 frames");
  std::vector<double> inc(estimated.size() - 1);
  double max_jump = 0.0;
  for (std::size_t t = 1; t < estimated.size(); ++t) {
    inc[t - 1] = estimated[t] - estimated[t - 1];
    max_jump = std::max(max_jump, std::abs(inc[t - 1]));
  }
  return {population_stddev(inc), max_jump};
}

Metrics compute_metrics(std::span<const double> estimated, std::span<const double> reference) {
  if (estimated.size() != reference.size()) {
    throw std::invalid_argument("metrics: estimate and reference differ in length");
  }
  const StabilityMetrics stab = stability_metrics(estimated);
  std::vector<double> abs_err(estimated.size());
  double sq = 0.0;
  for (std::size_t t = 0; t < estimated.size(); ++t) {
    const double e = estimated[t] - reference[t];
    abs_err[t] = std::abs(e);
    sq += e * e;
  }
  Metrics m;
  m.rmse = std::sqrt(sq / static_cast<double>(estimated.size()));
  m.p95 = quantile_linear(abs_err, 0.95);
  m.jitter = stab.jitter;
  m.max_jump = stab.max_jump;
  return m;
}

}  // namespace arc
