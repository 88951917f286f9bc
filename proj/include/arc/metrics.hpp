#pragma once

#include <span>

namespace arc {

struct Metrics {
  double rmse{0.0};
  double p95{0.0};       // 95th percentile of |error|, linear interpolation
  double jitter{0.0};    // population std-dev of successive increments
  double max_jump{0.0};  // max |increment|
};

struct StabilityMetrics {
  double jitter{0.0};
  double max_jump{0.0};
};

// Requires equal lengths >= 2.
Metrics compute_metrics(std::span<const double> estimated, std::span<const double> reference);

// Reference-free part; requires length >= 2.
StabilityMetrics stability_metrics(std::span<const double> estimated);

}  // namespace arc
