#pragma once

#include <span>

namespace arc {

// Quantile by linear interpolation between order statistics (inclusive
// method: position p * (n - 1)). p in [0, 1]; values non-empty.
double quantile_linear(std::span<const double> values, double p);

inline double median(std::span<const double> values) { return quantile_linear(values, 0.5); }

double logsumexp(std::span<const double> values);

double mean(std::span<const double> values);

// Population (1/n) standard deviation.
double population_stddev(std::span<const double> values);

}  // namespace arc
