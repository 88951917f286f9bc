#pragma once

#include "arc/estimators.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arc {

// Uniform RPM hypothesis grid r(g) = r_min + g * step, g = 0..G-1.
class RpmGrid {
public:
  RpmGrid(double r_min, double r_max, std::size_t n_points);

  // Grid from a resolution; (r_max - r_min) / step must be an integer
  // within 1e-9 relative.
  static RpmGrid with_step(double r_min, double r_max, double step);

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  std::size_t size() const { return n_; }
  double step() const { return step_; }
  double value(std::size_t g) const { return g + 1 == n_ ? r_max_ : r_min_ + g * step_; }
  std::vector<double> values() const;

  // Nearest grid index for an RPM value (clamped to the grid).
  std::size_t nearest_index(double rpm) const;

  bool contains(double rpm) const { return rpm >= r_min_ && rpm <= r_max_; }

  friend bool operator==(const RpmGrid& a, const RpmGrid& b) {
    return a.r_min_ == b.r_min_ && a.r_max_ == b.r_max_ && a.n_ == b.n_;
  }

private:
  double r_min_;
  double r_max_;
  std::size_t n_;
  double step_;
};

// Log of a probability mass function over an RpmGrid.
struct GridLogLikelihood {
  RpmGrid grid;
  std::vector<double> log_values;
  std::string estimator_id;

  std::vector<double> probabilities() const;
};

// Smallest probability kept in log form; log(0) is floored here.
inline constexpr double kProbabilityFloor = 1e-300;

struct C2gConfig {
  double beta{1.0};
  double kernel_bandwidth_rpm{0.5};
  double eps_norm{1e-10};
  // Kernel support radius in bandwidths; beyond it a curve point contributes nothing.
  double kernel_truncation_sigmas{6.0};

  void validate() const;
};

// Kernel profile K(u) with u in bandwidth units.
using KernelFn = double (*)(double);
double gaussian_kernel(double u);

double map_axis_to_rpm(double z, AxisType axis_type, double sample_rate_hz);

// (c - median) / (IQR + eps), quartiles by linear interpolation.
std::vector<double> robust_standardize(std::span<const double> values, double eps);

// E = -kappa * standardized.
std::vector<double> to_energy(std::span<const double> standardized, Polarity polarity);

// Kernel aggregation of Gibbs weights exp(-beta E[m]) onto the grid,
// normalized over the grid and returned in log form (floored at
// kProbabilityFloor). Throws "curve disjoint from grid" when no curve point
// lands within the kernel support of the grid.
GridLogLikelihood curve_to_grid_loglik(const EvidenceCurve& curve, const RpmGrid& grid,
                                       const C2gConfig& cfg, double sample_rate_hz,
                                       KernelFn kernel = gaussian_kernel);

}  // namespace arc
