#include "arc/c2g.hpp"

#include "arc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arc {

RpmGrid::RpmGrid(double r_min, double r_max, std::size_t n_points)
    : r_min_(r_min), r_max_(r_max), n_(n_points), step_(0.0) {
  if (!(r_min > 0.0)) throw std::invalid_argument("grid: r_min must be positive");
  if (!(r_max > r_min)) throw std::invalid_argument("grid: r_max must exceed r_min");
  if (n_points < 2) throw std::invalid_argument("grid: need at least 2 points");
  step_ = (r_max - r_min) / static_cast<double>(n_points - 1);
}

RpmGrid RpmGrid::with_step(double r_min, double r_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid: step must be positive");
  const double intervals = (r_max - r_min) / step;
  const double rounded = std::round(intervals);
  if (!(rounded >= 1.0) || std::abs(intervals - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw std::invalid_argument("grid: (max - min) must be a whole multiple of step");
  }
  return RpmGrid(r_min, r_max, static_cast<std::size_t>(rounded) + 1);
}

std::vector<double> RpmGrid::values() const {
  std::vector<double> v(n_);
  for (std::size_t g = 0; g < n_; ++g) v[g] = value(g);
  return v;
}

std::size_t RpmGrid::nearest_index(double rpm) const {
  const double pos = std::round((rpm - r_min_) / step_);
  if (pos <= 0.0) return 0;
  if (pos >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(pos);
}

std::vector<double> GridLogLikelihood::probabilities() const {
  std::vector<double> p(log_values.size());
  std::transform(log_values.begin(), log_values.end(), p.begin(),
                 [](double v) { return std::exp(v); });
  return p;
}

void C2gConfig::validate() const {
  if (!(beta > 0.0)) throw std::invalid_argument("c2g: beta must be positive");
  if (!(kernel_bandwidth_rpm > 0.0)) {
    throw std::invalid_argument("c2g: kernel_bandwidth_rpm must be positive");
  }
  if (!(eps_norm > 0.0)) throw std::invalid_argument("c2g: eps_norm must be positive");
  if (!(kernel_truncation_sigmas > 0.0)) {
    throw std::invalid_argument("c2g: kernel_truncation_sigmas must be positive");
  }
}

double gaussian_kernel(double u) { return std::exp(-0.5 * u * u); }

double map_axis_to_rpm(double z, AxisType axis_type, double sample_rate_hz) {
  switch (axis_type) {
    case AxisType::Lag:
    case AxisType::Quefrency:
      if (!(z > 0.0)) throw std::invalid_argument("lag/quefrency coordinate must be positive");
      return 60.0 * sample_rate_hz / z;
    case AxisType::Hz:
      return 60.0 * z;
    case AxisType::Rpm:
      return z;
  }
  throw std::invalid_argument("unknown axis type");
}

std::vector<double> robust_standardize(std::span<const double> values, double eps) {
  const double med = median(values);
  const double iqr = quantile_linear(values, 0.75) - quantile_linear(values, 0.25);
  const double denom = iqr + eps;
  std::vector<double> out(values.size());
  for (std::size_t m = 0; m < values.size(); ++m) out[m] = (values[m] - med) / denom;
  return out;
}

std::vector<double> to_energy(std::span<const double> standardized, Polarity polarity) {
  const double kappa = polarity_sign(polarity);
  std::vector<double> energy(standardized.size());
  for (std::size_t m = 0; m < standardized.size(); ++m) {
    energy[m] = standardized[m] == 0.0 ? 0.0 : -kappa * standardized[m];
  }
  return energy;
}

GridLogLikelihood curve_to_grid_loglik(const EvidenceCurve& curve, const RpmGrid& grid,
                                       const C2gConfig& cfg, double sample_rate_hz,
                                       KernelFn kernel) {
  curve.validate();
  cfg.validate();

  const std::vector<double> energy =
      to_energy(robust_standardize(curve.values, cfg.eps_norm), curve.polarity);

  const double h = cfg.kernel_bandwidth_rpm;
  const double radius = cfg.kernel_truncation_sigmas * h;
  const double lo = grid.r_min() - radius;
  const double hi = grid.r_max() + radius;

  struct Point {
    double rpm;
    double log_weight;
  };
  std::vector<Point> points;
  points.reserve(curve.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < curve.size(); ++m) {
    const double rpm = map_axis_to_rpm(curve.axis[m], curve.axis_type, sample_rate_hz);
    if (rpm < lo || rpm > hi) continue;
    const double lw = -cfg.beta * energy[m];
    points.push_back({rpm, lw});
    peak = std::max(peak, lw);
  }
  if (points.empty()) throw std::invalid_argument("curve disjoint from grid");

  // Weights are shifted by their maximum; the shift cancels in the normalization.
  const std::size_t n = grid.size();
  const double step = grid.step();
  std::vector<double> mass(n, 0.0);
  for (const Point& p : points) {
    const double weight = std::exp(p.log_weight - peak);
    if (weight == 0.0) continue;
    const double first = std::ceil((p.rpm - radius - grid.r_min()) / step);
    const double last = std::floor((p.rpm + radius - grid.r_min()) / step);
    const auto g0 = static_cast<std::size_t>(std::max(first, 0.0));
    const auto g1 = static_cast<std::size_t>(std::min(last, static_cast<double>(n - 1)));
    for (std::size_t g = g0; g <= g1 && first <= last; ++g) {
      const double u = (grid.value(g) - p.rpm) / h;
      if (std::abs(u) > cfg.kernel_truncation_sigmas) continue;
      mass[g] += weight * kernel(u);
    }
  }

  double total = 0.0;
  for (double v : mass) total += v;
  if (!(total > 0.0)) throw std::invalid_argument("curve disjoint from grid");

  GridLogLikelihood out{grid, std::vector<double>(n), curve.estimator_id};
  for (std::size_t g = 0; g < n; ++g) {
    out.log_values[g] = std::log(std::max(mass[g] / total, kProbabilityFloor));
  }
  return out;
}

}  // namespace arc
