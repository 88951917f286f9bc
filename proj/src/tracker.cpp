#include "arc/tracker.hpp"

#include "arc/fusion.hpp"
#include "arc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arc {

void TrackerConfig::validate() const {
  if (!(sigma_min_rpm > 0.0) || !(sigma_max_rpm >= sigma_min_rpm)) {
    throw std::invalid_argument("tracker: need 0 < sigma_min_rpm <= sigma_max_rpm");
  }
  if (!(eps_c > 0.0)) throw std::invalid_argument("tracker: eps_c must be positive");
  if (!(eps_log > 0.0)) throw std::invalid_argument("tracker: eps_log must be positive");
  if (presmooth_width != 3) throw std::invalid_argument("tracker: presmooth_width is fixed at 3");
  if (!(transition_truncation_sigmas > 0.0)) {
    throw std::invalid_argument("tracker: transition_truncation_sigmas must be positive");
  }
}

PosteriorState init_posterior(const RpmGrid& grid) {
  return PosteriorState{grid, std::vector<double>(grid.size(), 1.0 / static_cast<double>(grid.size())),
                        0};
}

std::vector<double> curvature_sigma(const PosteriorState& prev, const TrackerConfig& cfg) {
  cfg.validate();
  const std::size_t n = prev.mass.size();
  if (n < 3) throw std::invalid_argument("curvature_sigma: grid needs at least 3 points");

  std::vector<double> logp(n);
  for (std::size_t j = 0; j < n; ++j) logp[j] = std::log(prev.mass[j] + cfg.eps_log);

  // 3-point moving average; the end bins average their two available samples.
  std::vector<double> smooth(n);
  smooth[0] = 0.5 * (logp[0] + logp[1]);
  smooth[n - 1] = 0.5 * (logp[n - 2] + logp[n - 1]);
  for (std::size_t j = 1; j + 1 < n; ++j) smooth[j] = (logp[j - 1] + logp[j] + logp[j + 1]) / 3.0;

  const double inv_step2 = 1.0 / (prev.grid.step() * prev.grid.step());
  std::vector<double> curvature(n);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    curvature[j] = (smooth[j + 1] - 2.0 * smooth[j] + smooth[j - 1]) * inv_step2;
  }
  curvature[0] = curvature[1];
  curvature[n - 1] = curvature[n - 2];

  const double var_min = cfg.sigma_min_rpm * cfg.sigma_min_rpm;
  const double var_max = cfg.sigma_max_rpm * cfg.sigma_max_rpm;
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double precision = std::max(0.0, -curvature[j]);
    sigma[j] = std::sqrt(std::clamp(1.0 / (precision + cfg.eps_c), var_min, var_max));
  }
  return sigma;
}

std::vector<double> predict(const PosteriorState& prev, std::span<const double> sigmas,
                            const TrackerConfig& cfg) {
  const std::size_t n = prev.mass.size();
  if (sigmas.size() != n) throw std::invalid_argument("predict: sigma vector size mismatch");
  const double step = prev.grid.step();

  std::vector<double> out(n, 0.0);
  // Half-kernel exp(-(k step)^2 / (2 sigma^2)) for k = 0..radius, rebuilt only
  // when sigma changes between consecutive columns.
  std::vector<double> half;
  double half_sigma = -1.0;
  double full_sum = 0.0;  // column sum when the window is not clipped

  for (std::size_t j = 0; j < n; ++j) {
    const double pj = prev.mass[j];
    if (pj == 0.0) continue;
    const double sigma = sigmas[j];
    if (sigma != half_sigma) {
      const auto radius =
          static_cast<std::size_t>(std::ceil(cfg.transition_truncation_sigmas * sigma / step));
      half.assign(radius + 1, 0.0);
      // w(k+1) = w(k) q^(2k+1) with q = exp(-step^2 / (2 sigma^2)).
      const double q = std::exp(-0.5 * step * step / (sigma * sigma));
      const double q2 = q * q;
      double w = 1.0;
      double ratio = q;
      for (std::size_t k = 0; k <= radius; ++k) {
        half[k] = w;
        w *= ratio;
        ratio *= q2;
      }
      half_sigma = sigma;
      full_sum = half[0];
      for (std::size_t k = 1; k <= radius; ++k) full_sum += 2.0 * half[k];
    }
    const std::size_t radius = half.size() - 1;
    const std::size_t lo = j >= radius ? j - radius : 0;
    const std::size_t hi = std::min(n - 1, j + radius);

    double column_sum = full_sum;
    if (hi - lo != 2 * radius) {
      column_sum = 0.0;
      for (std::size_t g = lo; g <= hi; ++g) column_sum += half[g > j ? g - j : j - g];
    }
    const double scale = pj / column_sum;
    const double* w = half.data();
    double* right = out.data() + j;
    for (std::size_t k = 0; k <= hi - j; ++k) right[k] += scale * w[k];
    double* left = out.data() + lo;
    for (std::size_t k = 0; k < j - lo; ++k) left[k] += scale * w[j - lo - k];
  }
  return out;
}

PosteriorState update(std::span<const double> predicted, const GridLogLikelihood& fused,
                      const TrackerConfig& cfg, std::size_t frame_index) {
  const std::size_t n = predicted.size();
  if (fused.log_values.size() != n) throw std::invalid_argument("update: grid size mismatch");

  std::vector<double> logpost(n);
  for (std::size_t g = 0; g < n; ++g) {
    logpost[g] = std::log(predicted[g] + cfg.eps_log) + fused.log_values[g];
  }
  const double norm = logsumexp(logpost);

  PosteriorState post{fused.grid, std::vector<double>(n), frame_index};
  constexpr double tiny = std::numeric_limits<double>::min();
  for (std::size_t g = 0; g < n; ++g) {
    const double p = std::exp(logpost[g] - norm);
    // Subnormal masses are flushed; they are below every floor used downstream.
    post.mass[g] = p < tiny ? 0.0 : p;
  }
  return post;
}

TrajectoryPoint estimate(const PosteriorState& post, double time_s) {
  const RpmGrid& grid = post.grid;
  const auto best = std::max_element(post.mass.begin(), post.mass.end());

  double mmse = 0.0;
  for (std::size_t g = 0; g < post.mass.size(); ++g) mmse += grid.value(g) * post.mass[g];
  double var = 0.0;
  for (std::size_t g = 0; g < post.mass.size(); ++g) {
    const double d = grid.value(g) - mmse;
    var += post.mass[g] * d * d;
  }

  TrajectoryPoint pt;
  pt.frame_index = post.frame_index;
  pt.time_s = time_s;
  pt.map_rpm = grid.value(static_cast<std::size_t>(best - post.mass.begin()));
  pt.mmse_rpm = std::clamp(mmse, grid.r_min(), grid.r_max());
  pt.sigma_rpm = std::sqrt(var);
  pt.entropy_nats = entropy_nats(post.mass);
  return pt;
}

CurvatureTracker::CurvatureTracker(const RpmGrid& grid, const TrackerConfig& cfg)
    : cfg_(cfg), state_(init_posterior(grid)) {
  cfg_.validate();
}

TrajectoryPoint CurvatureTracker::step(const GridLogLikelihood& fused, double time_s) {
  if (!(fused.grid == state_.grid)) throw std::invalid_argument("tracker: likelihood grid mismatch");
  const std::vector<double> sigmas = curvature_sigma(state_, cfg_);
  const std::vector<double> prior = predict(state_, sigmas, cfg_);
  state_ = update(prior, fused, cfg_, state_.frame_index + 1);
  return estimate(state_, time_s);
}

std::vector<TrajectoryPoint> track(std::span<const GridLogLikelihood> frames_loglik,
                                   const RpmGrid& grid, const TrackerConfig& cfg,
                                   std::span<const double> times_s, const PosteriorSink& sink) {
  if (frames_loglik.empty()) throw std::invalid_argument("track: no frames");
  if (!times_s.empty() && times_s.size() != frames_loglik.size()) {
    throw std::invalid_argument("track: times and frames differ in length");
  }
  CurvatureTracker tracker(grid, cfg);
  std::vector<TrajectoryPoint> out;
  out.reserve(frames_loglik.size());
  for (std::size_t t = 0; t < frames_loglik.size(); ++t) {
    const double time = times_s.empty() ? static_cast<double>(t + 1) : times_s[t];
    out.push_back(tracker.step(frames_loglik[t], time));
    if (sink) sink(tracker.posterior());
  }
  return out;
}

}  // namespace arc
