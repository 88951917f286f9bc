#pragma once

#include "arc/c2g.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace arc {

struct TrackerConfig {
  double sigma_min_rpm{40.0};
  double sigma_max_rpm{150.0};
  double eps_c{1e-12};
  double eps_log{1e-300};  // floor inside log(pi + eps)
  int presmooth_width{3};  // fixed; only 3 is accepted
  // Transition Gaussians are evaluated out to this many standard deviations.
  double transition_truncation_sigmas{8.0};

  void validate() const;
};

struct PosteriorState {
  RpmGrid grid;
  std::vector<double> mass;
  std::size_t frame_index{0};
};

struct TrajectoryPoint {
  std::size_t frame_index{0};
  double time_s{0.0};
  double map_rpm{0.0};
  double mmse_rpm{0.0};
  double sigma_rpm{0.0};
  double entropy_nats{0.0};
};

PosteriorState init_posterior(const RpmGrid& grid);

// Per-bin transition standard deviations from the curvature of the smoothed
// previous log-posterior, clipped to [sigma_min, sigma_max]. Needs G >= 3.
std::vector<double> curvature_sigma(const PosteriorState& prev, const TrackerConfig& cfg);

// State-dependent Gaussian diffusion. Each source column is renormalized over
// the grid, so the output sums to one.
std::vector<double> predict(const PosteriorState& prev, std::span<const double> sigmas,
                            const TrackerConfig& cfg = {});

// Log-domain measurement update followed by normalization.
PosteriorState update(std::span<const double> predicted, const GridLogLikelihood& fused,
                      const TrackerConfig& cfg = {}, std::size_t frame_index = 0);

// MAP (ties to the lowest index), MMSE, posterior std-dev and entropy.
TrajectoryPoint estimate(const PosteriorState& post, double time_s = 0.0);

// Online curvature-adaptive grid filter.
class CurvatureTracker {
public:
  CurvatureTracker(const RpmGrid& grid, const TrackerConfig& cfg);

  TrajectoryPoint step(const GridLogLikelihood& fused, double time_s);
  const PosteriorState& posterior() const { return state_; }

private:
  TrackerConfig cfg_;
  PosteriorState state_;
};

using PosteriorSink = std::function<void(const PosteriorState&)>;

// Runs the tracker over all frames. `times_s`, if non-empty, must match the
// frame count; `sink` sees every updated posterior.
std::vector<TrajectoryPoint> track(std::span<const GridLogLikelihood> frames_loglik,
                                   const RpmGrid& grid, const TrackerConfig& cfg,
                                   std::span<const double> times_s = {},
                                   const PosteriorSink& sink = {});

}  // namespace arc
