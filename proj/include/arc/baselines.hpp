#pragma once

#include "arc/c2g.hpp"
#include "arc/estimators.hpp"
#include "arc/ingest.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arc {

struct BaselinePoint {
  std::size_t frame_index{0};
  double time_s{0.0};
  double rpm{0.0};
};

struct BaselineTrajectory {
  std::string method;
  std::vector<BaselinePoint> points;

  std::vector<double> rpm() const;
};

// Best native-axis point (min for cost, max for score) among points whose RPM
// lies in [r_min, r_max]; ties go to the lower native coordinate.
double single_estimator_pick(const EvidenceCurve& curve, double r_min, double r_max,
                             double sample_rate_hz);

// Per-frame MMSE of the fused likelihood alone, without prediction.
BaselineTrajectory c2g_fusion_framewise(std::span<const GridLogLikelihood> frames_loglik,
                                        std::span<const double> times_s = {});

struct SpectralCandidate {
  double rpm{0.0};
  double log_magnitude{0.0};
};

struct ViterbiOptions {
  double transition_penalty_per_rpm{0.02};
  int n_candidates_per_frame{10};
  int zero_pad_factor{8};
};

// Top-k local maxima of the Hann-windowed magnitude spectrum inside the
// fundamental band [r_min/60, r_max/60] Hz, refined by log-parabolic
// interpolation. Throws if the band holds no peak.
std::vector<SpectralCandidate> stft_candidates(std::span<const double> frame,
                                               double sample_rate_hz, const RpmGrid& grid,
                                               int k, int zero_pad_factor);

struct ViterbiPath {
  std::vector<std::size_t> choice;  // candidate index per frame
  double score{0.0};
};

// Maximizes sum_t log_magnitude - penalty * sum_t |rpm_t - rpm_{t-1}|.
ViterbiPath viterbi_decode(const std::vector<std::vector<SpectralCandidate>>& candidates,
                           double penalty_per_rpm);

// Path score under the same objective; used to check decoded paths.
double path_score(const std::vector<std::vector<SpectralCandidate>>& candidates,
                  std::span<const std::size_t> choice, double penalty_per_rpm);

BaselineTrajectory viterbi_stft(const Signal& signal, const FramingConfig& framing,
                                const RpmGrid& grid, const ViterbiOptions& opts = {});

}  // namespace arc
