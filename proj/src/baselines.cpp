#include "arc/baselines.hpp"

#include "arc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arc {

std::vector<double> BaselineTrajectory::rpm() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.rpm);
  return out;
}

double single_estimator_pick(const EvidenceCurve& curve, double r_min, double r_max,
                             double sample_rate_hz) {
  curve.validate();
  const double sign = polarity_sign(curve.polarity);
  bool found = false;
  double best_value = 0.0;
  double best_rpm = 0.0;
  // The axis is increasing, so a strict comparison keeps the lower coordinate on ties.
  for (std::size_t m = 0; m < curve.size(); ++m) {
    const double rpm = map_axis_to_rpm(curve.axis[m], curve.axis_type, sample_rate_hz);
    if (rpm < r_min || rpm > r_max) continue;
    const double value = sign * curve.values[m];
    if (!found || value > best_value) {
      found = true;
      best_value = value;
      best_rpm = rpm;
    }
  }
  if (!found) {
    throw std::invalid_argument("single_estimator_pick: no '" + curve.estimator_id +
                                "' candidate inside the RPM bounds");
  }
  return best_rpm;
}

BaselineTrajectory c2g_fusion_framewise(std::span<const GridLogLikelihood> frames_loglik,
                                        std::span<const double> times_s) {
  if (!times_s.empty() && times_s.size() != frames_loglik.size()) {
    throw std::invalid_argument("c2g_fusion_framewise: times and frames differ in length");
  }
  BaselineTrajectory out{"fusion", {}};
  out.points.reserve(frames_loglik.size());
  for (std::size_t t = 0; t < frames_loglik.size(); ++t) {
    const auto& lik = frames_loglik[t];
    if (!(lik.grid == frames_loglik.front().grid)) {
      throw std::invalid_argument("c2g_fusion_framewise: grid mismatch");
    }
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t g = 0; g < lik.log_values.size(); ++g) {
      const double p = std::exp(lik.log_values[g]);
      mass += p;
      acc += p * lik.grid.value(g);
    }
    const double rpm = std::clamp(acc / mass, lik.grid.r_min(), lik.grid.r_max());
    const double time = times_s.empty() ? static_cast<double>(t + 1) : times_s[t];
    out.points.push_back({t + 1, time, rpm});
  }
  return out;
}

std::vector<SpectralCandidate> stft_candidates(std::span<const double> frame,
                                               double sample_rate_hz, const RpmGrid& grid,
                                               int k, int zero_pad_factor) {
  if (k < 1) throw std::invalid_argument("stft_candidates: k must be >= 1");
  const std::size_t n = frame.size();
  const std::vector<double> window = hann_window(n);
  std::vector<double> tapered(n);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tapered[i] = frame[i] * window[i];
    window_sum += window[i];
  }
  const std::size_t fft_size = n * static_cast<std::size_t>(std::max(zero_pad_factor, 1));
  const auto spectrum = RealFft::for_size(fft_size).forward(tapered);
  std::vector<double> logmag(spectrum.size());
  for (std::size_t b = 0; b < spectrum.size(); ++b) {
    logmag[b] = std::log(std::abs(spectrum[b]) * 2.0 / window_sum + 1e-300);
  }

  const double hz_per_bin = sample_rate_hz / static_cast<double>(fft_size);
  const double f_lo = grid.r_min() / 60.0;
  const double f_hi = grid.r_max() / 60.0;
  const auto b_lo = static_cast<std::size_t>(std::max(1.0, std::floor(f_lo / hz_per_bin)));
  const auto b_hi = std::min(spectrum.size() - 2, static_cast<std::size_t>(std::ceil(f_hi / hz_per_bin)));

  std::vector<SpectralCandidate> peaks;
  for (std::size_t b = b_lo; b <= b_hi; ++b) {
    if (!(logmag[b] > logmag[b - 1] && logmag[b] >= logmag[b + 1])) continue;
    const double a = logmag[b - 1], c = logmag[b], d = logmag[b + 1];
    const double denom = a - 2.0 * c + d;
    const double offset = denom < 0.0 ? 0.5 * (a - d) / denom : 0.0;
    const double rpm = 60.0 * (static_cast<double>(b) + offset) * hz_per_bin;
    if (!grid.contains(rpm)) continue;
    peaks.push_back({rpm, c - 0.25 * (a - d) * offset});
  }
  if (peaks.empty()) throw std::runtime_error("viterbi_stft: no spectral peaks in the RPM band");
  std::stable_sort(peaks.begin(), peaks.end(), [](const auto& x, const auto& y) {
    return x.log_magnitude > y.log_magnitude;
  });
  if (peaks.size() > static_cast<std::size_t>(k)) peaks.resize(static_cast<std::size_t>(k));
  return peaks;
}

ViterbiPath viterbi_decode(const std::vector<std::vector<SpectralCandidate>>& candidates,
                           double penalty_per_rpm) {
  if (candidates.empty()) throw std::invalid_argument("viterbi_decode: no frames");
  const std::size_t frames = candidates.size();
  std::vector<std::vector<double>> score(frames);
  std::vector<std::vector<std::size_t>> back(frames);

  score[0].resize(candidates[0].size());
  for (std::size_t i = 0; i < candidates[0].size(); ++i) score[0][i] = candidates[0][i].log_magnitude;

  for (std::size_t t = 1; t < frames; ++t) {
    const auto& prev = candidates[t - 1];
    const auto& cur = candidates[t];
    if (cur.empty()) throw std::invalid_argument("viterbi_decode: frame without candidates");
    score[t].assign(cur.size(), -std::numeric_limits<double>::infinity());
    back[t].assign(cur.size(), 0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t p = 0; p < prev.size(); ++p) {
        const double s = score[t - 1][p] - penalty_per_rpm * std::abs(cur[i].rpm - prev[p].rpm);
        if (s > score[t][i]) {
          score[t][i] = s;
          back[t][i] = p;
        }
      }
      score[t][i] += cur[i].log_magnitude;
    }
  }

  ViterbiPath path;
  path.choice.resize(frames);
  const auto& last = score.back();
  const auto best = std::max_element(last.begin(), last.end());
  path.score = *best;
  path.choice.back() = static_cast<std::size_t>(best - last.begin());
  for (std::size_t t = frames - 1; t > 0; --t) path.choice[t - 1] = back[t][path.choice[t]];
  return path;
}

double path_score(const std::vector<std::vector<SpectralCandidate>>& candidates,
                  std::span<const std::size_t> choice, double penalty_per_rpm) {
  double s = 0.0;
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    s += candidates[t][choice[t]].log_magnitude;
    if (t > 0) {
      s -= penalty_per_rpm *
           std::abs(candidates[t][choice[t]].rpm - candidates[t - 1][choice[t - 1]].rpm);
    }
  }
  return s;
}

BaselineTrajectory viterbi_stft(const Signal& signal, const FramingConfig& framing,
                                const RpmGrid& grid, const ViterbiOptions& opts) {
  const auto frames = frame_signal(signal, framing);
  std::vector<std::vector<SpectralCandidate>> candidates;
  candidates.reserve(frames.size());
  for (const auto& f : frames) {
    candidates.push_back(stft_candidates(f.data, signal.sample_rate_hz, grid,
                                         opts.n_candidates_per_frame, opts.zero_pad_factor));
  }
  const ViterbiPath path = viterbi_decode(candidates, opts.transition_penalty_per_rpm);
  BaselineTrajectory out{"viterbi", {}};
  for (std::size_t t = 0; t < frames.size(); ++t) {
    out.points.push_back({frames[t].index, frames[t].time_s, candidates[t][path.choice[t]].rpm});
  }
  return out;
}

}  // namespace arc
