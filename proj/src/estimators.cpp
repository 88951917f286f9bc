#include "arc/estimators.hpp"

#include "arc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace arc {

const char* to_string(AxisType axis) {
  switch (axis) {
    case AxisType::Lag: return "lag";
    case AxisType::Quefrency: return "quefrency";
    case AxisType::Hz: return "hz";
    case AxisType::Rpm: return "rpm";
  }
  return "?";
}

const char* to_string(Polarity polarity) {
  return polarity == Polarity::Score ? "score" : "cost";
}

void EvidenceCurve::validate() const {
  if (axis.size() != values.size()) {
    throw std::invalid_argument("evidence curve '" + estimator_id + "': axis/value size mismatch");
  }
  if (axis.size() < 2) {
    throw std::invalid_argument("evidence curve '" + estimator_id + "': fewer than 2 points");
  }
  for (std::size_t m = 0; m < axis.size(); ++m) {
    if (!std::isfinite(axis[m]) || !std::isfinite(values[m])) {
      throw std::invalid_argument("evidence curve '" + estimator_id + "': non-finite entry");
    }
    if (m > 0 && !(axis[m] > axis[m - 1])) {
      throw std::invalid_argument("evidence curve '" + estimator_id +
                                  "': axis not strictly increasing");
    }
  }
}

namespace {

void check_lag_bounds(const char* what, std::size_t frame_len, int lo, int hi) {
  if (lo < 2 || lo >= hi || static_cast<std::size_t>(hi) > frame_len / 2) {
    throw std::invalid_argument(std::string(what) + ": need 2 <= min < max <= frame_len/2 (got [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "], frame_len " +
                                std::to_string(frame_len) + ")");
  }
}

}  // namespace

EvidenceCurve yin_curve(std::span<const double> frame, double sample_rate_hz, int tau_min,
                        int tau_max) {
  (void)sample_rate_hz;
  const std::size_t n = frame.size();
  check_lag_bounds("yin_curve", n, tau_min, tau_max);
  const auto max_lag = static_cast<std::size_t>(tau_max);
  // Fixed integration window: the largest that keeps x[i + tau] inside the frame.
  const std::size_t window = n - max_lag;

  // r(tau) = sum_{i < W} x[i] x[i + tau] as a circular cross-correlation of size n;
  // window + max_lag <= n so no term wraps.
  RealFft& fft = RealFft::for_size(n);
  const auto full = fft.forward(frame);
  const auto head = fft.forward(frame.first(window));
  std::vector<std::complex<double>> cross(full.size());
  for (std::size_t k = 0; k < cross.size(); ++k) cross[k] = std::conj(head[k]) * full[k];
  const std::vector<double> corr = fft.inverse(cross);

  std::vector<double> cumsq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumsq[i + 1] = cumsq[i] + frame[i] * frame[i];
  const double head_energy = cumsq[window];

  EvidenceCurve curve;
  curve.axis_type = AxisType::Lag;
  curve.polarity = Polarity::Cost;
  curve.estimator_id = kYinId;
  curve.axis.reserve(max_lag - tau_min + 1);
  curve.values.reserve(max_lag - tau_min + 1);

  double running = 0.0;
  for (std::size_t tau = 1; tau <= max_lag; ++tau) {
    const double shifted_energy = cumsq[tau + window] - cumsq[tau];
    const double scale = head_energy + shifted_energy;
    double d = scale - 2.0 * corr[tau];
    // FFT round-off leaves ~1e-16 * energy residue where d is exactly zero.
    if (d <= 1e-12 * scale) d = 0.0;
    running += d;
    if (tau >= static_cast<std::size_t>(tau_min)) {
      const double normalized = running > 0.0 ? d * static_cast<double>(tau) / running : 1.0;
      curve.axis.push_back(static_cast<double>(tau));
      curve.values.push_back(normalized);
    }
  }
  return curve;
}

EvidenceCurve cepstrum_curve(std::span<const double> frame, double sample_rate_hz, int q_min,
                             int q_max, double eps_log) {
  (void)sample_rate_hz;
  const std::size_t n = frame.size();
  check_lag_bounds("cepstrum_curve", n, q_min, q_max);

  const std::vector<double> window = hann_window(n);
  std::vector<double> tapered(n);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tapered[i] = frame[i] * window[i];
    window_sum += window[i];
  }

  // Amplitude-scaled magnitudes keep eps_log well above FFT roundoff.
  const double scale = 2.0 / window_sum;
  RealFft& fft = RealFft::for_size(n);
  auto spectrum = fft.forward(tapered);
  for (auto& bin : spectrum) bin = {std::log(scale * std::abs(bin) + eps_log), 0.0};
  const std::vector<double> cep = fft.inverse(spectrum);

  EvidenceCurve curve;
  curve.axis_type = AxisType::Quefrency;
  curve.polarity = Polarity::Score;
  curve.estimator_id = kCepstrumId;
  for (int q = q_min; q <= q_max; ++q) {
    curve.axis.push_back(static_cast<double>(q));
    curve.values.push_back(cep[static_cast<std::size_t>(q)]);
  }
  return curve;
}

EvidenceCurve comb_curve(std::span<const double> frame, double sample_rate_hz, double f_min,
                         double f_max, const CombOptions& opts) {
  if (!(f_min > 0.0) || !(f_max > f_min)) {
    throw std::invalid_argument("comb_curve: need 0 < f_min < f_max");
  }
  if (opts.n_candidates < 2 || opts.n_harmonics < 1 || opts.zero_pad_factor < 1) {
    throw std::invalid_argument("comb_curve: need n_candidates >= 2, n_harmonics >= 1");
  }
  if (!(f_max * opts.n_harmonics < 0.5 * sample_rate_hz)) {
    throw std::invalid_argument("comb_curve: harmonic range exceeds Nyquist (" +
                                std::to_string(opts.n_harmonics) + " x " + std::to_string(f_max) +
                                " Hz >= " + std::to_string(0.5 * sample_rate_hz) + " Hz)");
  }

  const std::size_t n = frame.size();
  const std::vector<double> window = hann_window(n);
  double window_sum = 0.0;
  std::vector<double> tapered(n);
  for (std::size_t i = 0; i < n; ++i) {
    tapered[i] = frame[i] * window[i];
    window_sum += window[i];
  }

  const std::size_t fft_size = n * static_cast<std::size_t>(opts.zero_pad_factor);
  const auto spectrum = RealFft::for_size(fft_size).forward(tapered);
  // Amplitude units: a unit sine on a bin centre reads ~1.
  const double amp_scale = 2.0 / window_sum;
  std::vector<double> magnitude(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) magnitude[k] = std::abs(spectrum[k]) * amp_scale;

  const double bins_per_hz = static_cast<double>(fft_size) / sample_rate_hz;
  const auto read = [&](double hz) {
    const double pos = hz * bins_per_hz;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= magnitude.size()) return magnitude.back();
    const double frac = pos - static_cast<double>(k);
    return magnitude[k] + frac * (magnitude[k + 1] - magnitude[k]);
  };

  EvidenceCurve curve;
  curve.axis_type = AxisType::Hz;
  curve.polarity = Polarity::Score;
  curve.estimator_id = kCombId;
  curve.axis.resize(static_cast<std::size_t>(opts.n_candidates));
  curve.values.resize(curve.axis.size());
  const double step = (f_max - f_min) / static_cast<double>(opts.n_candidates - 1);
  for (std::size_t c = 0; c < curve.axis.size(); ++c) {
    const double f = f_min + static_cast<double>(c) * step;
    double acc = 0.0;
    for (int m = 1; m <= opts.n_harmonics; ++m) acc += read(m * f);
    curve.axis[c] = f;
    curve.values[c] = acc / opts.n_harmonics;
  }
  return curve;
}

LagRange lag_range_for_rpm(double sample_rate_hz, double r_min, double r_max,
                           std::size_t frame_len) {
  const int ceiling = static_cast<int>(frame_len / 2);
  int lo = static_cast<int>(std::floor(60.0 * sample_rate_hz / r_max));
  int hi = static_cast<int>(std::ceil(60.0 * sample_rate_hz / r_min));
  lo = std::clamp(lo, 2, ceiling);
  hi = std::clamp(hi, 2, ceiling);
  return {lo, hi};
}

std::vector<std::string> EstimatorConfig::enabled() const {
  std::vector<std::string> names;
  if (use_yin) names.emplace_back(kYinId);
  if (use_cepstrum) names.emplace_back(kCepstrumId);
  if (use_comb) names.emplace_back(kCombId);
  return names;
}

void EstimatorConfig::set_enabled(const std::vector<std::string>& names) {
  use_yin = use_cepstrum = use_comb = false;
  for (const auto& name : names) {
    if (name == kYinId) {
      use_yin = true;
    } else if (name == kCepstrumId) {
      use_cepstrum = true;
    } else if (name == kCombId) {
      use_comb = true;
    } else {
      throw std::invalid_argument("estimators: unknown estimator '" + name +
                                  "' (expected yin, cepstrum or comb)");
    }
  }
  if (!use_yin && !use_cepstrum && !use_comb) {
    throw std::invalid_argument("estimators: at least one estimator must be enabled");
  }
}

std::vector<EvidenceCurve> compute_curves(std::span<const double> frame, double sample_rate_hz,
                                          double r_min, double r_max,
                                          const EstimatorConfig& cfg) {
  std::vector<EvidenceCurve> curves;
  const LagRange lags = lag_range_for_rpm(sample_rate_hz, r_min, r_max, frame.size());
  if (cfg.use_yin) curves.push_back(yin_curve(frame, sample_rate_hz, lags.min, lags.max));
  if (cfg.use_cepstrum) {
    curves.push_back(
        cepstrum_curve(frame, sample_rate_hz, lags.min, lags.max, cfg.cepstrum_eps_log));
  }
  if (cfg.use_comb) {
    curves.push_back(comb_curve(frame, sample_rate_hz, r_min / 60.0, r_max / 60.0, cfg.comb));
  }
  return curves;
}

}  // namespace arc
