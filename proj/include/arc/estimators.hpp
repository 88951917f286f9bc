#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace arc {

enum class AxisType { Lag, Quefrency, Hz, Rpm };

// Score curves peak at good hypotheses; cost curves dip.
enum class Polarity { Score = 1, Cost = -1 };

constexpr double polarity_sign(Polarity p) { return p == Polarity::Score ? 1.0 : -1.0; }

const char* to_string(AxisType axis);
const char* to_string(Polarity polarity);

// One estimator's per-frame search curve on its native axis.
struct EvidenceCurve {
  std::vector<double> axis;    // lag/quefrency in samples, or Hz, or RPM
  std::vector<double> values;  // raw curve values
  AxisType axis_type{AxisType::Rpm};
  Polarity polarity{Polarity::Score};
  std::string estimator_id;

  std::size_t size() const { return axis.size(); }

  // Throws std::invalid_argument unless sizes match (>= 2), the axis is
  // strictly increasing and every value is finite.
  void validate() const;
};

inline constexpr const char* kYinId = "yin";
inline constexpr const char* kCepstrumId = "cepstrum";
inline constexpr const char* kCombId = "comb";

// Cumulative-mean-normalized difference d'(tau) over integer lags
// [tau_min, tau_max]. Requires 2 <= tau_min < tau_max <= frame.size()/2.
// Runs on the raw (untapered) frame.
EvidenceCurve yin_curve(std::span<const double> frame, double sample_rate_hz, int tau_min,
                        int tau_max);

// Real cepstrum of the Hann-windowed frame (FFT size = frame length) over
// quefrencies [q_min, q_max]. Requires 2 <= q_min < q_max <= frame.size()/2.
EvidenceCurve cepstrum_curve(std::span<const double> frame, double sample_rate_hz, int q_min,
                             int q_max, double eps_log = 1e-12);

struct CombOptions {
  int n_candidates{4096};
  int n_harmonics{5};
  int zero_pad_factor{2};  // FFT size = zero_pad_factor * frame length
};

// Harmonic comb h(f) = mean over m=1..M of |X(m f)| on n_candidates uniform
// fundamentals in [f_min, f_max]. |X| is the Hann-windowed amplitude spectrum,
// read by linear interpolation between bins.
EvidenceCurve comb_curve(std::span<const double> frame, double sample_rate_hz, double f_min,
                         double f_max, const CombOptions& opts = {});

// Integer lag range covering [r_min, r_max] RPM, clamped to [2, frame_len/2].
struct LagRange {
  int min;
  int max;
};
LagRange lag_range_for_rpm(double sample_rate_hz, double r_min, double r_max,
                           std::size_t frame_len);

struct EstimatorConfig {
  bool use_yin{true};
  bool use_cepstrum{true};
  bool use_comb{true};
  CombOptions comb{};
  double cepstrum_eps_log{1e-12};

  std::vector<std::string> enabled() const;
  // Enables exactly the named estimators; throws on unknown names.
  void set_enabled(const std::vector<std::string>& names);
};

// All enabled curves for one frame, with native supports derived from the
// RPM range.
std::vector<EvidenceCurve> compute_curves(std::span<const double> frame, double sample_rate_hz,
                                          double r_min, double r_max,
                                          const EstimatorConfig& cfg);

}  // namespace arc
