#include "arc/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace arc {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::S0: return "S0";
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
    case Scenario::S4: return "S4";
    case Scenario::S5: return "S5";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "S0" || upper == "S0-CLEAN" || upper == "CLEAN") return Scenario::S0;
  if (upper == "S1") return Scenario::S1;
  if (upper == "S2") return Scenario::S2;
  if (upper == "S3") return Scenario::S3;
  if (upper == "S4") return Scenario::S4;
  if (upper == "S5") return Scenario::S5;
  throw std::invalid_argument("scenario: unknown scenario '" + std::string(name) +
                              "' (expected S0..S5)");
}

std::vector<double> default_detuning(int n_harmonics) {
  std::vector<double> d(static_cast<std::size_t>(std::max(n_harmonics, 0)));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = 0.004 * static_cast<double>(i * i);
  return d;
}

double ScenarioSpec::amplitude(int m) const {
  if (!harmonic_amps.empty()) return harmonic_amps.at(static_cast<std::size_t>(m - 1));
  return 1.0 / static_cast<double>(m);
}

double ScenarioSpec::detuning_of(int m) const {
  if (scenario != Scenario::S4) return 0.0;
  if (!detuning.empty()) return detuning.at(static_cast<std::size_t>(m - 1));
  return default_detuning(n_harmonics).at(static_cast<std::size_t>(m - 1));
}

namespace {
bool has_wobble(Scenario s) {
  return s == Scenario::S1 || s == Scenario::S2 || s == Scenario::S3 || s == Scenario::S4;
}
}  // namespace

void ScenarioSpec::validate() const {
  if (!(duration_s > 0.0)) throw std::invalid_argument("scenario: duration_s must be positive");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("scenario: sample_rate_hz must be positive");
  if (n_harmonics < 1) throw std::invalid_argument("scenario: n_harmonics must be >= 1");
  if (!harmonic_amps.empty() && harmonic_amps.size() != static_cast<std::size_t>(n_harmonics)) {
    throw std::invalid_argument("scenario: harmonic_amps must have n_harmonics entries");
  }
  if (!detuning.empty() && detuning.size() != static_cast<std::size_t>(n_harmonics)) {
    throw std::invalid_argument("scenario: detuning must have n_harmonics entries");
  }
  if (!std::isfinite(snr_db)) throw std::invalid_argument("scenario: snr_db must be finite");
  if (std::abs(alpha - std::round(alpha)) < 1e-6) {
    throw std::invalid_argument("scenario: alpha must not be an integer");
  }
  if (!(wobble_period_s > 0.0) || !(wobble_fraction >= 0.0)) {
    throw std::invalid_argument("scenario: wobble_period_s must be positive, wobble_fraction >= 0");
  }

  double lo = base_rpm, hi = base_rpm;
  if (has_wobble(scenario)) {
    lo = base_rpm * (1.0 - wobble_fraction);
    hi = base_rpm * (1.0 + wobble_fraction);
  } else if (scenario == Scenario::S5) {
    lo = std::min(base_rpm, base_rpm + jump_rpm);
    hi = std::max(base_rpm, base_rpm + jump_rpm);
  }
  if (lo < r_min || hi > r_max) {
    throw std::invalid_argument("scenario: trajectory exits RPM bounds [" + std::to_string(r_min) +
                                ", " + std::to_string(r_max) + "]");
  }
  // Highest synthesized tone must stay below Nyquist.
  double top_order = n_harmonics * (1.0 + std::max(0.0, detuning_of(n_harmonics)));
  if (scenario == Scenario::S3) top_order = std::max(top_order, alpha);
  if (!(top_order * hi / 60.0 < 0.5 * sample_rate_hz)) {
    throw std::invalid_argument("scenario: highest component exceeds Nyquist");
  }
}

double rpm_at(const ScenarioSpec& spec, double t) {
  if (has_wobble(spec.scenario)) {
    return spec.base_rpm *
           (1.0 + spec.wobble_fraction * std::sin(2.0 * std::numbers::pi * t / spec.wobble_period_s));
  }
  if (spec.scenario == Scenario::S5 && t > spec.jump_time_s) return spec.base_rpm + spec.jump_rpm;
  return spec.base_rpm;
}

GroundTruth reference_for_framing(const ScenarioSpec& spec, const FramingConfig& framing) {
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  GroundTruth truth;
  const std::size_t count = framing.frame_count(n);
  for (std::size_t t = 1; t <= count; ++t) {
    const double time = framing.center_time_s(t, spec.sample_rate_hz);
    truth.frame_index.push_back(t);
    truth.time_s.push_back(time);
    truth.rpm_ref.push_back(rpm_at(spec, time));
  }
  return truth;
}

SynthComponents synthesize_components(const ScenarioSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  const double fs = spec.sample_rate_hz;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase_dist(0.0, two_pi);
  std::vector<double> phase0(static_cast<std::size_t>(spec.n_harmonics));
  for (double& p : phase0) p = phase_dist(rng);
  const double sub_phase0 = phase_dist(rng);
  const double int_phase0 = phase_dist(rng);

  SynthComponents out;
  out.harmonic.assign(n, 0.0);
  out.noise.assign(n, 0.0);

  // Fundamental phase in cycles, integrated sample by sample so speed steps
  // change frequency without a phase reset.
  double cycles = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = two_pi * cycles;
    double x = 0.0;
    for (int m = 1; m <= spec.n_harmonics; ++m) {
      const double order = m * (1.0 + spec.detuning_of(m));
      x += spec.amplitude(m) * std::sin(order * angle + phase0[static_cast<std::size_t>(m - 1)]);
    }
    if (spec.scenario == Scenario::S1) x += spec.sub_ratio * std::sin(0.5 * angle + sub_phase0);
    if (spec.scenario == Scenario::S3) {
      x += spec.interference_level * std::sin(spec.alpha * angle + int_phase0);
    }
    out.harmonic[i] = x;
    const double t = static_cast<double>(i) / fs;
    cycles += rpm_at(spec, t) / 60.0 / fs;
  }

  if (spec.scenario == Scenario::S2) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double signal_power = 0.0, noise_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.noise[i] = gauss(rng);
      signal_power += out.harmonic[i] * out.harmonic[i];
      noise_power += out.noise[i] * out.noise[i];
    }
    const double target = signal_power / std::pow(10.0, spec.snr_db / 10.0);
    const double gain = std::sqrt(target / noise_power);
    for (double& v : out.noise) v *= gain;
  }
  return out;
}

SynthResult synthesize(const ScenarioSpec& spec, const FramingConfig& framing) {
  SynthComponents parts = synthesize_components(spec);
  SynthResult result;
  result.signal.sample_rate_hz = spec.sample_rate_hz;
  result.signal.samples = std::move(parts.harmonic);
  for (std::size_t i = 0; i < result.signal.samples.size(); ++i) {
    result.signal.samples[i] += parts.noise[i];
  }
  result.truth = reference_for_framing(spec, framing);
  return result;
}

}  // namespace arc
