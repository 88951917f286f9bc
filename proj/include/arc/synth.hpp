#pragma once

#include "arc/ingest.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace arc {

// S0 is a clean constant-speed harmonic series; S1..S5 each add one stressor.
enum class Scenario { S0, S1, S2, S3, S4, S5 };

std::string to_string(Scenario s);
Scenario parse_scenario(std::string_view name);  // "S0", "S0-clean", "s3", ...

struct ScenarioSpec {
  Scenario scenario{Scenario::S0};
  double duration_s{5.0};
  double sample_rate_hz{12800.0};
  double base_rpm{1500.0};
  int n_harmonics{5};
  std::vector<double> harmonic_amps;  // empty: a_m = 1/m
  std::uint64_t seed{1};

  // Bounds the trajectory must respect.
  double r_min{300.0};
  double r_max{4000.0};

  // S1..S4 speed wobble: base * (1 + wobble_fraction * sin(2 pi t / wobble_period_s)).
  double wobble_fraction{0.01};
  double wobble_period_s{2.0};

  double sub_ratio{0.8};           // S1: amplitude of the 0.5x component
  double snr_db{0.0};              // S2: harmonic power over noise power
  double interference_level{0.9};  // S3: amplitude of the alpha x component
  double alpha{3.7};               // S3: non-integer interference order
  std::vector<double> detuning;    // S4: delta_m per harmonic; empty: default set
  double jump_rpm{600.0};          // S5
  double jump_time_s{2.5};         // S5

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  double amplitude(int m) const;  // 1-based harmonic
  double detuning_of(int m) const;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// Default S4 detuning: delta_m = 0.004 * (m - 1)^2 (stiff-string-like spread).
std::vector<double> default_detuning(int n_harmonics);

// Prescribed speed trajectory in RPM at time t (seconds).
double rpm_at(const ScenarioSpec& spec, double t);

struct GroundTruth {
  std::vector<std::size_t> frame_index;
  std::vector<double> time_s;
  std::vector<double> rpm_ref;
};

// Reference RPM at every analysis frame centre.
GroundTruth reference_for_framing(const ScenarioSpec& spec, const FramingConfig& framing);

struct SynthComponents {
  std::vector<double> harmonic;  // harmonic series (+ stressor tones)
  std::vector<double> noise;     // additive noise (S2), zeros otherwise
};

// Separate components; signal = harmonic + noise.
SynthComponents synthesize_components(const ScenarioSpec& spec);

struct SynthResult {
  Signal signal;
  GroundTruth truth;
};

SynthResult synthesize(const ScenarioSpec& spec, const FramingConfig& framing);

}  // namespace arc
