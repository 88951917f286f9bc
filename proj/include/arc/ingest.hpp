#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace arc {

// A mono vibration recording.
struct Signal {
  std::vector<double> samples;
  double sample_rate_hz{0.0};

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

struct FramingConfig {
  std::size_t frame_len{8192};
  std::size_t hop{128};

  // Throws std::invalid_argument unless 2 <= frame_len and 1 <= hop <= frame_len.
  void validate() const;

  // floor((len - N) / H) + 1, or 0 when the signal is shorter than one frame.
  std::size_t frame_count(std::size_t signal_len) const;

  std::size_t start_of(std::size_t index) const { return (index - 1) * hop; }

  // Frame centre in seconds for the 1-based frame index.
  double center_time_s(std::size_t index, double sample_rate_hz) const;
};

// A view over frame_len consecutive samples of a Signal. The signal must outlive
// the frame.
struct Frame {
  std::size_t index{0};         // 1-based
  std::size_t start_sample{0};  // (index - 1) * hop
  std::span<const double> data;
  double time_s{0.0};           // (start_sample + N/2) / fs
};

enum class SignalFormat { Wav, Csv };

// Picks the format from the file extension (".wav" or ".csv", case-insensitive).
SignalFormat format_from_path(const std::filesystem::path& path);

// CSV input needs csv_sample_rate_hz; WAV takes the rate from its header.
// Integer PCM is rescaled to [-1, 1].
Signal load_signal(const std::filesystem::path& path, SignalFormat format,
                   std::optional<double> csv_sample_rate_hz = std::nullopt);

// One sample per line, preceded by a "# sample_rate_hz=<fs>" comment line.
// Values are written with round-trip precision.
void write_csv(const Signal& signal, const std::filesystem::path& path);

// Mono 32-bit IEEE float WAV.
void write_wav(const Signal& signal, const std::filesystem::path& path);

std::vector<Frame> frame_signal(const Signal& signal, const FramingConfig& cfg);

}  // namespace arc
