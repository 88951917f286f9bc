#include "arc/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>

namespace arc {

void FramingConfig::validate() const {
  if (frame_len < 2) {
    throw std::invalid_argument("framing: frame_len must be >= 2");
  }
  if (hop < 1) {
    throw std::invalid_argument("framing: hop must be >= 1");
  }
  if (hop > frame_len) {
    throw std::invalid_argument("framing: hop must not exceed frame_len");
  }
}

std::size_t FramingConfig::frame_count(std::size_t signal_len) const {
  if (signal_len < frame_len) return 0;
  return (signal_len - frame_len) / hop + 1;
}

double FramingConfig::center_time_s(std::size_t index, double sample_rate_hz) const {
  const double start = static_cast<double>(start_of(index));
  return (start + 0.5 * static_cast<double>(frame_len)) / sample_rate_hz;
}

std::vector<Frame> frame_signal(const Signal& signal, const FramingConfig& cfg) {
  cfg.validate();
  if (!(signal.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("signal: sample_rate_hz must be positive");
  }
  const std::size_t count = cfg.frame_count(signal.size());
  if (count == 0) {
    throw std::invalid_argument("signal shorter than one frame (" + std::to_string(signal.size()) +
                                " < " + std::to_string(cfg.frame_len) + " samples)");
  }
  std::vector<Frame> frames;
  frames.reserve(count);
  const std::span<const double> all(signal.samples);
  for (std::size_t t = 1; t <= count; ++t) {
    const std::size_t start = cfg.start_of(t);
    frames.push_back(Frame{t, start, all.subspan(start, cfg.frame_len),
                           cfg.center_time_s(t, signal.sample_rate_hz)});
  }
  return frames;
}

SignalFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".wav") return SignalFormat::Wav;
  if (ext == ".csv" || ext == ".txt") return SignalFormat::Csv;
  throw std::invalid_argument("cannot infer signal format from extension '" + ext +
                              "' (expected .wav or .csv)");
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

Signal load_csv(const std::filesystem::path& path, std::optional<double> rate) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

  Signal signal;
  std::optional<double> header_rate;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string field = trim(line);
    if (field.empty()) continue;
    if (field.front() == '#') {
      constexpr std::string_view key = "sample_rate_hz=";
      if (const auto pos = field.find(key); pos != std::string::npos) {
        header_rate = std::stod(field.substr(pos + key.size()));
      }
      continue;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
      throw std::runtime_error("'" + path.string() + "' line " + std::to_string(line_no) +
                               ": not a finite number: '" + field + "'");
    }
    signal.samples.push_back(value);
  }
  if (signal.samples.empty()) throw std::runtime_error("empty signal");

  if (rate) {
    signal.sample_rate_hz = *rate;
  } else if (header_rate) {
    signal.sample_rate_hz = *header_rate;
  } else {
    throw std::invalid_argument("CSV input requires a sample rate (--sample-rate <Hz>)");
  }
  if (!(signal.sample_rate_hz > 0.0)) {
    throw std::invalid_argument("sample rate must be positive");
  }
  return signal;
}

template <typename T>
T read_le(const unsigned char* p) {
  T value{};
  std::memcpy(&value, p, sizeof(T));
  return value;
}

int32_t read_int24(const unsigned char* p) {
  int32_t v = static_cast<int32_t>(p[0]) | (static_cast<int32_t>(p[1]) << 8) |
              (static_cast<int32_t>(p[2]) << 16);
  if (v & 0x800000) v |= ~0xFFFFFF;
  return v;
}

Signal load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.empty()) throw std::runtime_error("empty signal");
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("'" + path.string() + "' is not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t size = read_le<uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw std::runtime_error("WAV fmt chunk too short");
      format = read_le<uint16_t>(chunk + 8);
      channels = read_le<uint16_t>(chunk + 10);
      rate = read_le<uint32_t>(chunk + 12);
      bits = read_le<uint16_t>(chunk + 22);
      if (format == 0xFFFE && avail >= 26) {
        // WAVE_FORMAT_EXTENSIBLE: the sub-format GUID starts with the real tag.
        format = read_le<uint16_t>(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (channels == 0 || data == nullptr) {
    throw std::runtime_error("'" + path.string() + "' lacks fmt or data chunk");
  }
  if (channels != 1) {
    throw std::runtime_error("multi-channel WAV not supported (" + std::to_string(channels) +
                             " channels); provide a mono recording");
  }
  if (rate == 0) throw std::runtime_error("WAV sample rate is zero");

  const bool pcm = format == 1;
  const bool ieee = format == 3;
  if (!(pcm && (bits == 16 || bits == 24 || bits == 32)) && !(ieee && bits == 32)) {
    throw std::runtime_error("unsupported WAV encoding (format " + std::to_string(format) + ", " +
                             std::to_string(bits) + " bits)");
  }

  const std::size_t stride = bits / 8;
  const std::size_t count = data_size / stride;
  if (count == 0) throw std::runtime_error("empty signal");

  Signal signal;
  signal.sample_rate_hz = static_cast<double>(rate);
  signal.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* p = data + i * stride;
    double v = 0.0;
    if (ieee) {
      v = static_cast<double>(read_le<float>(p));
    } else if (bits == 16) {
      v = static_cast<double>(read_le<int16_t>(p)) / 32768.0;
    } else if (bits == 24) {
      v = static_cast<double>(read_int24(p)) / 8388608.0;
    } else {
      v = static_cast<double>(read_le<int32_t>(p)) / 2147483648.0;
    }
    signal.samples[i] = v;
  }
  return signal;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> buf{};
  std::memcpy(buf.data(), &value, sizeof(T));
  out.write(buf.data(), buf.size());
}

}  // namespace

Signal load_signal(const std::filesystem::path& path, SignalFormat format,
                   std::optional<double> csv_sample_rate_hz) {
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("cannot read '" + path.string() + "': no such file");
  }
  return format == SignalFormat::Wav ? load_wav(path) : load_csv(path, csv_sample_rate_hz);
}

void write_csv(const Signal& signal, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  std::array<char, 32> buf{};
  const auto [end, err] = std::to_chars(buf.data(), buf.data() + buf.size(), signal.sample_rate_hz);
  out << "# sample_rate_hz=" << std::string_view(buf.data(), end - buf.data()) << '\n';
  for (double v : signal.samples) {
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.write(buf.data(), ptr - buf.data());
    out.put('\n');
  }
}

void write_wav(const Signal& signal, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  const auto data_bytes = static_cast<uint32_t>(signal.samples.size() * sizeof(float));
  const auto rate = static_cast<uint32_t>(std::lround(signal.sample_rate_hz));
  out.write("RIFF", 4);
  put_le<uint32_t>(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_le<uint32_t>(out, 16);
  put_le<uint16_t>(out, 3);  // IEEE float
  put_le<uint16_t>(out, 1);
  put_le<uint32_t>(out, rate);
  put_le<uint32_t>(out, rate * sizeof(float));
  put_le<uint16_t>(out, sizeof(float));
  put_le<uint16_t>(out, 32);
  out.write("data", 4);
  put_le<uint32_t>(out, data_bytes);
  for (double v : signal.samples) put_le<float>(out, static_cast<float>(v));
}

}  // namespace arc
