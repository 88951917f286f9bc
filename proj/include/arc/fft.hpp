#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace arc {

// Real-input FFT of a fixed size backed by FFTW. Plans are created once per
// size and per thread (see RealFft::for_size); executing a plan is thread-safe.
class RealFft {
public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  std::size_t bins() const { return n_ / 2 + 1; }

  // Forward transform of `input`, zero-padded (or truncated) to size().
  // Returns the n/2+1 non-negative-frequency bins, unnormalized.
  std::vector<std::complex<double>> forward(std::span<const double> input);

  // Inverse of forward(): takes n/2+1 bins, returns n real samples scaled by 1/n.
  std::vector<double> inverse(std::span<const std::complex<double>> spectrum);

  // Per-thread cached instance for size n.
  static RealFft& for_size(std::size_t n);

private:
  std::size_t n_;
  double* real_{nullptr};
  void* complex_{nullptr};
  void* forward_plan_{nullptr};
  void* inverse_plan_{nullptr};
};

// Periodic-symmetric Hann taper of length n.
std::vector<double> hann_window(std::size_t n);

}  // namespace arc
