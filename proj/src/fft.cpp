#include "arc/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace arc {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw std::invalid_argument("FFT size must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(n_);
  auto* cplx = fftw_alloc_complex(bins());
  complex_ = cplx;
  const int size = static_cast<int>(n_);
  forward_plan_ = fftw_plan_dft_r2c_1d(size, real_, cplx, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(size, cplx, real_, FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(complex_);
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> input) {
  const std::size_t used = std::min(input.size(), n_);
  std::copy_n(input.begin(), used, real_);
  std::fill(real_ + used, real_ + n_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* out = static_cast<const fftw_complex*>(complex_);
  std::vector<std::complex<double>> spectrum(bins());
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] = {out[k][0], out[k][1]};
  return spectrum;
}

std::vector<double> RealFft::inverse(std::span<const std::complex<double>> spectrum) {
  if (spectrum.size() != bins()) throw std::invalid_argument("inverse FFT: wrong bin count");
  auto* in = static_cast<fftw_complex*>(complex_);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    in[k][0] = spectrum[k].real();
    in[k][1] = spectrum[k].imag();
  }
  // c2r destroys its input; the buffer is rewritten on every call.
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::vector<double> out(real_, real_ + n_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (double& v : out) v *= scale;
  return out;
}

RealFft& RealFft::for_size(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace arc
