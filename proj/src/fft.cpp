#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace pitchfield::detail {
namespace {
// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealFft::RealFft(std::size_t size) : size_(size), result_(size / 2 + 1) {
  std::lock_guard lock(planner_mutex());
  in_ = fftw_alloc_real(size_);
  auto* out = fftw_alloc_complex(size_ / 2 + 1);
  out_ = out;
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), in_, out, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(in_);
  fftw_free(out_);
}

std::span<const std::complex<double>> RealFft::forward(std::span<const double> input) {
  const std::size_t n = std::min(input.size(), size_);
  std::copy_n(input.begin(), n, in_);
  std::fill(in_ + n, in_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(plan_));
  const auto* out = static_cast<const fftw_complex*>(out_);
  for (std::size_t k = 0; k < result_.size(); ++k) result_[k] = {out[k][0], out[k][1]};
  return result_;
}

std::vector<double> magnitude_spectrum(std::span<const double> input, std::size_t fft_size) {
  RealFft fft(fft_size);
  auto bins = fft.forward(input);
  std::vector<double> out(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) out[k] = std::abs(bins[k]);
  return out;
}

}  // namespace pitchfield::detail

namespace pitchfield::detail {

std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  std::vector<double> out(max_lag + 1, 0.0);
  if (n == 0) return out;

  double* buf = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    buf = fftw_alloc_real(size);
    spec = fftw_alloc_complex(size / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(size), buf, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec, buf, FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), buf);
  std::fill(buf + n, buf + size, 0.0);
  fftw_execute(fwd);
  for (std::size_t k = 0; k < size / 2 + 1; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  fftw_execute(inv);
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) out[k] = buf[k] / static_cast<double>(size);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf);
    fftw_free(spec);
  }
  return out;
}

}  // namespace pitchfield::detail
