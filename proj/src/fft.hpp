#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pitchfield::detail {

/// Real-to-complex forward FFT of a fixed size. Input shorter than the size is
/// zero-padded. Not copyable; one instance per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// Returns size/2 + 1 complex bins.
  std::span<const std::complex<double>> forward(std::span<const double> input);

 private:
  std::size_t size_;
  double* in_;
  void* out_;
  void* plan_;
  std::vector<std::complex<double>> result_;
};

/// Magnitudes |X_k| of the zero-padded real FFT.
std::vector<double> magnitude_spectrum(std::span<const double> input, std::size_t fft_size);

}  // namespace pitchfield::detail

namespace pitchfield::detail {

/// Raw linear autocorrelation r(τ) = Σ x[t]·x[t+τ] for τ in [0, max_lag], via FFT.
std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag);

}  // namespace pitchfield::detail
