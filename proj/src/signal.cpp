#include "pitchfield/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pitchfield/error.hpp"

namespace pitchfield {

Signal::Signal(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) throw Error("sample rate must be positive");
  for (double v : samples_) {
    if (!std::isfinite(v)) throw Error("non-finite sample value");
  }
}

Signal Signal::scaled(double gain) const {
  std::vector<double> out(samples_.begin(), samples_.end());
  for (double& v : out) v *= gain;
  return Signal(std::move(out), sample_rate_);
}

Window parse_window(std::string_view name) {
  if (name == "hann") return Window::hann;
  if (name == "rectangular") return Window::rectangular;
  throw Error("unknown window: " + std::string(name));
}

std::string_view to_string(Window w) {
  return w == Window::hann ? "hann" : "rectangular";
}

std::vector<double> make_window(Window w, std::size_t length) {
  std::vector<double> out(length, 1.0);
  if (w == Window::hann) {
    for (std::size_t i = 0; i < length; ++i) {
      out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(length));
    }
  }
  return out;
}

std::size_t frame_count(std::size_t length, std::size_t frame_length, std::size_t hop) {
  if (length <= frame_length) return 1;
  return (length - frame_length + hop - 1) / hop + 1;
}

FrameSequence::FrameSequence(const Signal& signal, std::size_t frame_length, std::size_t hop,
                             Window window)
    : frame_length_(frame_length), hop_(hop), window_(window), sample_rate_(signal.sample_rate()) {
  if (signal.empty()) throw Error("empty input");
  if (hop == 0 || hop > frame_length) throw Error("invalid hop");
  if (frame_length == 0) throw Error("invalid frame length");
  count_ = frame_count(signal.size(), frame_length, hop);
  auto padded = std::make_shared<std::vector<double>>((count_ - 1) * hop + frame_length, 0.0);
  std::copy(signal.samples().begin(), signal.samples().end(), padded->begin());
  padded_ = std::move(padded);
  window_values_ = make_window(window, frame_length);
}

std::span<const double> FrameSequence::frame(std::size_t i) const {
  return std::span<const double>(*padded_).subspan(i * hop_, frame_length_);
}

std::vector<double> FrameSequence::windowed(std::size_t i) const {
  auto f = frame(i);
  std::vector<double> out(f.begin(), f.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= window_values_[k];
  return out;
}

FrameSequence frame(const Signal& signal, std::size_t frame_length, std::size_t hop, Window window) {
  return FrameSequence(signal, frame_length, hop, window);
}

std::vector<double> rms_envelope(const Signal& signal, std::size_t frame_length, std::size_t hop) {
  const FrameSequence frames(signal, frame_length, hop, Window::rectangular);
  std::vector<double> out(frames.count());
  for (std::size_t i = 0; i < frames.count(); ++i) {
    double acc = 0.0;
    for (double v : frames.frame(i)) acc += v * v;
    out[i] = std::sqrt(acc / static_cast<double>(frame_length));
  }
  return out;
}

}  // namespace pitchfield
