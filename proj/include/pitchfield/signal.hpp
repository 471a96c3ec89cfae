#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace pitchfield {

/// Mono sampled audio. Immutable after construction.
class Signal {
 public:
  Signal() = default;
  /// Throws Error when sample_rate <= 0 or any sample is NaN/Inf.
  Signal(std::vector<double> samples, int sample_rate);

  std::span<const double> samples() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration() const {
    return sample_rate_ > 0 ? static_cast<double>(samples_.size()) / sample_rate_ : 0.0;
  }

  Signal scaled(double gain) const;

 private:
  std::vector<double> samples_;
  int sample_rate_ = 0;
};

enum class Window { rectangular, hann };

Window parse_window(std::string_view name);
std::string_view to_string(Window w);

/// Periodic window of the given length; values lie in [0, 1].
std::vector<double> make_window(Window w, std::size_t length);

/// Overlapping frames over a zero-padded copy of a signal. Frame i starts at
/// sample i·hop; the final frame is padded with zeros, never dropped.
class FrameSequence {
 public:
  FrameSequence(const Signal& signal, std::size_t frame_length, std::size_t hop, Window window);

  std::size_t count() const { return count_; }
  std::size_t frame_length() const { return frame_length_; }
  std::size_t hop() const { return hop_; }
  Window window() const { return window_; }
  int sample_rate() const { return sample_rate_; }

  /// Unwindowed view of frame i.
  std::span<const double> frame(std::size_t i) const;
  /// Windowed copy of frame i.
  std::vector<double> windowed(std::size_t i) const;
  /// Time of the frame start in seconds.
  double start_time(std::size_t i) const {
    return static_cast<double>(i * hop_) / sample_rate_;
  }
  /// Time of the frame centre in seconds.
  double centre_time(std::size_t i) const {
    return (static_cast<double>(i * hop_) + 0.5 * static_cast<double>(frame_length_)) / sample_rate_;
  }

 private:
  std::shared_ptr<const std::vector<double>> padded_;
  std::vector<double> window_values_;
  std::size_t frame_length_;
  std::size_t hop_;
  std::size_t count_;
  Window window_;
  int sample_rate_;
};

/// Number of frames for a signal of `length` samples: ceil((len - frame)/hop) + 1,
/// with a single frame when the signal is not longer than one frame.
std::size_t frame_count(std::size_t length, std::size_t frame_length, std::size_t hop);

FrameSequence frame(const Signal& signal, std::size_t frame_length, std::size_t hop,
                    Window window = Window::hann);

/// Root-mean-square of each rectangular frame.
std::vector<double> rms_envelope(const Signal& signal, std::size_t frame_length, std::size_t hop);

struct FramingDefaults {
  static constexpr std::size_t frame_length = 4096;
  static constexpr std::size_t hop = 1024;
  static constexpr Window window = Window::hann;
};

}  // namespace pitchfield
