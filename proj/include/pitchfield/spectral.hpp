#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pitchfield/loudness.hpp"
#include "pitchfield/signal.hpp"

namespace pitchfield {

struct StftParams {
  std::size_t frame_length = FramingDefaults::frame_length;
  std::size_t hop = FramingDefaults::hop;
  Window window = FramingDefaults::window;
  /// FFT size = frame_length · zero_pad. Padding refines the bin grid so the
  /// quadratic peak refinement stays unbiased at low frequencies.
  std::size_t zero_pad = 4;
};

/// Magnitude spectrogram. Magnitudes are scaled so that a stationary sinusoid of
/// amplitude A peaks at about A (on-bin exactly A, unweighted).
struct Spectrogram {
  std::vector<double> magnitudes;  ///< frames × bins, row-major
  std::vector<double> bin_frequencies;
  std::vector<double> frame_times;  ///< frame centres, seconds
  std::size_t frame_length = 0;
  std::size_t fft_size = 0;
  Window window = Window::hann;
  int sample_rate = 0;
  bool weighted = false;
  /// Factor applied to raw |FFT| values: 2 / sum(window).
  double magnitude_scale = 1.0;

  std::size_t frames() const { return frame_times.size(); }
  std::size_t bins() const { return bin_frequencies.size(); }
  std::span<const double> frame(std::size_t i) const {
    return std::span<const double>(magnitudes).subspan(i * bins(), bins());
  }
  double bin_width() const { return static_cast<double>(sample_rate) / static_cast<double>(fft_size); }
};

Spectrogram stft(const Signal& signal, const StftParams& params = {},
                 const LoudnessContour* weighting = nullptr);

/// Mean magnitude over all frames.
std::vector<double> average_spectrum(const Spectrogram& spectrogram);

struct Partial {
  double frequency;  ///< Hz
  double magnitude;  ///< linear
};

/// Partials present at one instant, sorted by ascending frequency.
struct ComplexToneSnapshot {
  std::vector<Partial> partials;
  std::optional<double> f0_candidate;
  double time = 0.0;

  bool empty() const { return partials.empty(); }
  const Partial& lowest() const { return partials.front(); }
};

struct PeakParams {
  double threshold_db = -60.0;      ///< relative to the frame maximum
  double min_prominence_db = 6.0;
};

/// Local maxima above threshold and prominence, refined by a three-point
/// parabola on log magnitude. Partials closer than 1 cent are merged.
ComplexToneSnapshot pick_peaks(std::span<const double> magnitudes,
                               std::span<const double> bin_frequencies,
                               const PeakParams& params = {});

/// Relative magnitude of a window's spectral sidelobe envelope at `bins`
/// frame-resolution bins from the main-lobe centre.
double leakage_envelope(Window window, double bins);

/// Drops peaks that lie under a stronger peak's window leakage plus the
/// prominence margin, or inside its main lobe. `resolution_hz` is
/// sample_rate / frame_length.
void suppress_leakage(ComplexToneSnapshot& snapshot, Window window, double resolution_hz,
                      const PeakParams& params = {});

/// Peaks of one frame with leakage suppressed.
ComplexToneSnapshot snapshot_at(const Spectrogram& spectrogram, std::size_t frame,
                                const PeakParams& params = {});

struct TrackPoint {
  std::size_t frame;
  double time;
  double frequency;
  double magnitude;
};

struct PartialTrack {
  int index = 0;  ///< 1 = lowest mean frequency
  std::size_t birth_frame = 0;
  std::size_t death_frame = 0;  ///< inclusive
  std::vector<TrackPoint> points;

  double mean_frequency() const;
  std::optional<double> frequency_at(std::size_t frame) const;
};

struct TrackParams {
  double max_jump_cents = 50.0;
  std::size_t min_frames = 3;
};

/// Greedy nearest-in-cents frame-to-frame linking of spectral peaks.
std::vector<PartialTrack> track_partials(const Spectrogram& spectrogram,
                                         const PeakParams& peaks = {},
                                         const TrackParams& params = {});

}  // namespace pitchfield
