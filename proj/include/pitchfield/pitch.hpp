#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pitchfield/signal.hpp"
#include "pitchfield/spectral.hpp"

namespace pitchfield {

enum class PitchMethod { lowest_partial, gcd_f0, autocorrelation, partial_spacing };

std::string_view to_string(PitchMethod m);
PitchMethod parse_pitch_method(std::string_view name);

struct PitchCandidate {
  double frequency;  ///< Hz
  double salience;   ///< [0, 1]
};

/// Pitch candidates at one analysis frame, sorted by descending salience.
/// Several candidates per frame are kept; no octave correction is applied.
struct PitchFrame {
  double time = 0.0;
  std::vector<PitchCandidate> candidates;

  bool voiced() const { return !candidates.empty(); }
  double top_frequency() const { return candidates.front().frequency; }
};

struct PitchTrack {
  PitchMethod method = PitchMethod::lowest_partial;
  std::vector<PitchFrame> frames;

  std::size_t voiced_count() const;
};

struct GcdParams {
  double tolerance_cents = 30.0;
  double min_f0 = 20.0;
};

/// Largest f >= min_f0 such that every partial lies within tolerance of an
/// integer multiple of f. The returned value is the least-squares (in cents)
/// fundamental of that harmonic-number assignment.
std::optional<double> f0_gcd(const ComplexToneSnapshot& snapshot, const GcdParams& params = {});

/// Harmonic numbers assigned to each partial for a given fundamental (>= 1).
std::vector<int> assign_harmonics(const ComplexToneSnapshot& snapshot, double f0);

struct AutocorrelationParams {
  double min_hz = 25.0;
  double max_hz = 1000.0;
  double threshold = 0.3;
};

/// Candidates from the autocorrelation normalised by its lag-0 value. Lags
/// below sample_rate/max_hz are excluded. Peak lags are refined on the
/// Hann-windowed autocorrelation divided by the window's own autocorrelation.
PitchFrame autocorrelation_pitch(std::span<const double> frame, int sample_rate,
                                 const AutocorrelationParams& params = {});

/// Median of consecutive partial spacings; absent with fewer than two partials.
std::optional<double> partial_spacing_pitch(const ComplexToneSnapshot& snapshot);

struct AnalysisFraming {
  std::size_t frame_length = FramingDefaults::frame_length;
  std::size_t hop = FramingDefaults::hop;
};

PitchTrack autocorrelation_track(const Signal& signal, const AnalysisFraming& framing = {},
                                 const AutocorrelationParams& params = {});

/// Lowest surviving partial track at each frame. Salience is its magnitude
/// relative to the loudest partial alive in that frame.
PitchTrack lowest_partial_track(std::span<const PartialTrack> tracks,
                                std::span<const double> frame_times);

PitchTrack gcd_track(std::span<const ComplexToneSnapshot> snapshots, const GcdParams& params = {});
PitchTrack spacing_track(std::span<const ComplexToneSnapshot> snapshots);

/// Snapshots restricted to the partials of surviving tracks, one per frame.
std::vector<ComplexToneSnapshot> track_snapshots(std::span<const PartialTrack> tracks,
                                                 std::span<const double> frame_times);

/// 1200·log2(f_a / f_b) on every frame where both tracks are voiced.
/// Throws Error when the frame grids differ.
std::vector<std::pair<double, double>> pitch_discrepancy(const PitchTrack& a, const PitchTrack& b);

}  // namespace pitchfield
