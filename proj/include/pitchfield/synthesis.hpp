#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pitchfield/signal.hpp"
#include "pitchfield/spectral.hpp"

namespace pitchfield {

/// One partial of a complex tone: either a harmonic number of f0 or an exact
/// frequency, with an optional cent offset.
struct PartialSpec {
  double value = 1.0;
  bool exact_frequency = false;
  double amplitude = 1.0;
  double cents = 0.0;
};

struct Envelope {
  enum class Kind { constant, exponential };
  Kind kind = Kind::constant;
  double time_constant = 1.0;  ///< seconds, exponential only
};

struct ComplexToneSpec {
  double f0 = 110.0;
  std::vector<PartialSpec> partials;
  double duration = 1.0;
  Envelope envelope;

  /// Harmonics 1..count with equal amplitude.
  static ComplexToneSpec harmonic(double f0, int count, double duration, double amplitude = 1.0);

  double partial_frequency(const PartialSpec& p) const;
  /// The generating schedule as a snapshot (frequency, amplitude), ascending.
  ComplexToneSnapshot schedule() const;
};

/// Sum of phase-zero sinusoids. Throws Error listing partials at or above Nyquist.
Signal synth_complex_tone(const ComplexToneSpec& spec, int sample_rate);

/// Harmonic-boost patterns for 808 modes 1-7. Modes 1-3 follow the documented
/// patch behaviour; 4-7 are placeholder slots.
std::array<std::vector<int>, 7> default_808_patterns(int harmonics);

struct Bass808Patch {
  double target_f0 = 55.0;
  int mode = 1;
  double amount_db = 20.0;
  double glide_depth_cents = 100.0;
  double glide_time_constant = 0.05;
  double decay = 1.0;
  double duration = 2.0;
  int harmonics = 16;
  /// Level of unboosted upper harmonics relative to the fundamental.
  double base_level_db = -12.0;
  /// Overrides the mode's pattern when non-empty.
  std::vector<int> custom_pattern;
};

/// Additive 808-style bass: exponential pitch glide from target·2^(depth/1200)
/// down to target, exponential amplitude decay, fixed per-harmonic boosts.
Signal synth_808(const Bass808Patch& patch, int sample_rate);

/// Instantaneous fundamental of a patch at time t.
double bass808_frequency(const Bass808Patch& patch, double t);

struct WaveshaperSpec {
  std::vector<double> coefficients{0.0, 1.0};  ///< index = power
  double drive = 1.0;
  double mix = 1.0;
};

/// y = Σ c_i (drive·x)^i, blended with the dry signal by mix.
Signal waveshape(const Signal& signal, const WaveshaperSpec& spec);

/// Sample-wise product. Throws Error on length or rate mismatch.
Signal ring_modulate(const Signal& a, const Signal& b);

struct UnisonSpec {
  int voices = 2;
  double spread_cents = 10.0;
  bool normalize = true;  ///< divide the sum by the voice count
};

/// Voice detunes evenly spaced over [-spread/2, +spread/2].
std::vector<double> unison_detunes(int voices, double spread_cents);

Signal unison(const ComplexToneSpec& spec, const UnisonSpec& unison, int sample_rate);

struct PitchContour {
  enum class Kind { bend, screw };
  std::vector<std::pair<double, double>> points;  ///< (time s, cents), ascending time
  Kind kind = Kind::bend;

  double cents_at(double t) const;
};

/// Phase-continuous rendering of a complex tone whose frequencies follow the
/// contour. A contour that stays at 0 cents renders the plain tone.
Signal glide(const ComplexToneSpec& spec, const PitchContour& contour, int sample_rate);

/// Scales the signal down so |x| <= 1 - 1e-6; never amplifies.
std::vector<double> limit_peak(std::vector<double> samples);

}  // namespace pitchfield
