#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "pitchfield/cents.hpp"
#include "pitchfield/loudness.hpp"
#include "pitchfield/modal.hpp"
#include "pitchfield/pitch.hpp"
#include "pitchfield/signal.hpp"
#include "pitchfield/spectral.hpp"
#include "pitchfield/synthesis.hpp"

namespace fixtures {

using namespace pitchfield;

inline constexpr int kRate = 48000;
inline constexpr double kUnboostedDb = -12.0;
inline constexpr double kBoostDb = 20.0;

inline double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }

/// Harmonic tone whose fundamental sits at 0 dB, other harmonics at
/// kUnboostedDb, and `boosted` harmonics kBoostDb above that. With a contour
/// the levels hold after weighting: each harmonic is pre-compensated by the
/// contour's gain relative to the fundamental.
inline ComplexToneSpec boosted_tone(double f0, const std::set<int>& boosted, int harmonics = 16,
                                    double duration = 1.0, const LoudnessContour* contour = nullptr) {
  ComplexToneSpec spec;
  spec.f0 = f0;
  spec.duration = duration;
  for (int h = 1; h <= harmonics; ++h) {
    double db = h == 1 ? 0.0 : kUnboostedDb;
    if (boosted.count(h)) db += kBoostDb;
    if (contour) db += contour->gain_db(f0) - contour->gain_db(h * f0);
    spec.partials.push_back({static_cast<double>(h), false, db_to_amp(db), 0.0});
  }
  return spec;
}

struct BoostFixture {
  std::string name;
  double f0;
  std::set<int> boosted;
};

inline std::vector<BoostFixture> boost_fixtures() {
  return {{"61 Hz h5", 61.0, {5}}, {"148 Hz h5", 148.0, {5}}, {"39 Hz h5", 39.0, {5}}, {"84 Hz h5-10-15", 84.0, {5, 10, 15}}};
}

/// Odd harmonics 3, 5, ... of f0 (fundamental removed).
inline ComplexToneSpec odd_without_fundamental(double f0, int highest, double duration = 1.0) {
  ComplexToneSpec spec;
  spec.f0 = f0;
  spec.duration = duration;
  for (int h = 3; h <= highest; h += 2) spec.partials.push_back({static_cast<double>(h), false, 1.0 / h, 0.0});
  return spec;
}

/// Middle-frame snapshot of a rendered tone, leakage suppressed.
inline ComplexToneSnapshot middle_snapshot(const Signal& s, const StftParams& params = {}) {
  const auto spec = stft(s, params);
  return snapshot_at(spec, spec.frames() / 2);
}

/// One observation per frame drawn from poles (cents above `final_hz`) with
/// the given probabilities and Gaussian spread.
inline PitchTrack pole_track(double final_hz, const std::vector<double>& poles_cents,
                             const std::vector<double>& probabilities, double sigma_cents, std::size_t frames,
                             unsigned seed, double octave_jitter = 0.0) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(probabilities.begin(), probabilities.end());
  std::normal_distribution<double> spread(0.0, sigma_cents);
  std::bernoulli_distribution octave(octave_jitter);
  PitchTrack track;
  track.method = PitchMethod::gcd_f0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double c = poles_cents[pick(rng)] + spread(rng) + (octave(rng) ? 1200.0 : 0.0);
    track.frames.push_back({static_cast<double>(i) * 1024.0 / kRate, {{apply_cents(final_hz, c), 1.0}}});
  }
  return track;
}

/// Interquartile range of N(0, sigma).
inline double gaussian_iqr(double sigma) { return 1.3489795003921634 * sigma; }

/// Track of equal-tempered notes (A440 grid) shifted by `offset_cents`
/// with small Gaussian jitter, covering [start, end).
inline std::vector<PitchFrame> tuned_frames(double start, double end, double offset_cents, unsigned seed,
                                            double jitter_cents = 3.0) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> note(-24, 12);
  std::normal_distribution<double> jitter(0.0, jitter_cents);
  std::vector<PitchFrame> out;
  const double hop = 1024.0 / kRate;
  for (double t = start; t < end; t += hop) {
    const double c = 100.0 * note(rng) + offset_cents + jitter(rng);
    out.push_back({t, {{apply_cents(kA4Hz, c), 1.0}}});
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pitchfield_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
