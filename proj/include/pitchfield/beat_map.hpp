#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pitchfield {

struct BeatMapParams {
  double base_f0 = 220.0;
  int partials = 8;
  double interval_min = 0.0;   ///< semitones
  double interval_max = 12.0;  ///< semitones
  double step = 0.05;          ///< semitones
  double rolloff = 1.0;        ///< partial k has amplitude 1/k^rolloff
  int sample_rate = 16000;
  double duration = 0.25;      ///< seconds per row
  std::size_t rms_frame = 320;
  std::size_t rms_hop = 16;
  double max_beat_hz = 40.0;
  int zero_pad = 4;
  int phase_sets = 4;
  std::uint64_t seed = 1;
};

struct BeatMap {
  BeatMapParams params;
  std::vector<double> intervals;        ///< semitones, ascending
  std::vector<double> beat_frequencies;  ///< Hz, ascending
  std::vector<std::vector<double>> matrix;  ///< [interval][beat frequency]
  std::vector<double> energy;           ///< integrated modulation per interval
};

/// Random onset phases of the upper tone, one row per phase set.
std::vector<std::vector<double>> beat_phase_sets(const BeatMapParams& params);

/// Beat spectrum (RMS-envelope spectrum, DC removed) of two harmonic tones
/// at f_a and f_b with the given partial phases.
std::vector<double> beat_spectrum(double f_a, double f_b, const std::vector<double>& phases_a,
                                  const std::vector<double>& phases_b, const BeatMapParams& params);

std::vector<double> beat_frequency_axis(const BeatMapParams& params);

/// One map row averaged over the seeded phase sets.
std::vector<double> beat_row(double interval_semitones, const BeatMapParams& params);

double row_energy(const std::vector<double>& row);

/// Throws Error naming the first interval whose upper tone reaches Nyquist.
BeatMap compute_beat_map(const BeatMapParams& params = {});

struct BeatMinimum {
  double interval = 0.0;  ///< semitones
  std::optional<std::string> label;  ///< "p:q"
  double ratio_cents = 0.0;          ///< cents of the labelled ratio
};

struct MinimaParams {
  int max_term = 8;
  double label_tolerance_cents = 5.0;
  double neighbourhood = 0.25;  ///< semitones each side
  double significance = 2.0;    ///< neighbourhood maximum over the minimum, each side
  double sharpness = 1.5;       ///< adjacent rows over the minimum, each side
  double floor_fraction = 5e-4; ///< neighbourhood maximum over the map maximum
};

/// Nearest reduced ratio p/q >= 1 (p, q <= max_term) within tolerance.
std::optional<std::pair<int, int>> nearest_ratio(double cents, int max_term, double tolerance_cents);

std::vector<BeatMinimum> find_beat_minima(const BeatMap& map, const MinimaParams& params = {});

}  // namespace pitchfield
