#pragma once

#include <istream>
#include <span>
#include <string_view>
#include <vector>

namespace pitchfield {

struct ContourPoint {
  double frequency_hz;
  double level_db;
};

/// Equal-loudness contour: SPL needed at each frequency for equal loudness.
/// Interpolated with a monotone piecewise cubic in (log-frequency, dB).
class LoudnessContour {
 public:
  /// Throws Error("degenerate contour") with fewer than two anchors and
  /// Error when frequencies are not strictly increasing and positive.
  LoudnessContour(std::vector<ContourPoint> anchors, double phon_level = 50.0);

  std::span<const ContourPoint> anchors() const { return anchors_; }
  double phon_level() const { return phon_level_; }

  /// Contour level in dB SPL at f; clamped to the end anchors outside the table.
  double level_db(double frequency_hz) const;
  /// L(1 kHz) - L(f): 0 dB at 1 kHz, negative where the ear is less sensitive.
  double gain_db(double frequency_hz) const;
  /// Magnitude-domain gain 10^(gain_db/20).
  double gain(double frequency_hz) const;

 private:
  std::vector<ContourPoint> anchors_;
  std::vector<double> log_f_;
  std::vector<double> slopes_;
  double phon_level_;
  double reference_db_ = 0.0;
};

/// Parses "frequency_hz level_db" rows; '#' starts a comment line.
LoudnessContour parse_contour(std::istream& in, double phon_level = 50.0);
LoudnessContour load_contour(const std::string& path, double phon_level = 50.0);

/// The shipped ISO 226:2023 50-phon contour.
const LoudnessContour& iso226_50phon();

/// Multiplies each magnitude by the contour gain at its bin frequency.
std::vector<double> weight_spectrum(std::span<const double> magnitudes,
                                    std::span<const double> bin_frequencies,
                                    const LoudnessContour& contour);

}  // namespace pitchfield
