#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace pitchfield {

inline constexpr double kA4Hz = 440.0;

/// 1200·log2(f / ref). Both arguments must be positive.
inline double cents(double f, double ref) { return 1200.0 * std::log2(f / ref); }

inline double apply_cents(double f, double c) { return f * std::exp2(c / 1200.0); }

/// Wraps a cent value into [0, period).
inline double wrap_cents(double c, double period = 1200.0) {
  double r = std::fmod(c, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

/// Signed circular distance a - b folded into [-period/2, period/2).
inline double circular_diff(double a, double b, double period = 1200.0) {
  double d = wrap_cents(a - b + period / 2.0, period) - period / 2.0;
  return d;
}

/// Parses scientific pitch notation with an optional cent offset
/// ("B1", "D#1", "Eb3", "E2+41c", "A4-40c") or a plain frequency ("61", "61Hz").
/// Returns the frequency in Hz with A4 = 440 Hz.
double parse_note_or_hz(std::string_view text);

/// Nearest chromatic name relative to a final treated as C: "C", "Db", "D",
/// "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B".
std::string degree_name(double cents_from_final);

/// Letter of the diatonic step a degree name belongs to ("Eb" and "E" -> 'E').
char degree_letter(double cents_from_final);

/// Absolute note name for a frequency, e.g. "E2+41c".
std::string note_name(double hz);

}  // namespace pitchfield
