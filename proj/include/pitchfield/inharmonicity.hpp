#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pitchfield/loudness.hpp"
#include "pitchfield/spectral.hpp"

namespace pitchfield {

enum class Harmonicity { harmonic, quasi_harmonic, inharmonic };
std::string_view to_string(Harmonicity h);

struct InharmonicityParams {
  double harmonic_max_cents = 3.0;
  double quasi_harmonic_max_cents = 10.0;
  /// Tolerance handed to f0_gcd when locating the least-deviating series.
  double series_tolerance_cents = 50.0;
  double min_f0 = 20.0;
};

struct PartialDeviation {
  double frequency;
  int harmonic;
  double deviation_cents;  ///< relative to harmonic · f0_ref
};

struct InharmonicityReport {
  double f0_ref = 0.0;
  std::vector<PartialDeviation> partials;
  /// Fit of f_n = n·f0·sqrt(1 + B·n²); present with >= 3 partials.
  std::optional<double> stretch_b;
  std::optional<double> stretch_f0;
  std::optional<double> fit_residual_cents;  ///< RMS
  double max_abs_deviation_cents = 0.0;
  Harmonicity classification = Harmonicity::harmonic;
};

/// Deviation from the least-deviating harmonic series. Throws
/// Error("insufficient partials") below two partials.
InharmonicityReport inharmonicity(const ComplexToneSnapshot& snapshot,
                                  const InharmonicityParams& params = {});

struct SalientPartial {
  int harmonic;
  double frequency;
  double weighted_db;  ///< 20·log10 of the weighted magnitude
};

struct Carrier {
  std::vector<int> harmonics;  ///< consecutive harmonic numbers
  double centre_frequency;     ///< magnitude-weighted mean frequency
};

struct SalienceReport {
  double fundamental_frequency = 0.0;
  double fundamental_weighted_db = 0.0;
  std::vector<SalientPartial> partials;
  std::set<int> salient;  ///< harmonic numbers
  std::vector<Carrier> carriers;
};

struct SalienceParams {
  double margin_db = 0.0;
  std::size_t min_carrier_run = 3;
  double series_tolerance_cents = 30.0;
  double min_f0 = 20.0;
};

/// Partials whose loudness-weighted magnitude reaches the fundamental's plus
/// margin_db. The fundamental is the lowest partial and belongs to the salient
/// set only for negative margins. Pass contour = nullptr for flat weighting.
SalienceReport detect_salient_partials(const ComplexToneSnapshot& snapshot,
                                       const LoudnessContour* contour,
                                       const SalienceParams& params = {});

struct OddHarmonicProfile {
  double odd_energy = 0.0;
  double even_energy = 0.0;
  double ratio = 0.0;  ///< odd / even, +inf without even energy
  std::optional<bool> odd_dominant;  ///< absent when harmonic numbers are unassignable
  std::string warning;
};

/// Odd-to-even harmonic energy. Needs at least four partials.
OddHarmonicProfile odd_harmonic_profile(const ComplexToneSnapshot& snapshot,
                                        const InharmonicityParams& params = {});

}  // namespace pitchfield
