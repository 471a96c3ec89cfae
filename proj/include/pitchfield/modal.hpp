#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pitchfield/pitch.hpp"

namespace pitchfield {

struct FoldedValue {
  double cents;   ///< [0, 1200) relative to the final
  double weight;  ///< salience, or 1 when unweighted
};

/// Every candidate of every voiced frame as a pitch class relative to `final_hz`.
/// Throws Error("empty track") without voiced frames.
std::vector<FoldedValue> fold_to_pitch_classes(const PitchTrack& track, double final_hz,
                                               bool weight_by_salience = true);

struct PoleParams {
  double bin_cents = 5.0;
  double bandwidth_cents = 10.0;
  double min_mass = 0.05;
  double assign_radius_cents = 250.0;
  std::size_t min_observations = 100;
  /// A density maximum must rise this fraction of its height above the
  /// saddle towards any higher maximum.
  double min_relative_prominence = 0.25;
  double merge_cents = 50.0;
};

/// Distribution of observations around one pole. Q is the interquartile range.
struct PoleDistribution {
  double pole_cents = 0.0;  ///< [0, 1200) in the folding frame
  std::optional<double> pole_hz;
  std::vector<double> histogram;  ///< weight per 5-cent bin over [-250, 250) around the pole
  double q_cents = 0.0;
  double mass = 0.0;
  double assigned_weight = 0.0;
  std::size_t observations = 0;

  static constexpr double kHistogramSpan = 250.0;
  double histogram_bin_start(std::size_t i, double bin_cents = 5.0) const {
    return -kHistogramSpan + static_cast<double>(i) * bin_cents;
  }
};

struct PoleSet {
  std::vector<PoleDistribution> poles;  ///< ascending pole_cents
  double residual_mass = 0.0;           ///< weight further than the radius from every pole
};

/// Kernel-smoothed circular histogram, maxima as poles, nearest-pole
/// assignment. Throws Error below params.min_observations observations.
PoleSet estimate_poles(std::span<const FoldedValue> values, const PoleParams& params = {});

struct Degree {
  double cents_from_final;
  std::string name;       ///< chromatic name with the final as C
  double offset_cents;    ///< deviation from the equal-tempered degree
  double mass;
};

struct ModeParams {
  double min_mass = 0.05;
  double ambiguity_min_cents = 80.0;
  double ambiguity_max_cents = 120.0;
  double dedupe_cents = 50.0;
  /// When set, the final is the pole nearest this position instead of the
  /// highest-mass pole.
  std::optional<double> final_cents;
};

struct ModeEstimate {
  double final_cents = 0.0;  ///< position of the final in the folding frame
  std::optional<double> final_hz;
  std::vector<Degree> degrees;  ///< ascending, final first
  std::vector<std::pair<std::string, std::string>> ambiguous;
  std::optional<double> tuning_offset_cents;
};

/// Throws Error when `poles` is empty.
ModeEstimate infer_mode(std::span<const PoleDistribution> poles, const ModeParams& params = {});

struct Segment {
  double start;
  double end;
  std::string label;
};

struct SegmentOffset {
  Segment segment;
  std::optional<double> offset_cents;  ///< [-50, 50) from the A440 equal-tempered grid
  std::size_t voiced_frames = 0;
};

/// Offset minimising squared circular (mod 100 cents) distance to the
/// equal-tempered grid. One global entry when `segments` is empty.
std::vector<SegmentOffset> estimate_tuning_offset(const PitchTrack& track,
                                                  std::span<const Segment> segments = {});

/// Offset for a bare list of (frequency, weight) observations.
std::optional<double> tuning_offset(std::span<const std::pair<double, double>> observations);

}  // namespace pitchfield
