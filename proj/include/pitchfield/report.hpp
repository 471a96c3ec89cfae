#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pitchfield/beat_map.hpp"
#include "pitchfield/inharmonicity.hpp"
#include "pitchfield/modal.hpp"
#include "pitchfield/pitch.hpp"
#include "pitchfield/spectral.hpp"

namespace pitchfield {

inline constexpr int kSchemaVersion = 1;

std::string_view tool_version();

struct AnalysisConfig {
  StftParams stft;
  PeakParams peaks;
  TrackParams tracks;
  GcdParams gcd;
  AutocorrelationParams autocorrelation;
  InharmonicityParams inharmonicity;
  SalienceParams salience;
  PoleParams poles;
  ModeParams mode;
  bool weighting = true;
  bool weight_poles_by_salience = true;
  /// Fraction of voiced frames in which a harmonic must be salient to enter
  /// the stem-level salient set.
  double salient_fraction = 0.5;
  std::optional<double> final_hz;
  std::vector<Segment> segments;
};

/// Flat key/value echo of every setting, keyed like the CLI flags.
nlohmann::json config_to_json(const AnalysisConfig& config);

/// Applies a flat key/value document on top of `config`. Unknown keys throw.
void apply_config_json(AnalysisConfig& config, const nlohmann::json& j);

struct StemSet {
  std::map<std::string, std::filesystem::path> stems;
  std::optional<std::filesystem::path> segments_file;
  std::optional<double> final_hz;

  /// A directory of .wav files (labels are file stems) or explicit paths.
  static StemSet from_paths(const std::vector<std::filesystem::path>& paths);
};

struct InharmonicityFrame {
  double time;
  InharmonicityReport report;
};

struct SalienceFrame {
  double time;
  SalienceReport report;
};

struct StemResult {
  std::string label;
  std::string path;
  std::string checksum;  ///< FNV-1a 64 of the file bytes
  std::optional<std::string> error;

  int sample_rate = 0;
  double duration = 0.0;
  bool voiced = false;
  std::size_t partial_tracks = 0;
  std::vector<double> spectrum_frequencies;
  std::vector<double> spectrum_magnitudes;
  std::vector<PitchTrack> pitch_tracks;  ///< one per PitchMethod, in enum order
  std::vector<std::pair<double, double>> discrepancy;  ///< lowest partial vs autocorrelation
  std::vector<InharmonicityFrame> inharmonicity;
  std::vector<SalienceFrame> salience;
  std::vector<int> salient_set;
  std::vector<double> folded_histogram;  ///< observation count per 5-cent bin over [0, 1200)
  double fold_reference_hz = 0.0;
  std::optional<PoleSet> poles;
  std::optional<ModeEstimate> mode;
  std::vector<SegmentOffset> tuning;
  std::vector<std::string> notes;

  const PitchTrack* track(PitchMethod m) const;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::vector<StemResult> stems;  ///< sorted by label
};

/// Runs the full pipeline on one signal.
StemResult analyze_signal(const Signal& signal, const AnalysisConfig& config, std::string label = "signal");

/// Runs every stem in parallel; a failing stem records its error and does
/// not affect the others.
AnalysisReport analyze(const StemSet& stems, AnalysisConfig config);

nlohmann::json to_json(const AnalysisReport& report);
/// Deterministic serialisation (sorted keys, rounded floats).
std::string report_to_string(const AnalysisReport& report);

std::uint64_t fnv1a64(std::string_view bytes);
std::string file_checksum(const std::filesystem::path& path);

enum class PlotKind { spectrum, pitch_track, histogram, beatmap };

PlotKind parse_plot_kind(std::string_view name);
std::string_view to_string(PlotKind k);

/// Kinds the report can emit; the beat map is never part of an analysis.
std::vector<PlotKind> available_plot_kinds(const AnalysisReport& report);

/// Writes CSV for one stem (the first when `stem` is empty).
/// Throws Error listing the available kinds when `kind` is absent.
void emit_plot_data(const AnalysisReport& report, PlotKind kind, const std::filesystem::path& path,
                    std::string_view stem = {});

/// Matrix CSV: header row of beat frequencies, first column interval.
void write_beat_map_csv(const BeatMap& map, const std::filesystem::path& path);
nlohmann::json beat_map_sidecar(const BeatMap& map);

std::vector<Segment> read_segments_csv(const std::filesystem::path& path);
void write_pitch_track_csv(const PitchTrack& track, std::ostream& out);
PitchTrack read_pitch_track_csv(const std::filesystem::path& path);

/// Fold, pole and mode pipeline used by the `mode` subcommand.
struct ModeAnalysis {
  double fold_reference_hz = 0.0;
  PoleSet poles;
  ModeEstimate mode;
};
ModeAnalysis analyze_mode(const PitchTrack& track, std::optional<double> final_hz, const AnalysisConfig& config);

nlohmann::json to_json(const PoleSet& poles);
nlohmann::json to_json(const ModeEstimate& mode);

}  // namespace pitchfield
