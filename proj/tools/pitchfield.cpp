#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pitchfield/beat_map.hpp"
#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/report.hpp"
#include "pitchfield/spec_json.hpp"
#include "pitchfield/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw pitchfield::Error("cannot write " + path);
  out << text;
}

json parse_override(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw pitchfield::Error("--set expects key=value, got " + kv);
  const std::string key = kv.substr(0, eq);
  const std::string value = kv.substr(eq + 1);
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  return {{key, v}};
}

struct AnalyzeArgs {
  std::vector<std::string> stems;
  std::string final_note;
  std::string segments;
  std::string weighting;
  std::string out;
  std::string config;
  std::vector<std::string> overrides;
  std::vector<std::string> plots;
  std::string csv_dir;
  bool print_config = false;
};

int run_analyze(const AnalyzeArgs& a) {
  pitchfield::AnalysisConfig config;
  if (!a.config.empty()) pitchfield::apply_config_json(config, pitchfield::load_json_file(a.config));
  for (const auto& kv : a.overrides) pitchfield::apply_config_json(config, parse_override(kv));
  if (!a.weighting.empty()) pitchfield::apply_config_json(config, {{"weighting", a.weighting}});
  if (!a.final_note.empty()) config.final_hz = pitchfield::parse_note_or_hz(a.final_note);
  if (!a.segments.empty()) config.segments = pitchfield::read_segments_csv(a.segments);

  if (a.print_config) {
    write_text(pitchfield::config_to_json(config).dump(2) + "\n", a.out);
    return kOk;
  }
  if (a.stems.empty()) throw CLI::RequiredError("--stems");

  std::vector<fs::path> paths(a.stems.begin(), a.stems.end());
  const auto stems = pitchfield::StemSet::from_paths(paths);
  const auto report = pitchfield::analyze(stems, config);
  write_text(pitchfield::report_to_string(report), a.out);

  for (const auto& spec : a.plots) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw pitchfield::Error("--plot expects kind=path");
    pitchfield::emit_plot_data(report, pitchfield::parse_plot_kind(spec.substr(0, eq)), spec.substr(eq + 1));
  }
  if (!a.csv_dir.empty()) {
    fs::create_directories(a.csv_dir);
    for (const auto& s : report.stems) {
      for (const auto& t : s.pitch_tracks) {
        std::ofstream out(fs::path(a.csv_dir) / (s.label + "." + std::string(pitchfield::to_string(t.method)) + ".csv"));
        pitchfield::write_pitch_track_csv(t, out);
      }
    }
  }
  const bool all_failed = std::all_of(report.stems.begin(), report.stems.end(),
                                      [](const pitchfield::StemResult& s) { return s.error.has_value(); });
  return all_failed ? kInput : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pitch, partial and mode analysis for bass-heavy music"};
  app.set_version_flag("--version", std::string(pitchfield::tool_version()));
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Analyse stems and write a JSON report");
  analyze->add_option("--stems", an.stems, "Directory of .wav files or a list of files");
  analyze->add_option("--final", an.final_note, "Final as Hz or note name, e.g. 61 or E2+41c");
  analyze->add_option("--segments", an.segments, "CSV start_s,end_s,label");
  analyze->add_option("--weighting", an.weighting, "Equal-loudness weighting for salience")
      ->check(CLI::IsMember({"on", "off"}));
  analyze->add_option("--out", an.out, "Report path (stdout when omitted)");
  analyze->add_option("--config", an.config, "JSON file of key/value settings");
  analyze->add_option("--set", an.overrides, "Override one setting, key=value");
  analyze->add_option("--plot", an.plots, "Write plot CSV, kind=path (spectrum, pitch_track, histogram)");
  analyze->add_option("--csv-dir", an.csv_dir, "Write one pitch-track CSV per stem and method");
  analyze->add_flag("--print-config", an.print_config, "Print the effective configuration and exit");

  std::string synth_spec, synth_out, synth_format = "float32";
  auto* synth = app.add_subcommand("synth", "Render a JSON synthesis spec to WAV");
  synth->add_option("--spec", synth_spec, "Synthesis spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output WAV")->required();
  synth->add_option("--format", synth_format, "float32, pcm16 or pcm24")
      ->check(CLI::IsMember({"float32", "pcm16", "pcm24"}));

  pitchfield::BeatMapParams bm;
  std::string bm_out, bm_sidecar;
  bool bm_minima = false;
  auto* beatmap = app.add_subcommand("beatmap", "Interval vs beat-frequency map of two harmonic tones");
  beatmap->add_option("--base", bm.base_f0, "Lower tone f0 in Hz")->capture_default_str();
  beatmap->add_option("--partials", bm.partials, "Partials per tone")->capture_default_str();
  beatmap->add_option("--step", bm.step, "Interval step in semitones")->capture_default_str();
  beatmap->add_option("--min", bm.interval_min, "Lowest interval in semitones")->capture_default_str();
  beatmap->add_option("--max", bm.interval_max, "Highest interval in semitones")->capture_default_str();
  beatmap->add_option("--rolloff", bm.rolloff, "Partial k amplitude 1/k^rolloff")->capture_default_str();
  beatmap->add_option("--seed", bm.seed, "Phase seed")->capture_default_str();
  beatmap->add_option("--out", bm_out, "Matrix CSV")->required();
  beatmap->add_option("--sidecar", bm_sidecar, "JSON recipe (default: <out>.json)");
  beatmap->add_flag("--minima", bm_minima, "Print beat minima as JSON");

  std::string mode_track, mode_final, mode_out;
  auto* mode = app.add_subcommand("mode", "Poles and mode of a pitch-track CSV");
  mode->add_option("--track", mode_track, "CSV with time_s,frequency_hz[,salience,method,voiced]")->required();
  mode->add_option("--final", mode_final, "Final as Hz or note name");
  mode->add_option("--out", mode_out, "Output JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return run_analyze(an);
    if (*synth) {
      const auto signal = pitchfield::render_synth_spec(pitchfield::load_json_file(synth_spec));
      pitchfield::save_wav(synth_out, signal, pitchfield::parse_wav_format(synth_format));
      return kOk;
    }
    if (*beatmap) {
      const auto map = pitchfield::compute_beat_map(bm);
      pitchfield::write_beat_map_csv(map, bm_out);
      write_text(pitchfield::beat_map_sidecar(map).dump(2) + "\n", bm_sidecar.empty() ? bm_out + ".json" : bm_sidecar);
      if (bm_minima) {
        json arr = json::array();
        for (const auto& m : pitchfield::find_beat_minima(map)) {
          arr.push_back({{"interval_semitones", m.interval}, {"label", m.label ? json(*m.label) : json(nullptr)}});
        }
        std::cout << arr.dump(2) << "\n";
      }
      return kOk;
    }
    if (*mode) {
      const auto track = pitchfield::read_pitch_track_csv(mode_track);
      std::optional<double> final_hz;
      if (!mode_final.empty()) final_hz = pitchfield::parse_note_or_hz(mode_final);
      const auto m = pitchfield::analyze_mode(track, final_hz, pitchfield::AnalysisConfig{});
      const json j = {{"schema_version", pitchfield::kSchemaVersion},
                      {"fold_reference_hz", m.fold_reference_hz},
                      {"poles", pitchfield::to_json(m.poles)},
                      {"mode", pitchfield::to_json(m.mode)}};
      write_text(j.dump(2) + "\n", mode_out);
      return kOk;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const pitchfield::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
