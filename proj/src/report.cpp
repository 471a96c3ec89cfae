#include "pitchfield/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <thread>

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/loudness.hpp"
#include "pitchfield/wav.hpp"

#ifndef PITCHFIELD_VERSION
#define PITCHFIELD_VERSION "0.0.0"
#endif

namespace pitchfield {
namespace {

using nlohmann::json;

constexpr double kHistogramBin = 5.0;

json num(double x, int decimals = 6) {
  if (!std::isfinite(x)) return nullptr;
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(x * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

json opt_num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

struct Binding {
  std::string key;
  std::function<json()> get;
  std::function<void(const json&)> set;
};

template <class T>
Binding bind(std::string key, T& field) {
  return {std::move(key), [&field] { return json(field); }, [&field](const json& j) { field = j.get<T>(); }};
}

std::vector<Binding> bindings(AnalysisConfig& c) {
  std::vector<Binding> b;
  b.push_back(bind("frame_length", c.stft.frame_length));
  b.push_back(bind("hop", c.stft.hop));
  b.push_back({"window", [&c] { return json(std::string(to_string(c.stft.window))); },
               [&c](const json& j) { c.stft.window = parse_window(j.get<std::string>()); }});
  b.push_back(bind("zero_pad", c.stft.zero_pad));
  b.push_back(bind("peak_threshold_db", c.peaks.threshold_db));
  b.push_back(bind("peak_min_prominence_db", c.peaks.min_prominence_db));
  b.push_back(bind("track_max_jump_cents", c.tracks.max_jump_cents));
  b.push_back(bind("track_min_frames", c.tracks.min_frames));
  b.push_back(bind("gcd_tolerance_cents", c.gcd.tolerance_cents));
  b.push_back(bind("gcd_min_f0_hz", c.gcd.min_f0));
  b.push_back(bind("acf_min_hz", c.autocorrelation.min_hz));
  b.push_back(bind("acf_max_hz", c.autocorrelation.max_hz));
  b.push_back(bind("acf_threshold", c.autocorrelation.threshold));
  b.push_back(bind("harmonic_max_cents", c.inharmonicity.harmonic_max_cents));
  b.push_back(bind("quasi_harmonic_max_cents", c.inharmonicity.quasi_harmonic_max_cents));
  b.push_back(bind("inharmonicity_series_tolerance_cents", c.inharmonicity.series_tolerance_cents));
  b.push_back(bind("inharmonicity_min_f0_hz", c.inharmonicity.min_f0));
  b.push_back(bind("salience_margin_db", c.salience.margin_db));
  b.push_back(bind("salience_min_carrier_run", c.salience.min_carrier_run));
  b.push_back(bind("salience_series_tolerance_cents", c.salience.series_tolerance_cents));
  b.push_back(bind("salience_min_f0_hz", c.salience.min_f0));
  b.push_back(bind("salient_fraction", c.salient_fraction));
  b.push_back(bind("pole_bin_cents", c.poles.bin_cents));
  b.push_back(bind("pole_bandwidth_cents", c.poles.bandwidth_cents));
  b.push_back(bind("pole_min_mass", c.poles.min_mass));
  b.push_back(bind("pole_assign_radius_cents", c.poles.assign_radius_cents));
  b.push_back(bind("pole_min_observations", c.poles.min_observations));
  b.push_back(bind("pole_min_relative_prominence", c.poles.min_relative_prominence));
  b.push_back(bind("pole_merge_cents", c.poles.merge_cents));
  b.push_back(bind("mode_min_mass", c.mode.min_mass));
  b.push_back(bind("ambiguity_min_cents", c.mode.ambiguity_min_cents));
  b.push_back(bind("ambiguity_max_cents", c.mode.ambiguity_max_cents));
  b.push_back(bind("mode_dedupe_cents", c.mode.dedupe_cents));
  b.push_back({"weighting", [&c] { return json(c.weighting ? "on" : "off"); },
               [&c](const json& j) {
                 if (j.is_boolean()) {
                   c.weighting = j.get<bool>();
                   return;
                 }
                 const auto s = j.get<std::string>();
                 if (s != "on" && s != "off") throw Error("weighting must be on or off");
                 c.weighting = s == "on";
               }});
  b.push_back(bind("weight_poles_by_salience", c.weight_poles_by_salience));
  b.push_back({"final", [&c] { return c.final_hz ? json(*c.final_hz) : json(nullptr); },
               [&c](const json& j) {
                 if (j.is_null()) {
                   c.final_hz.reset();
                 } else if (j.is_string()) {
                   c.final_hz = parse_note_or_hz(j.get<std::string>());
                 } else {
                   c.final_hz = j.get<double>();
                 }
               }});
  return b;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

json track_json(const PitchTrack& t) {
  json frames = json::array();
  for (const auto& f : t.frames) {
    json cands = json::array();
    for (const auto& c : f.candidates) cands.push_back({{"frequency_hz", num(c.frequency)}, {"salience", num(c.salience)}});
    frames.push_back({{"time_s", num(f.time)}, {"candidates", cands}});
  }
  return {{"method", std::string(to_string(t.method))}, {"voiced_frames", t.voiced_count()}, {"frames", frames}};
}

json inharmonicity_json(const InharmonicityFrame& f) {
  json partials = json::array();
  for (const auto& p : f.report.partials) {
    partials.push_back({{"frequency_hz", num(p.frequency)}, {"harmonic", p.harmonic},
                        {"deviation_cents", num(p.deviation_cents)}});
  }
  return {{"time_s", num(f.time)},
          {"f0_ref_hz", num(f.report.f0_ref)},
          {"stretch_b", opt_num(f.report.stretch_b)},
          {"stretch_f0_hz", opt_num(f.report.stretch_f0)},
          {"fit_residual_cents", opt_num(f.report.fit_residual_cents)},
          {"max_abs_deviation_cents", num(f.report.max_abs_deviation_cents)},
          {"classification", std::string(to_string(f.report.classification))},
          {"partials", partials}};
}

json salience_json(const SalienceFrame& f) {
  json carriers = json::array();
  for (const auto& c : f.report.carriers) {
    carriers.push_back({{"harmonics", c.harmonics}, {"centre_frequency_hz", num(c.centre_frequency)}});
  }
  json partials = json::array();
  for (const auto& p : f.report.partials) {
    if (!f.report.salient.count(p.harmonic)) continue;
    partials.push_back({{"harmonic", p.harmonic}, {"frequency_hz", num(p.frequency)},
                        {"weighted_db", num(p.weighted_db)}});
  }
  return {{"time_s", num(f.time)},
          {"fundamental_hz", num(f.report.fundamental_frequency)},
          {"fundamental_weighted_db", num(f.report.fundamental_weighted_db)},
          {"salient", std::vector<int>(f.report.salient.begin(), f.report.salient.end())},
          {"salient_partials", partials},
          {"carriers", carriers}};
}

json stem_json(const StemResult& s) {
  json j;
  j["label"] = s.label;
  j["path"] = s.path;
  j["checksum_fnv1a64"] = s.checksum;
  j["error"] = s.error ? json(*s.error) : json(nullptr);
  if (s.error) return j;
  j["sample_rate_hz"] = s.sample_rate;
  j["duration_s"] = num(s.duration);
  j["voiced"] = s.voiced;
  j["partial_tracks"] = s.partial_tracks;
  json tracks = json::object();
  for (const auto& t : s.pitch_tracks) tracks[std::string(to_string(t.method))] = track_json(t);
  j["pitch_tracks"] = tracks;
  json disc = json::array();
  for (const auto& [t, c] : s.discrepancy) disc.push_back({{"time_s", num(t)}, {"cents", num(c)}});
  j["discrepancy_lowest_vs_autocorrelation"] = disc;
  json inh = json::array();
  for (const auto& f : s.inharmonicity) inh.push_back(inharmonicity_json(f));
  j["inharmonicity"] = inh;
  json sal = json::array();
  for (const auto& f : s.salience) sal.push_back(salience_json(f));
  j["salience"] = sal;
  j["salient_set"] = s.salient_set;
  j["fold_reference_hz"] = num(s.fold_reference_hz);
  json hist = json::array();
  for (double v : s.folded_histogram) hist.push_back(num(v));
  j["folded_histogram_counts_5_cent"] = hist;
  j["poles"] = s.poles ? to_json(*s.poles) : json(nullptr);
  j["mode"] = s.mode ? to_json(*s.mode) : json(nullptr);
  json tuning = json::array();
  for (const auto& o : s.tuning) {
    tuning.push_back({{"label", o.segment.label},
                      {"start_s", num(o.segment.start)},
                      {"end_s", num(o.segment.end)},
                      {"offset_cents", opt_num(o.offset_cents)},
                      {"voiced_frames", o.voiced_frames}});
  }
  j["tuning_offsets"] = tuning;
  j["notes"] = s.notes;
  return j;
}

const StemResult& select_stem(const AnalysisReport& report, std::string_view stem) {
  for (const auto& s : report.stems) {
    if ((stem.empty() && !s.error) || s.label == stem) return s;
  }
  throw Error(stem.empty() ? std::string("report has no analysed stems") : "no stem named " + std::string(stem));
}

}  // namespace

std::string_view tool_version() { return PITCHFIELD_VERSION; }

json config_to_json(const AnalysisConfig& config) {
  AnalysisConfig copy = config;
  json j = json::object();
  for (const auto& b : bindings(copy)) j[b.key] = b.get();
  json segments = json::array();
  for (const auto& s : config.segments) {
    segments.push_back({{"start_s", s.start}, {"end_s", s.end}, {"label", s.label}});
  }
  j["segments"] = segments;
  return j;
}

void apply_config_json(AnalysisConfig& config, const json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  auto b = bindings(config);
  for (const auto& [key, value] : j.items()) {
    if (key == "segments") {
      config.segments.clear();
      for (const auto& s : value) {
        config.segments.push_back({s.at("start_s").get<double>(), s.at("end_s").get<double>(),
                                   s.at("label").get<std::string>()});
      }
      continue;
    }
    auto it = std::find_if(b.begin(), b.end(), [&](const Binding& x) { return x.key == key; });
    if (it == b.end()) throw Error("unknown config key: " + key);
    try {
      it->set(value);
    } catch (const json::exception& e) {
      throw Error("invalid value for " + key + ": " + e.what());
    }
  }
}

StemSet StemSet::from_paths(const std::vector<std::filesystem::path>& paths) {
  StemSet set;
  auto add = [&](const std::filesystem::path& p) {
    const std::string label = p.stem().string();
    if (!set.stems.emplace(label, p).second) throw Error("duplicate stem label: " + label);
  };
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(p)) {
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (e.is_regular_file() && ext == ".wav") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add(f);
    } else {
      if (!std::filesystem::exists(p)) throw Error("stem file not found: " + p.string());
      add(p);
    }
  }
  if (set.stems.empty()) throw Error("no stems given");
  return set;
}

const PitchTrack* StemResult::track(PitchMethod m) const {
  for (const auto& t : pitch_tracks) {
    if (t.method == m) return &t;
  }
  return nullptr;
}

ModeAnalysis analyze_mode(const PitchTrack& track, std::optional<double> final_hz, const AnalysisConfig& config) {
  ModeAnalysis out;
  out.fold_reference_hz = final_hz.value_or(kA4Hz);
  const auto values = fold_to_pitch_classes(track, out.fold_reference_hz, config.weight_poles_by_salience);
  out.poles = estimate_poles(values, config.poles);

  std::vector<double> voiced;
  for (const auto& f : track.frames) {
    if (f.voiced()) voiced.push_back(f.top_frequency());
  }
  const double centre = median(voiced);
  for (auto& p : out.poles.poles) {
    const double hz = apply_cents(out.fold_reference_hz, p.pole_cents);
    p.pole_hz = hz * std::exp2(std::round(std::log2(centre / hz)));
  }
  ModeParams mp = config.mode;
  if (final_hz && !mp.final_cents) mp.final_cents = 0.0;
  out.mode = infer_mode(out.poles.poles, mp);
  return out;
}

StemResult analyze_signal(const Signal& signal, const AnalysisConfig& config, std::string label) {
  StemResult r;
  r.label = std::move(label);
  r.sample_rate = signal.sample_rate();
  r.duration = signal.duration();

  const auto spec = stft(signal, config.stft);
  r.spectrum_frequencies = spec.bin_frequencies;
  r.spectrum_magnitudes = average_spectrum(spec);

  const auto tracks = track_partials(spec, config.peaks, config.tracks);
  r.partial_tracks = tracks.size();
  const auto snapshots = track_snapshots(tracks, spec.frame_times);

  r.pitch_tracks.push_back(lowest_partial_track(tracks, spec.frame_times));
  r.pitch_tracks.push_back(gcd_track(snapshots, config.gcd));
  r.pitch_tracks.push_back(
      autocorrelation_track(signal, {config.stft.frame_length, config.stft.hop}, config.autocorrelation));
  r.pitch_tracks.push_back(spacing_track(snapshots));
  r.discrepancy = pitch_discrepancy(r.pitch_tracks[0], r.pitch_tracks[2]);

  const LoudnessContour* contour = config.weighting ? &iso226_50phon() : nullptr;
  std::map<int, std::size_t> salient_counts;
  for (const auto& snap : snapshots) {
    if (snap.partials.size() < 2) continue;
    try {
      r.inharmonicity.push_back({snap.time, inharmonicity(snap, config.inharmonicity)});
    } catch (const Error&) {
    }
    try {
      auto sal = detect_salient_partials(snap, contour, config.salience);
      for (int h : sal.salient) ++salient_counts[h];
      r.salience.push_back({snap.time, std::move(sal)});
    } catch (const Error&) {
    }
  }
  for (const auto& [h, n] : salient_counts) {
    if (static_cast<double>(n) >= config.salient_fraction * static_cast<double>(r.salience.size())) {
      r.salient_set.push_back(h);
    }
  }

  const PitchTrack& fold_track = r.pitch_tracks[1];
  r.voiced = fold_track.voiced_count() > 0;
  r.fold_reference_hz = config.final_hz.value_or(kA4Hz);
  r.folded_histogram.assign(static_cast<std::size_t>(1200.0 / kHistogramBin), 0.0);
  if (!r.voiced) {
    r.notes.push_back("unvoiced: no pitch observations");
  } else {
    for (const auto& v : fold_to_pitch_classes(fold_track, r.fold_reference_hz, false)) {
      const auto bin = std::min(r.folded_histogram.size() - 1, static_cast<std::size_t>(v.cents / kHistogramBin));
      r.folded_histogram[bin] += 1.0;
    }
    try {
      auto m = analyze_mode(fold_track, config.final_hz, config);
      r.poles = std::move(m.poles);
      r.mode = std::move(m.mode);
    } catch (const Error& e) {
      r.notes.push_back(std::string("mode: ") + e.what());
    }
    r.tuning = estimate_tuning_offset(fold_track, config.segments);
    if (r.mode) {
      for (const auto& o : r.tuning) {
        if (o.segment.label == "global") r.mode->tuning_offset_cents = o.offset_cents;
      }
    }
  }
  return r;
}

AnalysisReport analyze(const StemSet& stems, AnalysisConfig config) {
  if (stems.final_hz) config.final_hz = stems.final_hz;
  if (stems.segments_file) config.segments = read_segments_csv(*stems.segments_file);

  AnalysisReport report;
  report.config = config;
  std::vector<std::pair<std::string, std::filesystem::path>> items(stems.stems.begin(), stems.stems.end());
  report.stems.resize(items.size());

  auto run = [&](std::size_t i) {
    const auto& [label, path] = items[i];
    StemResult& out = report.stems[i];
    try {
      const std::string sum = file_checksum(path);
      out = analyze_signal(load_wav(path), config, label);
      out.checksum = sum;
    } catch (const std::exception& e) {
      out = StemResult{};
      out.label = label;
      out.error = e.what();
      try {
        out.checksum = file_checksum(path);
      } catch (const std::exception&) {
      }
    }
    out.path = path.filename().string();
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, items.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < items.size(); i += workers) run(i);
    });
  }
  for (auto& t : pool) t.join();
  return report;
}

json to_json(const PoleSet& poles) {
  json arr = json::array();
  for (const auto& p : poles.poles) {
    json hist = json::array();
    for (double v : p.histogram) hist.push_back(num(v));
    arr.push_back({{"pole_cents", num(p.pole_cents)},
                   {"pole_hz", opt_num(p.pole_hz)},
                   {"q_cents", num(p.q_cents)},
                   {"mass", num(p.mass)},
                   {"assigned_weight", num(p.assigned_weight)},
                   {"observations", p.observations},
                   {"histogram_start_cents", -PoleDistribution::kHistogramSpan},
                   {"histogram_weight", hist}});
  }
  return {{"poles", arr}, {"residual_mass", num(poles.residual_mass)}};
}

json to_json(const ModeEstimate& mode) {
  json degrees = json::array();
  for (const auto& d : mode.degrees) {
    degrees.push_back({{"name", d.name},
                       {"cents_from_final", num(d.cents_from_final)},
                       {"offset_cents", num(d.offset_cents)},
                       {"mass", num(d.mass)}});
  }
  json amb = json::array();
  for (const auto& [a, b] : mode.ambiguous) amb.push_back({a, b});
  return {{"final_cents", num(mode.final_cents)},
          {"final_hz", opt_num(mode.final_hz)},
          {"final_note", mode.final_hz ? json(note_name(*mode.final_hz)) : json(nullptr)},
          {"degrees", degrees},
          {"ambiguous", amb},
          {"tuning_offset_cents", opt_num(mode.tuning_offset_cents)}};
}

json to_json(const AnalysisReport& report) {
  json stems = json::array();
  for (const auto& s : report.stems) stems.push_back(stem_json(s));
  json checksums = json::object();
  for (const auto& s : report.stems) checksums[s.path] = s.checksum;
  json errors = json::array();
  for (const auto& s : report.stems) {
    if (s.error) errors.push_back({{"stem", s.label}, {"error", *s.error}});
  }
  return {{"schema_version", kSchemaVersion},
          {"tool", {{"name", "pitchfield"}, {"version", std::string(tool_version())}}},
          {"config", config_to_json(report.config)},
          {"input_checksums", checksums},
          {"errors", errors},
          {"stems", stems}};
}

std::string report_to_string(const AnalysisReport& report) { return to_json(report).dump(2) + "\n"; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::string bytes(std::istreambuf_iterator<char>(in), {});
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
  return os.str();
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "spectrum") return PlotKind::spectrum;
  if (name == "pitch_track") return PlotKind::pitch_track;
  if (name == "histogram") return PlotKind::histogram;
  if (name == "beatmap") return PlotKind::beatmap;
  throw Error("unknown plot kind: " + std::string(name));
}

std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::spectrum: return "spectrum";
    case PlotKind::pitch_track: return "pitch_track";
    case PlotKind::histogram: return "histogram";
    case PlotKind::beatmap: return "beatmap";
  }
  return "spectrum";
}

std::vector<PlotKind> available_plot_kinds(const AnalysisReport& report) {
  const bool any = std::any_of(report.stems.begin(), report.stems.end(), [](const StemResult& s) { return !s.error; });
  if (!any) return {};
  return {PlotKind::spectrum, PlotKind::pitch_track, PlotKind::histogram};
}

void emit_plot_data(const AnalysisReport& report, PlotKind kind, const std::filesystem::path& path,
                    std::string_view stem) {
  const auto kinds = available_plot_kinds(report);
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    std::string list;
    for (auto k : kinds) list += (list.empty() ? "" : ", ") + std::string(to_string(k));
    throw Error("plot kind '" + std::string(to_string(kind)) + "' not in report; available: " +
                (list.empty() ? "none" : list));
  }
  const StemResult& s = select_stem(report, stem);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  switch (kind) {
    case PlotKind::spectrum:
      out << "frequency_hz,magnitude_db\n";
      for (std::size_t i = 0; i < s.spectrum_frequencies.size(); ++i) {
        out << fmt(s.spectrum_frequencies[i], 4) << ','
            << fmt(20.0 * std::log10(std::max(s.spectrum_magnitudes[i], 1e-12)), 4) << '\n';
      }
      break;
    case PlotKind::pitch_track:
      out << "time_s,frequency_hz,salience,method,voiced\n";
      for (const auto& t : s.pitch_tracks) {
        for (const auto& f : t.frames) {
          out << fmt(f.time) << ',' << (f.voiced() ? fmt(f.top_frequency()) : "") << ','
              << (f.voiced() ? fmt(f.candidates.front().salience) : "") << ',' << to_string(t.method) << ','
              << (f.voiced() ? 1 : 0) << '\n';
        }
      }
      break;
    case PlotKind::histogram:
      out << "cents_bin,count\n";
      for (std::size_t i = 0; i < s.folded_histogram.size(); ++i) {
        out << fmt(static_cast<double>(i) * kHistogramBin, 1) << ',' << fmt(s.folded_histogram[i], 0) << '\n';
      }
      break;
    case PlotKind::beatmap:
      break;
  }
  if (!out) throw Error("failed writing " + path.string());
}

void write_beat_map_csv(const BeatMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "interval_semitones";
  for (double f : map.beat_frequencies) out << ',' << fmt(f, 4);
  out << '\n';
  for (std::size_t i = 0; i < map.intervals.size(); ++i) {
    out << fmt(map.intervals[i], 4);
    for (double v : map.matrix[i]) {
      std::ostringstream os;
      os << std::scientific << std::setprecision(6) << v;
      out << ',' << os.str();
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

json beat_map_sidecar(const BeatMap& map) {
  const auto& p = map.params;
  return {{"schema_version", kSchemaVersion},
          {"tool", {{"name", "pitchfield"}, {"version", std::string(tool_version())}}},
          {"stimulus",
           {{"base_f0_hz", p.base_f0},
            {"partials_per_tone", p.partials},
            {"amplitude_rolloff_exponent", p.rolloff},
            {"interval_min_semitones", p.interval_min},
            {"interval_max_semitones", p.interval_max},
            {"interval_step_semitones", p.step},
            {"sample_rate_hz", p.sample_rate},
            {"duration_s", p.duration}}},
          {"analysis",
           {{"rms_frame_samples", p.rms_frame},
            {"rms_hop_samples", p.rms_hop},
            {"max_beat_hz", p.max_beat_hz},
            {"zero_pad", p.zero_pad},
            {"phase_sets", p.phase_sets}}},
          {"seed", p.seed},
          {"combination_tone_transition_hz", 20.0}};
}

std::vector<Segment> read_segments_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open segments file: " + path.string());
  std::vector<Segment> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 2) throw Error("segments line " + std::to_string(lineno) + ": expected start_s,end_s,label");
    if (!is_number(cells[0])) {
      if (lineno == 1 || out.empty()) continue;
      throw Error("segments line " + std::to_string(lineno) + ": start is not a number");
    }
    if (!is_number(cells[1])) throw Error("segments line " + std::to_string(lineno) + ": end is not a number");
    Segment s{std::stod(cells[0]), std::stod(cells[1]), cells.size() > 2 ? cells[2] : "segment" + std::to_string(out.size() + 1)};
    if (!(s.end > s.start)) throw Error("segments line " + std::to_string(lineno) + ": end must exceed start");
    out.push_back(std::move(s));
  }
  return out;
}

void write_pitch_track_csv(const PitchTrack& track, std::ostream& out) {
  out << "time_s,frequency_hz,salience,method,voiced\n";
  for (const auto& f : track.frames) {
    out << fmt(f.time) << ',' << (f.voiced() ? fmt(f.top_frequency()) : "") << ','
        << (f.voiced() ? fmt(f.candidates.front().salience) : "") << ',' << to_string(track.method) << ','
        << (f.voiced() ? 1 : 0) << '\n';
  }
}

PitchTrack read_pitch_track_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pitch track: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty pitch track file: " + path.string());
  const auto header = split_csv_line(trim(line));
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto t_col = column("time_s");
  const auto f_col = column("frequency_hz");
  if (!t_col || !f_col) throw Error("pitch track needs time_s and frequency_hz columns");
  const auto s_col = column("salience");
  const auto m_col = column("method");
  const auto v_col = column("voiced");

  PitchTrack track;
  std::optional<PitchMethod> method;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    auto cell = [&](std::optional<std::size_t> c) -> std::string { return c && *c < cells.size() ? cells[*c] : ""; };
    if (!is_number(cell(t_col))) throw Error("pitch track line " + std::to_string(lineno) + ": bad time");
    if (m_col && !cell(m_col).empty()) {
      const auto m = parse_pitch_method(cell(m_col));
      if (!method) method = m;
      if (*method != m) continue;
    }
    PitchFrame frame;
    frame.time = std::stod(cell(t_col));
    const bool voiced = v_col ? cell(v_col) != "0" : true;
    const std::string f = cell(f_col);
    if (voiced && is_number(f) && std::stod(f) > 0.0) {
      const std::string s = cell(s_col);
      frame.candidates.push_back({std::stod(f), is_number(s) ? std::stod(s) : 1.0});
    }
    track.frames.push_back(std::move(frame));
  }
  track.method = method.value_or(PitchMethod::gcd_f0);
  return track;
}

}  // namespace pitchfield
