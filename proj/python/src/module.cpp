#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "json.hpp"
#include "pitchfield/beat_map.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/inharmonicity.hpp"
#include "pitchfield/loudness.hpp"
#include "pitchfield/pitch.hpp"
#include "pitchfield/report.hpp"
#include "pitchfield/spec_json.hpp"
#include "pitchfield/spectral.hpp"
#include "pitchfield/synthesis.hpp"
#include "pitchfield/wav.hpp"

namespace py = pybind11;
namespace pf = pitchfield;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

pf::Signal to_signal(const Array& samples, int sample_rate) {
  if (samples.ndim() != 1) throw pf::Error("samples must be one-dimensional");
  const double* data = samples.data();
  return pf::Signal(std::vector<double>(data, data + samples.size()), sample_rate);
}

py::array_t<double> to_array(std::span<const double> v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::tuple render(const std::string& spec_json) {
  const auto s = pf::render_synth_spec(nlohmann::json::parse(spec_json));
  return py::make_tuple(to_array(s.samples()), s.sample_rate());
}

py::dict salient_partials(const Array& samples, int sample_rate, bool weighting) {
  const auto signal = to_signal(samples, sample_rate);
  const auto spec = pf::stft(signal);
  const auto snap = pf::snapshot_at(spec, spec.frames() / 2);
  const auto r = pf::detect_salient_partials(snap, weighting ? &pf::iso226_50phon() : nullptr);
  py::list partials;
  for (const auto& p : r.partials) {
    py::dict d;
    d["harmonic"] = p.harmonic;
    d["frequency"] = p.frequency;
    d["weighted_db"] = p.weighted_db;
    partials.append(d);
  }
  py::dict out;
  out["fundamental_frequency"] = r.fundamental_frequency;
  out["salient"] = std::vector<int>(r.salient.begin(), r.salient.end());
  out["partials"] = partials;
  return out;
}

py::tuple autocorrelation_track(const Array& samples, int sample_rate, std::size_t frame_length, std::size_t hop,
                                double min_hz, double max_hz, double threshold) {
  const auto track =
      pf::autocorrelation_track(to_signal(samples, sample_rate), {frame_length, hop}, {min_hz, max_hz, threshold});
  std::vector<double> times, freqs;
  for (const auto& f : track.frames) {
    times.push_back(f.time);
    freqs.push_back(f.voiced() ? f.top_frequency() : std::numeric_limits<double>::quiet_NaN());
  }
  return py::make_tuple(to_array(times), to_array(freqs));
}

py::dict beat_map(double base_f0, int partials, double interval_min, double interval_max, double step,
                  double rolloff, std::uint64_t seed) {
  pf::BeatMapParams p;
  p.base_f0 = base_f0;
  p.partials = partials;
  p.interval_min = interval_min;
  p.interval_max = interval_max;
  p.step = step;
  p.rolloff = rolloff;
  p.seed = seed;
  const auto map = pf::compute_beat_map(p);
  py::array_t<double> matrix({static_cast<py::ssize_t>(map.intervals.size()), static_cast<py::ssize_t>(map.beat_frequencies.size())});
  auto m = matrix.mutable_unchecked<2>();
  for (std::size_t i = 0; i < map.matrix.size(); ++i) {
    for (std::size_t j = 0; j < map.matrix[i].size(); ++j) {
      m(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = map.matrix[i][j];
    }
  }
  py::list minima;
  for (const auto& mn : pf::find_beat_minima(map)) {
    py::dict d;
    d["interval"] = mn.interval;
    d["label"] = mn.label ? py::cast(*mn.label) : py::none();
    minima.append(d);
  }
  py::dict out;
  out["intervals"] = to_array(map.intervals);
  out["beat_frequencies"] = to_array(map.beat_frequencies);
  out["matrix"] = matrix;
  out["energy"] = to_array(map.energy);
  out["minima"] = minima;
  return out;
}

std::string analyze(const std::vector<std::filesystem::path>& paths, const std::string& config_json) {
  pf::AnalysisConfig config;
  pf::apply_config_json(config, nlohmann::json::parse(config_json));
  return pf::report_to_string(pf::analyze(pf::StemSet::from_paths(paths), config));
}

std::string default_config() { return pf::config_to_json(pf::AnalysisConfig{}).dump(); }

py::tuple load_wav(const std::filesystem::path& path) {
  const auto s = pf::load_wav(path);
  return py::make_tuple(to_array(s.samples()), s.sample_rate());
}

void save_wav(const std::filesystem::path& path, const Array& samples, int sample_rate, const std::string& format) {
  pf::WavFormat f;
  if (format == "float32") {
    f = pf::WavFormat::float32;
  } else if (format == "pcm16") {
    f = pf::WavFormat::pcm16;
  } else if (format == "pcm24") {
    f = pf::WavFormat::pcm24;
  } else {
    throw pf::Error("unknown WAV format: " + format);
  }
  pf::save_wav(path, to_signal(samples, sample_rate), f);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pitch-field analysis and synthesis core";
  py::register_exception<pf::Error>(m, "Error", PyExc_ValueError);
  py::register_exception<nlohmann::json::exception>(m, "JsonError", PyExc_ValueError);

  m.attr("__version__") = std::string(pf::tool_version());
  m.def("render", &render, py::arg("spec_json"));
  m.def("salient_partials", &salient_partials, py::arg("samples"), py::arg("sample_rate"), py::arg("weighting"));
  m.def("autocorrelation_track", &autocorrelation_track, py::arg("samples"), py::arg("sample_rate"),
        py::arg("frame_length"), py::arg("hop"), py::arg("min_hz"), py::arg("max_hz"), py::arg("threshold"));
  m.def("beat_map", &beat_map, py::arg("base_f0"), py::arg("partials"), py::arg("interval_min"),
        py::arg("interval_max"), py::arg("step"), py::arg("rolloff"), py::arg("seed"));
  m.def("analyze", &analyze, py::arg("paths"), py::arg("config_json"));
  m.def("default_config", &default_config);
  m.def("load_wav", &load_wav, py::arg("path"));
  m.def("save_wav", &save_wav, py::arg("path"), py::arg("samples"), py::arg("sample_rate"), py::arg("format"));
}
