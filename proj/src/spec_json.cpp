#include "pitchfield/spec_json.hpp"

#include <cmath>
#include <fstream>

#include "pitchfield/error.hpp"

namespace pitchfield {
namespace {

using nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("invalid field '") + key + "': " + e.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing field '") + key + "'");
  return j.at(key);
}

PitchContour parse_contour_spec(const json& j) {
  PitchContour c;
  const auto kind = get_or<std::string>(j, "kind", "bend");
  if (kind == "bend") {
    c.kind = PitchContour::Kind::bend;
  } else if (kind == "screw") {
    c.kind = PitchContour::Kind::screw;
  } else {
    throw Error("unknown contour kind: " + kind);
  }
  for (const auto& p : require(j, "points")) {
    if (!p.is_array() || p.size() != 2) throw Error("contour points are [time_s, cents] pairs");
    c.points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return c;
}

}  // namespace

ComplexToneSpec parse_tone_spec(const json& j) {
  if (!j.is_object()) throw Error("tone spec must be an object");
  ComplexToneSpec spec;
  spec.f0 = get_or(j, "f0", spec.f0);
  spec.duration = get_or(j, "duration", spec.duration);
  if (j.contains("harmonics")) {
    spec = ComplexToneSpec::harmonic(spec.f0, j.at("harmonics").get<int>(), spec.duration,
                                     get_or(j, "amplitude", 1.0));
  }
  if (j.contains("partials")) {
    for (const auto& p : j.at("partials")) {
      PartialSpec ps;
      if (p.contains("frequency")) {
        ps.value = p.at("frequency").get<double>();
        ps.exact_frequency = true;
      } else {
        ps.value = require(p, "harmonic").get<double>();
      }
      ps.amplitude = p.contains("gain_db") ? std::pow(10.0, p.at("gain_db").get<double>() / 20.0)
                                           : get_or(p, "amplitude", 1.0);
      ps.cents = get_or(p, "cents", 0.0);
      spec.partials.push_back(ps);
    }
  }
  if (j.contains("boost")) {
    const auto& b = j.at("boost");
    const double gain = std::pow(10.0, get_or(b, "db", 20.0) / 20.0);
    for (int h : require(b, "harmonics")) {
      for (auto& p : spec.partials) {
        if (!p.exact_frequency && p.value == h) p.amplitude *= gain;
      }
    }
  }
  if (j.contains("envelope")) {
    const auto& e = j.at("envelope");
    const auto kind = get_or<std::string>(e, "kind", "constant");
    if (kind == "constant") {
      spec.envelope.kind = Envelope::Kind::constant;
    } else if (kind == "exponential") {
      spec.envelope.kind = Envelope::Kind::exponential;
      spec.envelope.time_constant = get_or(e, "time_constant", 1.0);
    } else {
      throw Error("unknown envelope kind: " + kind);
    }
  }
  return spec;
}

Bass808Patch parse_808_patch(const json& j) {
  Bass808Patch p;
  p.target_f0 = get_or(j, "target_f0", p.target_f0);
  p.mode = get_or(j, "mode", p.mode);
  p.amount_db = get_or(j, "amount_db", p.amount_db);
  p.glide_depth_cents = get_or(j, "glide_depth_cents", p.glide_depth_cents);
  p.glide_time_constant = get_or(j, "glide_time_constant", p.glide_time_constant);
  p.decay = get_or(j, "decay", p.decay);
  p.duration = get_or(j, "duration", p.duration);
  p.harmonics = get_or(j, "harmonics", p.harmonics);
  p.base_level_db = get_or(j, "base_level_db", p.base_level_db);
  p.custom_pattern = get_or(j, "pattern", p.custom_pattern);
  return p;
}

Signal render_synth_spec(const json& j) {
  if (!j.is_object()) throw Error("synth spec must be an object");
  const auto type = require(j, "type").get<std::string>();
  const int rate = get_or(j, "sample_rate", 44100);
  if (type == "complex_tone") return synth_complex_tone(parse_tone_spec(j), rate);
  if (type == "808") return synth_808(parse_808_patch(j), rate);
  if (type == "unison") {
    UnisonSpec u;
    u.voices = get_or(j, "voices", u.voices);
    u.spread_cents = get_or(j, "spread_cents", u.spread_cents);
    u.normalize = get_or(j, "normalize", u.normalize);
    return unison(parse_tone_spec(require(j, "tone")), u, rate);
  }
  if (type == "glide") {
    return glide(parse_tone_spec(require(j, "tone")), parse_contour_spec(require(j, "contour")), rate);
  }
  if (type == "waveshape") {
    json input = require(j, "input");
    if (!input.contains("sample_rate")) input["sample_rate"] = rate;
    WaveshaperSpec w;
    w.coefficients = get_or(j, "coefficients", w.coefficients);
    w.drive = get_or(j, "drive", w.drive);
    w.mix = get_or(j, "mix", w.mix);
    return waveshape(render_synth_spec(input), w);
  }
  if (type == "ring") {
    json a = require(j, "a");
    json b = require(j, "b");
    if (!a.contains("sample_rate")) a["sample_rate"] = rate;
    if (!b.contains("sample_rate")) b["sample_rate"] = rate;
    return ring_modulate(render_synth_spec(a), render_synth_spec(b));
  }
  throw Error("unknown synth type: " + type);
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace pitchfield
