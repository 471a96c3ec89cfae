#pragma once

#include <filesystem>

#include "json.hpp"

#include "pitchfield/signal.hpp"
#include "pitchfield/synthesis.hpp"

namespace pitchfield {

/// Complex tone from {"f0", "duration", "harmonics" | "partials", "envelope"}.
/// A partial is {"harmonic" | "frequency", "amplitude" | "gain_db", "cents"}.
ComplexToneSpec parse_tone_spec(const nlohmann::json& j);

Bass808Patch parse_808_patch(const nlohmann::json& j);

/// Renders a synthesis document. "type" is one of complex_tone, 808,
/// unison, glide, waveshape, ring; "sample_rate" defaults to 44100.
/// Throws Error on unknown types or malformed fields.
Signal render_synth_spec(const nlohmann::json& j);

nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace pitchfield
