#pragma once

#include <filesystem>
#include <string_view>

#include "pitchfield/signal.hpp"

namespace pitchfield {

enum class WavFormat { pcm16, pcm24, float32 };

WavFormat parse_wav_format(std::string_view name);
std::string_view to_string(WavFormat f);

/// Reads RIFF PCM 16/24-bit or IEEE float32. Integer samples are divided by
/// 2^(bits-1); channels are averaged to mono.
/// Throws Error naming an unsupported codec or the byte offset of truncation.
Signal load_wav(const std::filesystem::path& path);

/// Writes mono. Integer formats clip to [-1, 1) and round.
void save_wav(const std::filesystem::path& path, const Signal& signal, WavFormat format = WavFormat::float32);

}  // namespace pitchfield
