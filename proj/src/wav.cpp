#include "pitchfield/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include "pitchfield/error.hpp"

namespace pitchfield {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::string codec_name(std::uint16_t tag) {
  switch (tag) {
    case 2: return "Microsoft ADPCM";
    case 6: return "A-law";
    case 7: return "mu-law";
    case 0x11: return "IMA ADPCM";
    case 0x55: return "MPEG Layer 3";
    default: return "unknown";
  }
}

class Reader {
 public:
  explicit Reader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  bool at_end() const { return pos_ >= bytes_.size(); }

  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw Error("truncated WAV file at byte offset " + std::to_string(bytes_.size()) + " (needed " +
                  std::to_string(pos_ + n) + ")");
    }
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) | (bytes_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string s(reinterpret_cast<const char*>(&bytes_[pos_]), 4);
    pos_ += 4;
    return s;
  }
  void skip(std::size_t n) {
    need(n);
    pos_ += n;
  }
  const unsigned char* data() const { return &bytes_[pos_]; }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

WavFormat parse_wav_format(std::string_view name) {
  if (name == "pcm16") return WavFormat::pcm16;
  if (name == "pcm24") return WavFormat::pcm24;
  if (name == "float32") return WavFormat::float32;
  throw Error("unknown WAV format: " + std::string(name));
}

std::string_view to_string(WavFormat f) {
  switch (f) {
    case WavFormat::pcm16: return "pcm16";
    case WavFormat::pcm24: return "pcm24";
    case WavFormat::float32: return "float32";
  }
  return "float32";
}

Signal load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file: " + path.string());
  Reader r(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));

  if (r.tag() != "RIFF") throw Error("not a RIFF file: " + path.string());
  r.u32();
  if (r.tag() != "WAVE") throw Error("not a WAVE file: " + path.string());

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  while (true) {
    if (r.at_end()) throw Error("WAV file has no data chunk: " + path.string());
    const std::string id = r.tag();
    const std::uint32_t len = r.u32();
    if (id == "fmt ") {
      const std::size_t start = r.offset();
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      if (format == kFormatExtensible && len >= 40) {
        r.u16();
        r.u16();
        r.u32();
        format = r.u16();  // first two bytes of the sub-format GUID
      }
      r.skip(len - (r.offset() - start) + (len & 1));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw Error("WAV data chunk precedes fmt chunk");
      const bool pcm = format == kFormatPcm && (bits == 16 || bits == 24);
      const bool flt = format == kFormatFloat && bits == 32;
      if (!pcm && !flt) {
        std::ostringstream msg;
        if (format == kFormatPcm || format == kFormatFloat) {
          msg << "unsupported WAV codec: " << (format == kFormatPcm ? "PCM " : "IEEE float ") << bits << "-bit";
        } else {
          msg << "unsupported WAV codec: format tag 0x" << std::hex << format << " (" << codec_name(format) << ")";
        }
        throw Error(msg.str());
      }
      if (channels == 0) throw Error("WAV file declares zero channels");
      if (rate == 0) throw Error("WAV file declares zero sample rate");
      const std::size_t width = bits / 8u;
      const std::size_t frame_bytes = width * channels;
      if (len % frame_bytes != 0) {
        throw Error("truncated WAV file at byte offset " + std::to_string(r.offset() + len - len % frame_bytes));
      }
      r.need(len);
      const std::size_t frames = len / frame_bytes;
      const unsigned char* p = r.data();
      std::vector<double> out(frames, 0.0);
      for (std::size_t i = 0; i < frames; ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          const unsigned char* s = p + (i * channels + c) * width;
          if (flt) {
            std::uint32_t u = s[0] | (s[1] << 8) | (s[2] << 16) | (static_cast<std::uint32_t>(s[3]) << 24);
            float f;
            std::memcpy(&f, &u, sizeof f);
            sum += f;
          } else if (bits == 16) {
            sum += static_cast<std::int16_t>(s[0] | (s[1] << 8)) / 32768.0;
          } else {
            std::int32_t v = s[0] | (s[1] << 8) | (s[2] << 16);
            if (v & 0x800000) v -= 0x1000000;
            sum += v / 8388608.0;
          }
        }
        out[i] = channels == 1 ? sum : sum / channels;
      }
      return Signal(std::move(out), static_cast<int>(rate));
    } else {
      r.skip(len + (len & 1));
    }
  }
}

void save_wav(const std::filesystem::path& path, const Signal& signal, WavFormat format) {
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : format == WavFormat::pcm24 ? 24 : 32;
  const std::uint16_t tag = format == WavFormat::float32 ? kFormatFloat : kFormatPcm;
  const std::uint32_t width = bits / 8u;
  const auto data_len = static_cast<std::uint32_t>(signal.size() * width);
  const auto rate = static_cast<std::uint32_t>(signal.sample_rate());

  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_len);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, tag);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * width);
  put_u16(out, static_cast<std::uint16_t>(width));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_len);
  for (double x : signal.samples()) {
    if (format == WavFormat::float32) {
      const auto f = static_cast<float>(x);
      std::uint32_t u;
      std::memcpy(&u, &f, sizeof u);
      put_u32(out, u);
    } else {
      const double scale = format == WavFormat::pcm16 ? 32768.0 : 8388608.0;
      const double v = std::clamp(std::round(x * scale), -scale, scale - 1.0);
      const auto i = static_cast<std::int32_t>(v);
      out.push_back(static_cast<unsigned char>(i & 0xFF));
      out.push_back(static_cast<unsigned char>((i >> 8) & 0xFF));
      if (format == WavFormat::pcm24) out.push_back(static_cast<unsigned char>((i >> 16) & 0xFF));
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write WAV file: " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error("failed writing WAV file: " + path.string());
}

}  // namespace pitchfield
