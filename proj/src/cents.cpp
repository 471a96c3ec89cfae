#include "pitchfield/cents.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

#include "pitchfield/error.hpp"

namespace pitchfield {
namespace {

constexpr std::array<const char*, 12> kDegreeNames = {"C",  "Db", "D",  "Eb", "E",  "F",
                                                      "F#", "G",  "Ab", "A",  "Bb", "B"};
constexpr std::array<char, 12> kDegreeLetters = {'C', 'D', 'D', 'E', 'E', 'F',
                                                 'F', 'G', 'A', 'A', 'B', 'B'};
constexpr std::array<const char*, 12> kNoteNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                    "F#", "G",  "G#", "A",  "A#", "B"};

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

int chromatic_index(double cents_from_final) {
  return static_cast<int>(std::lround(wrap_cents(cents_from_final) / 100.0)) % 12;
}

}  // namespace

double parse_note_or_hz(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw Error("empty note or frequency");

  std::string_view num = s;
  if (num.size() > 2 && (num.ends_with("Hz") || num.ends_with("hz"))) num.remove_suffix(2);
  if (auto hz = parse_double(num)) {
    if (!(*hz > 0.0)) throw Error("frequency must be positive: " + std::string(text));
    return *hz;
  }

  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  static constexpr std::array<int, 7> kLetterPc = {9, 11, 0, 2, 4, 5, 7};  // A..G
  if (letter < 'A' || letter > 'G') throw Error("cannot parse note: " + std::string(text));
  int pc = kLetterPc[static_cast<std::size_t>(letter - 'A')];
  std::size_t pos = 1;
  while (pos < s.size() && (s[pos] == '#' || s[pos] == 'b')) {
    pc += s[pos] == '#' ? 1 : -1;
    ++pos;
  }
  std::size_t oct_end = pos;
  if (oct_end < s.size() && s[oct_end] == '-') ++oct_end;  // negative octave
  while (oct_end < s.size() && std::isdigit(static_cast<unsigned char>(s[oct_end]))) ++oct_end;
  if (oct_end == pos || (oct_end == pos + 1 && s[pos] == '-')) {
    throw Error("note is missing an octave: " + std::string(text));
  }
  int octave = 0;
  std::from_chars(s.data() + pos, s.data() + oct_end, octave);

  double offset = 0.0;
  std::string_view rest = s.substr(oct_end);
  if (!rest.empty()) {
    if (rest.back() == 'c') rest.remove_suffix(1);
    if (rest.empty() || (rest.front() != '+' && rest.front() != '-')) {
      throw Error("cannot parse cent offset in note: " + std::string(text));
    }
    const bool negative = rest.front() == '-';
    auto v = parse_double(rest.substr(1));
    if (!v) throw Error("cannot parse cent offset in note: " + std::string(text));
    offset = negative ? -*v : *v;
  }
  const int midi = 12 * (octave + 1) + pc;
  return kA4Hz * std::exp2((midi - 69) / 12.0 + offset / 1200.0);
}

std::string degree_name(double cents_from_final) {
  return kDegreeNames[static_cast<std::size_t>(chromatic_index(cents_from_final))];
}

char degree_letter(double cents_from_final) {
  return kDegreeLetters[static_cast<std::size_t>(chromatic_index(cents_from_final))];
}

std::string note_name(double hz) {
  const double midi = 69.0 + cents(hz, kA4Hz) / 100.0;
  const long nearest = std::lround(midi);
  const long offset = std::lround((midi - static_cast<double>(nearest)) * 100.0);
  const long pc = ((nearest % 12) + 12) % 12;
  const long octave = (nearest - pc) / 12 - 1;
  std::string out = kNoteNames[static_cast<std::size_t>(pc)] + std::to_string(octave);
  if (offset != 0) {
    out += (offset > 0 ? "+" : "") + std::to_string(offset) + "c";
  }
  return out;
}

}  // namespace pitchfield
