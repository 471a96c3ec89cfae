#include "pitchfield/loudness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pitchfield/error.hpp"

namespace pitchfield {

namespace detail {
std::string_view iso226_50phon_table();
}

LoudnessContour::LoudnessContour(std::vector<ContourPoint> anchors, double phon_level)
    : anchors_(std::move(anchors)), phon_level_(phon_level) {
  if (anchors_.size() < 2) throw Error("degenerate contour");
  for (std::size_t i = 0; i < anchors_.size(); ++i) {
    if (!(anchors_[i].frequency_hz > 0.0) || !std::isfinite(anchors_[i].level_db)) {
      throw Error("contour anchors must have positive frequency and finite level");
    }
    if (i > 0 && !(anchors_[i].frequency_hz > anchors_[i - 1].frequency_hz)) {
      throw Error("contour frequencies must be strictly increasing");
    }
  }

  // Fritsch-Carlson monotone slopes on (log10 f, dB).
  const std::size_t n = anchors_.size();
  log_f_.resize(n);
  for (std::size_t i = 0; i < n; ++i) log_f_[i] = std::log10(anchors_[i].frequency_hz);
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (anchors_[i + 1].level_db - anchors_[i].level_db) / (log_f_[i + 1] - log_f_[i]);
  }
  slopes_.assign(n, 0.0);
  slopes_[0] = secant[0];
  slopes_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      // Weighted harmonic mean keeps each segment monotone.
      const double h0 = log_f_[i] - log_f_[i - 1];
      const double h1 = log_f_[i + 1] - log_f_[i];
      const double w1 = 2.0 * h1 + h0;
      const double w2 = h1 + 2.0 * h0;
      slopes_[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      slopes_[i] = slopes_[i + 1] = 0.0;
      continue;
    }
    const double a = slopes_[i] / secant[i];
    const double b = slopes_[i + 1] / secant[i];
    const double r = a * a + b * b;
    if (r > 9.0) {
      const double t = 3.0 / std::sqrt(r);
      slopes_[i] = t * a * secant[i];
      slopes_[i + 1] = t * b * secant[i];
    }
  }
  reference_db_ = level_db(1000.0);
}

double LoudnessContour::level_db(double frequency_hz) const {
  if (!(frequency_hz > anchors_.front().frequency_hz)) return anchors_.front().level_db;
  if (frequency_hz >= anchors_.back().frequency_hz) return anchors_.back().level_db;
  const double x = std::log10(frequency_hz);
  const auto it = std::upper_bound(log_f_.begin(), log_f_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - log_f_.begin()) - 1;
  if (anchors_[i].frequency_hz == frequency_hz) return anchors_[i].level_db;
  const double h = log_f_[i + 1] - log_f_[i];
  const double t = (x - log_f_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * anchors_[i].level_db + h10 * h * slopes_[i] + h01 * anchors_[i + 1].level_db +
         h11 * h * slopes_[i + 1];
}

double LoudnessContour::gain_db(double frequency_hz) const {
  return reference_db_ - level_db(frequency_hz);
}

double LoudnessContour::gain(double frequency_hz) const {
  return std::pow(10.0, gain_db(frequency_hz) / 20.0);
}

LoudnessContour parse_contour(std::istream& in, double phon_level) {
  std::vector<ContourPoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    ContourPoint p{};
    if (!(row >> p.frequency_hz >> p.level_db)) {
      throw Error("malformed contour row at line " + std::to_string(line_no));
    }
    points.push_back(p);
  }
  return LoudnessContour(std::move(points), phon_level);
}

LoudnessContour load_contour(const std::string& path, double phon_level) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open contour file: " + path);
  return parse_contour(in, phon_level);
}

const LoudnessContour& iso226_50phon() {
  static const LoudnessContour contour = [] {
    std::istringstream in{std::string(detail::iso226_50phon_table())};
    return parse_contour(in, 50.0);
  }();
  return contour;
}

std::vector<double> weight_spectrum(std::span<const double> magnitudes,
                                    std::span<const double> bin_frequencies,
                                    const LoudnessContour& contour) {
  if (magnitudes.size() != bin_frequencies.size()) {
    throw Error("spectrum and frequency axis differ in length");
  }
  std::vector<double> out(magnitudes.size());
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    out[i] = magnitudes[i] * contour.gain(bin_frequencies[i]);
  }
  return out;
}

}  // namespace pitchfield
