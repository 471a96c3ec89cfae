#include "pitchfield/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"

namespace pitchfield {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPeakCeiling = 1.0 - 1e-6;

std::size_t sample_count(double duration, int sample_rate) {
  if (!(duration >= 0.0)) throw Error("duration must be non-negative");
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

double envelope_at(const Envelope& env, double t) {
  return env.kind == Envelope::Kind::exponential ? std::exp(-t / env.time_constant) : 1.0;
}

void check_nyquist(const ComplexToneSpec& spec, int sample_rate, double max_ratio) {
  std::ostringstream bad;
  int count = 0;
  for (std::size_t i = 0; i < spec.partials.size(); ++i) {
    const double f = spec.partial_frequency(spec.partials[i]) * max_ratio;
    if (f >= sample_rate / 2.0) {
      bad << (count++ ? ", " : "") << "#" << i << " (" << f << " Hz)";
    }
  }
  if (count) throw Error("partials at or above Nyquist: " + bad.str());
}

// Unlimited render; `warp` maps sample index to warped time in seconds.
std::vector<double> render(const ComplexToneSpec& spec, int sample_rate, const std::vector<double>* warp) {
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  if (spec.envelope.kind == Envelope::Kind::exponential && !(spec.envelope.time_constant > 0.0)) {
    throw Error("envelope time constant must be positive");
  }
  for (const auto& p : spec.partials) {
    if (!(p.amplitude >= 0.0)) throw Error("partial amplitudes must be non-negative");
  }
  const std::size_t n = sample_count(spec.duration, sample_rate);
  std::vector<double> out(n, 0.0);
  for (const auto& p : spec.partials) {
    if (p.amplitude == 0.0) continue;
    const double f = spec.partial_frequency(p);
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = warp ? (*warp)[i] : static_cast<double>(i) / sample_rate;
      out[i] += p.amplitude * std::sin(kTwoPi * f * tau);
    }
  }
  if (spec.envelope.kind != Envelope::Kind::constant) {
    for (std::size_t i = 0; i < n; ++i) out[i] *= envelope_at(spec.envelope, static_cast<double>(i) / sample_rate);
  }
  return out;
}

}  // namespace

std::vector<double> limit_peak(std::vector<double> samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  if (peak > kPeakCeiling) {
    const double g = kPeakCeiling / peak;
    for (double& v : samples) v = std::clamp(v * g, -kPeakCeiling, kPeakCeiling);
  }
  return samples;
}

ComplexToneSpec ComplexToneSpec::harmonic(double f0, int count, double duration, double amplitude) {
  ComplexToneSpec spec;
  spec.f0 = f0;
  spec.duration = duration;
  for (int h = 1; h <= count; ++h) spec.partials.push_back({static_cast<double>(h), false, amplitude, 0.0});
  return spec;
}

double ComplexToneSpec::partial_frequency(const PartialSpec& p) const {
  const double base = p.exact_frequency ? p.value : p.value * f0;
  return p.cents == 0.0 ? base : apply_cents(base, p.cents);
}

ComplexToneSnapshot ComplexToneSpec::schedule() const {
  ComplexToneSnapshot snap;
  for (const auto& p : partials) {
    if (p.amplitude > 0.0) snap.partials.push_back({partial_frequency(p), p.amplitude});
  }
  std::sort(snap.partials.begin(), snap.partials.end(),
            [](const Partial& a, const Partial& b) { return a.frequency < b.frequency; });
  snap.f0_candidate = f0;
  return snap;
}

Signal synth_complex_tone(const ComplexToneSpec& spec, int sample_rate) {
  if (spec.partials.empty()) throw Error("complex tone needs at least one partial");
  check_nyquist(spec, sample_rate, 1.0);
  return Signal(limit_peak(render(spec, sample_rate, nullptr)), sample_rate);
}

std::array<std::vector<int>, 7> default_808_patterns(int harmonics) {
  std::vector<int> even;
  for (int h = 2; h <= harmonics; h += 2) even.push_back(h);
  return {{{3, 5}, {8, 10}, even, {4, 6}, {5, 7}, {6, 9, 12}, {7, 14}}};
}

double bass808_frequency(const Bass808Patch& patch, double t) {
  return patch.target_f0 *
         std::exp2(patch.glide_depth_cents * std::exp(-t / patch.glide_time_constant) / 1200.0);
}

Signal synth_808(const Bass808Patch& patch, int sample_rate) {
  if (patch.mode < 1 || patch.mode > 7) throw Error("808 mode must be in [1, 7]");
  if (!(patch.decay > 0.0)) throw Error("808 decay must be positive");
  if (!(patch.glide_time_constant > 0.0)) throw Error("808 glide time constant must be positive");
  if (!(patch.target_f0 >= 20.0)) throw Error("808 target f0 must be at least 20 Hz");
  if (patch.harmonics < 1) throw Error("808 needs at least one harmonic");

  const auto patterns = default_808_patterns(patch.harmonics);
  const auto& pattern = patch.custom_pattern.empty() ? patterns[static_cast<std::size_t>(patch.mode - 1)]
                                                     : patch.custom_pattern;
  std::vector<double> gains(static_cast<std::size_t>(patch.harmonics) + 1, 0.0);
  gains[1] = 1.0;
  const double base = std::pow(10.0, patch.base_level_db / 20.0);
  const double boost = std::pow(10.0, patch.amount_db / 20.0);
  for (int h = 2; h <= patch.harmonics; ++h) gains[static_cast<std::size_t>(h)] = base;
  for (int h : pattern) {
    if (h >= 1 && h <= patch.harmonics) gains[static_cast<std::size_t>(h)] *= boost;
  }

  const double start = std::max(bass808_frequency(patch, 0.0), patch.target_f0);
  if (start * patch.harmonics >= sample_rate / 2.0) {
    throw Error("808 glide start puts harmonic " + std::to_string(patch.harmonics) + " at or above Nyquist");
  }

  const std::size_t n = sample_count(patch.duration, sample_rate);
  // Cumulative phase of the fundamental in cycles (trapezoidal integration).
  std::vector<double> cycles(n, 0.0);
  double prev = bass808_frequency(patch, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = bass808_frequency(patch, static_cast<double>(i) / sample_rate);
    cycles[i] = cycles[i - 1] + 0.5 * (prev + cur) / sample_rate;
    prev = cur;
  }
  std::vector<double> out(n, 0.0);
  for (int h = 1; h <= patch.harmonics; ++h) {
    const double g = gains[static_cast<std::size_t>(h)];
    if (g == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += g * std::sin(kTwoPi * h * cycles[i]);
  }
  for (std::size_t i = 0; i < n; ++i) out[i] *= std::exp(-static_cast<double>(i) / sample_rate / patch.decay);
  return Signal(limit_peak(std::move(out)), sample_rate);
}

Signal waveshape(const Signal& signal, const WaveshaperSpec& spec) {
  if (spec.coefficients.size() < 2) throw Error("waveshaper degree must be at least 1");
  if (!(spec.mix >= 0.0 && spec.mix <= 1.0)) throw Error("waveshaper mix must be in [0, 1]");
  std::vector<double> out(signal.size());
  const auto x = signal.samples();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = spec.drive * x[i];
    double y = spec.coefficients.back();
    for (std::size_t k = spec.coefficients.size() - 1; k-- > 0;) y = y * v + spec.coefficients[k];
    out[i] = (1.0 - spec.mix) * x[i] + spec.mix * y;
  }
  return Signal(std::move(out), signal.sample_rate());
}

Signal ring_modulate(const Signal& a, const Signal& b) {
  if (a.sample_rate() != b.sample_rate()) throw Error("ring modulation inputs differ in sample rate");
  if (a.size() != b.size()) throw Error("ring modulation inputs differ in length");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] * b.samples()[i];
  return Signal(std::move(out), a.sample_rate());
}

std::vector<double> unison_detunes(int voices, double spread_cents) {
  if (voices < 1) throw Error("unison needs at least one voice");
  if (voices == 1) return {0.0};
  std::vector<double> out;
  for (int i = 0; i < voices; ++i) {
    out.push_back(-spread_cents / 2.0 + spread_cents * i / (voices - 1));
  }
  return out;
}

Signal unison(const ComplexToneSpec& spec, const UnisonSpec& u, int sample_rate) {
  if (spec.partials.empty()) throw Error("complex tone needs at least one partial");
  const auto detunes = unison_detunes(u.voices, u.spread_cents);
  std::vector<double> sum;
  for (double d : detunes) {
    ComplexToneSpec voice = spec;
    for (auto& p : voice.partials) p.cents += d;
    check_nyquist(voice, sample_rate, 1.0);
    auto rendered = render(voice, sample_rate, nullptr);
    if (sum.empty()) {
      sum = std::move(rendered);
    } else {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += rendered[i];
    }
  }
  if (u.normalize) {
    for (double& v : sum) v /= static_cast<double>(detunes.size());
  }
  return Signal(limit_peak(std::move(sum)), sample_rate);
}

double PitchContour::cents_at(double t) const {
  if (points.empty()) return 0.0;
  if (t <= points.front().first) return points.front().second;
  if (t >= points.back().first) return points.back().second;
  const auto it = std::upper_bound(points.begin(), points.end(), t,
                                   [](double v, const auto& p) { return v < p.first; });
  const auto& [t1, c1] = *it;
  const auto& [t0, c0] = *(it - 1);
  const double u = (t - t0) / (t1 - t0);
  if (kind == Kind::bend) return c0 + (c1 - c0) * u;
  // Screw: fast initial change settling into the target, like a tape slowing.
  constexpr double kRate = 5.0;
  return c0 + (c1 - c0) * (1.0 - std::exp(-kRate * u)) / (1.0 - std::exp(-kRate));
}

Signal glide(const ComplexToneSpec& spec, const PitchContour& contour, int sample_rate) {
  if (spec.partials.empty()) throw Error("complex tone needs at least one partial");
  double max_cents = 0.0;
  bool flat = true;
  for (std::size_t i = 0; i < contour.points.size(); ++i) {
    const auto& [t, c] = contour.points[i];
    if (std::abs(c) > 2400.0) throw Error("pitch contour exceeds +/-2400 cents");
    if (i > 0 && !(t > contour.points[i - 1].first)) throw Error("pitch contour times must increase");
    max_cents = std::max(max_cents, c);
    flat = flat && c == 0.0;
  }
  check_nyquist(spec, sample_rate, std::exp2(max_cents / 1200.0));
  if (flat) return synth_complex_tone(spec, sample_rate);

  const std::size_t n = sample_count(spec.duration, sample_rate);
  std::vector<double> warp(n, 0.0);
  double prev = std::exp2(contour.cents_at(0.0) / 1200.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = std::exp2(contour.cents_at(static_cast<double>(i) / sample_rate) / 1200.0);
    warp[i] = warp[i - 1] + 0.5 * (prev + cur) / sample_rate;
    prev = cur;
  }
  return Signal(limit_peak(render(spec, sample_rate, &warp)), sample_rate);
}

}  // namespace pitchfield
