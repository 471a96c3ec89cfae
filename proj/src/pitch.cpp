#include "pitchfield/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"

namespace pitchfield {

std::string_view to_string(PitchMethod m) {
  switch (m) {
    case PitchMethod::lowest_partial: return "lowest_partial";
    case PitchMethod::gcd_f0: return "gcd_f0";
    case PitchMethod::autocorrelation: return "autocorrelation";
    case PitchMethod::partial_spacing: return "partial_spacing";
  }
  return "unknown";
}

PitchMethod parse_pitch_method(std::string_view name) {
  for (auto m : {PitchMethod::lowest_partial, PitchMethod::gcd_f0, PitchMethod::autocorrelation,
                 PitchMethod::partial_spacing}) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown pitch method: " + std::string(name));
}

std::size_t PitchTrack::voiced_count() const {
  return static_cast<std::size_t>(
      std::count_if(frames.begin(), frames.end(), [](const PitchFrame& f) { return f.voiced(); }));
}

std::vector<int> assign_harmonics(const ComplexToneSnapshot& snapshot, double f0) {
  std::vector<int> out;
  out.reserve(snapshot.partials.size());
  for (const auto& p : snapshot.partials) {
    out.push_back(std::max(1, static_cast<int>(std::lround(p.frequency / f0))));
  }
  return out;
}

namespace {

// Least-squares fundamental (in log frequency) for fixed harmonic numbers.
double fit_fundamental(const ComplexToneSnapshot& snapshot, const std::vector<int>& harmonics) {
  double acc = 0.0;
  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    acc += std::log2(snapshot.partials[i].frequency / harmonics[i]);
  }
  return std::exp2(acc / static_cast<double>(harmonics.size()));
}

double max_abs_deviation(const ComplexToneSnapshot& snapshot, const std::vector<int>& harmonics,
                         double f0) {
  double worst = 0.0;
  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    worst = std::max(worst, std::abs(cents(snapshot.partials[i].frequency, harmonics[i] * f0)));
  }
  return worst;
}

}  // namespace

std::optional<double> f0_gcd(const ComplexToneSnapshot& snapshot, const GcdParams& params) {
  if (snapshot.partials.empty()) return std::nullopt;
  std::vector<double> candidates;
  for (const auto& p : snapshot.partials) {
    for (int n = 1; p.frequency / n >= params.min_f0 * std::exp2(-params.tolerance_cents / 1200.0);
         ++n) {
      candidates.push_back(p.frequency / n);
    }
  }
  std::sort(candidates.begin(), candidates.end(), std::greater<>());

  // A feasible refined f0 is within tolerance of some candidate, so once the
  // candidates fall far enough below the best found nothing larger can appear.
  const double slack = std::exp2(2.0 * params.tolerance_cents / 1200.0);
  std::optional<double> best;
  for (double c : candidates) {
    if (best && c * slack < *best) break;
    auto harmonics = assign_harmonics(snapshot, c);
    double f = fit_fundamental(snapshot, harmonics);
    const auto reassigned = assign_harmonics(snapshot, f);
    if (reassigned != harmonics) {
      harmonics = reassigned;
      f = fit_fundamental(snapshot, harmonics);
    }
    if (f < params.min_f0) continue;
    if (max_abs_deviation(snapshot, harmonics, f) > params.tolerance_cents) continue;
    if (!best || f > *best) best = f;
  }
  return best;
}

PitchFrame autocorrelation_pitch(std::span<const double> frame, int sample_rate,
                                 const AutocorrelationParams& params) {
  if (!(params.min_hz > 0.0) || !(params.max_hz > params.min_hz)) {
    throw Error("invalid autocorrelation search range");
  }
  const double needed = 2.0 * sample_rate / params.min_hz;
  if (static_cast<double>(frame.size()) < needed) throw Error("frame shorter than 2/min_freq");

  const std::size_t n = frame.size();
  const std::size_t lag_min =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sample_rate / params.max_hz)));
  const std::size_t lag_max = static_cast<std::size_t>(std::ceil(sample_rate / params.min_hz));
  const auto r = detail::autocorrelation(frame, lag_max + 1);

  PitchFrame out;
  if (!(r[0] > 0.0)) return out;
  auto normalized = [&](std::size_t lag) { return r[lag] / r[0]; };

  // Lag refinement uses the windowed estimate r_xw / r_w, which is free of
  // the frame-edge terms that bias a parabola on the raw autocorrelation.
  const auto window = make_window(Window::hann, n);
  std::vector<double> xw(n);
  for (std::size_t i = 0; i < n; ++i) xw[i] = frame[i] * window[i];
  const auto rxw = detail::autocorrelation(xw, lag_max + 3);
  const auto rw = detail::autocorrelation(window, lag_max + 3);
  auto ratio = [&](std::size_t lag) { return rw[lag] > 0.0 ? rxw[lag] / rw[lag] : 0.0; };

  for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
    const double h = normalized(lag);
    if (h < params.threshold) continue;
    if (!(h > normalized(lag - 1) && h >= normalized(lag + 1))) continue;
    std::size_t top = lag;
    for (std::size_t l = lag - 1; l <= lag + 1; ++l) {
      if (ratio(l) > ratio(top)) top = l;
    }
    const double a = ratio(top - 1), b = ratio(top), c = ratio(top + 1);
    const double denom = a - 2.0 * b + c;
    double shift = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    const double period = static_cast<double>(top) + shift;
    out.candidates.push_back({sample_rate / period, std::min(h, 1.0)});
  }
  std::stable_sort(out.candidates.begin(), out.candidates.end(),
                   [](const PitchCandidate& x, const PitchCandidate& y) { return x.salience > y.salience; });
  return out;
}

std::optional<double> partial_spacing_pitch(const ComplexToneSnapshot& snapshot) {
  if (snapshot.partials.size() < 2) return std::nullopt;
  std::vector<double> diffs;
  for (std::size_t i = 1; i < snapshot.partials.size(); ++i) {
    diffs.push_back(snapshot.partials[i].frequency - snapshot.partials[i - 1].frequency);
  }
  std::sort(diffs.begin(), diffs.end());
  const std::size_t m = diffs.size() / 2;
  return diffs.size() % 2 == 1 ? diffs[m] : 0.5 * (diffs[m - 1] + diffs[m]);
}

PitchTrack autocorrelation_track(const Signal& signal, const AnalysisFraming& framing,
                                 const AutocorrelationParams& params) {
  const FrameSequence frames(signal, framing.frame_length, framing.hop, Window::rectangular);
  PitchTrack track;
  track.method = PitchMethod::autocorrelation;
  track.frames.reserve(frames.count());
  for (std::size_t i = 0; i < frames.count(); ++i) {
    auto pf = autocorrelation_pitch(frames.frame(i), signal.sample_rate(), params);
    pf.time = frames.centre_time(i);
    track.frames.push_back(std::move(pf));
  }
  return track;
}

PitchTrack lowest_partial_track(std::span<const PartialTrack> tracks,
                                std::span<const double> frame_times) {
  PitchTrack track;
  track.method = PitchMethod::lowest_partial;
  track.frames.resize(frame_times.size());
  std::vector<double> lowest(frame_times.size(), 0.0), lowest_mag(frame_times.size(), 0.0),
      loudest(frame_times.size(), 0.0);
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      if (p.frame >= frame_times.size()) continue;
      if (lowest[p.frame] == 0.0 || p.frequency < lowest[p.frame]) {
        lowest[p.frame] = p.frequency;
        lowest_mag[p.frame] = p.magnitude;
      }
      loudest[p.frame] = std::max(loudest[p.frame], p.magnitude);
    }
  }
  for (std::size_t f = 0; f < frame_times.size(); ++f) {
    track.frames[f].time = frame_times[f];
    if (lowest[f] > 0.0) {
      track.frames[f].candidates.push_back({lowest[f], std::clamp(lowest_mag[f] / loudest[f], 0.0, 1.0)});
    }
  }
  return track;
}

std::vector<ComplexToneSnapshot> track_snapshots(std::span<const PartialTrack> tracks,
                                                 std::span<const double> frame_times) {
  std::vector<ComplexToneSnapshot> out(frame_times.size());
  for (std::size_t f = 0; f < frame_times.size(); ++f) out[f].time = frame_times[f];
  for (const auto& t : tracks) {
    for (const auto& p : t.points) {
      if (p.frame < out.size()) out[p.frame].partials.push_back({p.frequency, p.magnitude});
    }
  }
  for (auto& s : out) {
    std::sort(s.partials.begin(), s.partials.end(),
              [](const Partial& a, const Partial& b) { return a.frequency < b.frequency; });
  }
  return out;
}

PitchTrack gcd_track(std::span<const ComplexToneSnapshot> snapshots, const GcdParams& params) {
  PitchTrack track;
  track.method = PitchMethod::gcd_f0;
  for (const auto& s : snapshots) {
    PitchFrame pf;
    pf.time = s.time;
    if (auto f = f0_gcd(s, params)) pf.candidates.push_back({*f, 1.0});
    track.frames.push_back(std::move(pf));
  }
  return track;
}

PitchTrack spacing_track(std::span<const ComplexToneSnapshot> snapshots) {
  PitchTrack track;
  track.method = PitchMethod::partial_spacing;
  for (const auto& s : snapshots) {
    PitchFrame pf;
    pf.time = s.time;
    if (auto f = partial_spacing_pitch(s); f && *f > 0.0) pf.candidates.push_back({*f, 1.0});
    track.frames.push_back(std::move(pf));
  }
  return track;
}

std::vector<std::pair<double, double>> pitch_discrepancy(const PitchTrack& a, const PitchTrack& b) {
  if (a.frames.size() != b.frames.size()) throw Error("pitch tracks use different frame grids");
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    if (std::abs(a.frames[i].time - b.frames[i].time) > 1e-9) {
      throw Error("pitch tracks use different frame grids");
    }
    if (!a.frames[i].voiced() || !b.frames[i].voiced()) continue;
    out.emplace_back(a.frames[i].time, cents(a.frames[i].top_frequency(), b.frames[i].top_frequency()));
  }
  return out;
}

}  // namespace pitchfield
