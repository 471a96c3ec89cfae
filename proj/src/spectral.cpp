#include "pitchfield/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"

namespace pitchfield {

Spectrogram stft(const Signal& signal, const StftParams& params, const LoudnessContour* weighting) {
  if (params.zero_pad == 0) throw Error("zero_pad must be at least 1");
  const FrameSequence frames(signal, params.frame_length, params.hop, params.window);
  Spectrogram out;
  out.frame_length = params.frame_length;
  out.fft_size = params.frame_length * params.zero_pad;
  out.window = params.window;
  out.sample_rate = signal.sample_rate();
  out.weighted = weighting != nullptr;

  const auto window = make_window(params.window, params.frame_length);
  out.magnitude_scale = 2.0 / std::accumulate(window.begin(), window.end(), 0.0);

  detail::RealFft fft(out.fft_size);
  const std::size_t bins = fft.bins();
  out.bin_frequencies.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.bin_frequencies[k] = static_cast<double>(k) * signal.sample_rate() / static_cast<double>(out.fft_size);
  }
  std::vector<double> gains;
  if (weighting) {
    gains.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) gains[k] = weighting->gain(out.bin_frequencies[k]);
  }

  out.magnitudes.resize(frames.count() * bins);
  out.frame_times.resize(frames.count());
  for (std::size_t i = 0; i < frames.count(); ++i) {
    out.frame_times[i] = frames.centre_time(i);
    const auto spectrum = fft.forward(frames.windowed(i));
    double* row = out.magnitudes.data() + i * bins;
    for (std::size_t k = 0; k < bins; ++k) {
      row[k] = std::abs(spectrum[k]) * out.magnitude_scale;
      if (weighting) row[k] *= gains[k];
    }
  }
  return out;
}

std::vector<double> average_spectrum(const Spectrogram& spectrogram) {
  std::vector<double> out(spectrogram.bins(), 0.0);
  if (spectrogram.frames() == 0) return out;
  for (std::size_t i = 0; i < spectrogram.frames(); ++i) {
    const auto row = spectrogram.frame(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k];
  }
  for (double& v : out) v /= static_cast<double>(spectrogram.frames());
  return out;
}

namespace {

double to_db(double m) {
  return 20.0 * std::log10(std::max(m, std::numeric_limits<double>::min()));
}

}  // namespace

constexpr double kMaxScallopingDb = 3.92;

ComplexToneSnapshot pick_peaks(std::span<const double> magnitudes,
                               std::span<const double> bin_frequencies, const PeakParams& params) {
  if (magnitudes.size() != bin_frequencies.size()) {
    throw Error("spectrum and frequency axis differ in length");
  }
  ComplexToneSnapshot snap;
  const std::size_t n = magnitudes.size();
  if (n < 3) return snap;
  const double max_mag = *std::max_element(magnitudes.begin(), magnitudes.end());
  if (!(max_mag > 0.0)) return snap;

  std::vector<double> db(n);
  for (std::size_t k = 0; k < n; ++k) db[k] = to_db(magnitudes[k]);
  const double floor_db = to_db(max_mag) + params.threshold_db;

  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (!(magnitudes[k] > magnitudes[k - 1] && magnitudes[k] >= magnitudes[k + 1])) continue;
    if (db[k] < floor_db) continue;

    // Topographic prominence: deepest valley before reaching higher ground.
    double left_min = db[k];
    std::size_t j = k;
    while (j > 0) {
      --j;
      if (db[j] > db[k]) break;
      left_min = std::min(left_min, db[j]);
    }
    double right_min = db[k];
    for (j = k + 1; j < n; ++j) {
      if (db[j] > db[k]) break;
      right_min = std::min(right_min, db[j]);
    }
    if (db[k] - std::max(left_min, right_min) < params.min_prominence_db) continue;

    const double a = db[k - 1], b = db[k], c = db[k + 1];
    const double denom = a - 2.0 * b + c;
    double p = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    p = std::clamp(p, -0.5, 0.5);
    // A three-point correction never exceeds the rectangular window's
    // scalloping loss; larger values come from a neighbour at a spectral zero.
    const double peak_db = std::min(b - 0.25 * (a - c) * p, b + kMaxScallopingDb);
    const double spacing = bin_frequencies[k + 1] - bin_frequencies[k];
    const double freq = bin_frequencies[k] + p * spacing;
    if (!(freq > 0.0)) continue;
    snap.partials.push_back({freq, std::pow(10.0, peak_db / 20.0)});
  }

  // Merge partials within 1 cent, keeping the louder one.
  std::vector<Partial> merged;
  for (const auto& p : snap.partials) {
    if (!merged.empty() && std::abs(cents(p.frequency, merged.back().frequency)) < 1.0) {
      if (p.magnitude > merged.back().magnitude) merged.back() = p;
    } else {
      merged.push_back(p);
    }
  }
  snap.partials = std::move(merged);
  return snap;
}

double leakage_envelope(Window window, double bins) {
  const double d = std::abs(bins);
  if (window == Window::rectangular) return d <= 1.0 ? 1.0 : 1.0 / (std::numbers::pi * d);
  return d <= 2.0 ? 1.0 : 1.0 / (std::numbers::pi * d * (d * d - 1.0));
}

void suppress_leakage(ComplexToneSnapshot& snapshot, Window window, double resolution_hz,
                      const PeakParams& params) {
  std::vector<std::size_t> order(snapshot.partials.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return snapshot.partials[a].magnitude > snapshot.partials[b].magnitude;
  });
  const double margin = std::pow(10.0, params.min_prominence_db / 20.0);
  std::vector<bool> keep(snapshot.partials.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    const auto& q = snapshot.partials[i];
    bool masked = false;
    for (std::size_t k : kept) {
      const auto& p = snapshot.partials[k];
      const double d = (q.frequency - p.frequency) / resolution_hz;
      if (q.magnitude < p.magnitude * leakage_envelope(window, d) * margin) {
        masked = true;
        break;
      }
    }
    if (!masked) {
      keep[i] = true;
      kept.push_back(i);
    }
  }
  std::vector<Partial> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.push_back(snapshot.partials[i]);
  }
  snapshot.partials = std::move(out);
}

ComplexToneSnapshot snapshot_at(const Spectrogram& spectrogram, std::size_t frame,
                                const PeakParams& params) {
  if (frame >= spectrogram.frames()) throw Error("frame index out of range");
  auto snap = pick_peaks(spectrogram.frame(frame), spectrogram.bin_frequencies, params);
  suppress_leakage(snap, spectrogram.window,
                   static_cast<double>(spectrogram.sample_rate) / static_cast<double>(spectrogram.frame_length),
                   params);
  snap.time = spectrogram.frame_times[frame];
  return snap;
}

double PartialTrack::mean_frequency() const {
  if (points.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& p : points) acc += p.frequency;
  return acc / static_cast<double>(points.size());
}

std::optional<double> PartialTrack::frequency_at(std::size_t frame) const {
  if (frame < birth_frame || frame > death_frame) return std::nullopt;
  return points[frame - birth_frame].frequency;
}

std::vector<PartialTrack> track_partials(const Spectrogram& spectrogram, const PeakParams& peaks,
                                         const TrackParams& params) {
  std::vector<PartialTrack> finished;
  std::vector<PartialTrack> active;

  for (std::size_t f = 0; f < spectrogram.frames(); ++f) {
    const auto snap = snapshot_at(spectrogram, f, peaks);

    struct Link {
      double distance;
      std::size_t track;
      std::size_t peak;
    };
    std::vector<Link> links;
    for (std::size_t t = 0; t < active.size(); ++t) {
      const double last = active[t].points.back().frequency;
      for (std::size_t p = 0; p < snap.partials.size(); ++p) {
        const double d = std::abs(cents(snap.partials[p].frequency, last));
        if (d <= params.max_jump_cents) links.push_back({d, t, p});
      }
    }
    std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
      if (x.distance != y.distance) return x.distance < y.distance;
      if (x.track != y.track) return x.track < y.track;
      return x.peak < y.peak;
    });

    std::vector<bool> track_taken(active.size(), false);
    std::vector<bool> peak_taken(snap.partials.size(), false);
    for (const auto& l : links) {
      if (track_taken[l.track] || peak_taken[l.peak]) continue;
      track_taken[l.track] = true;
      peak_taken[l.peak] = true;
      const auto& pk = snap.partials[l.peak];
      active[l.track].points.push_back({f, snap.time, pk.frequency, pk.magnitude});
      active[l.track].death_frame = f;
    }

    std::vector<PartialTrack> still_active;
    for (std::size_t t = 0; t < active.size(); ++t) {
      if (track_taken[t]) {
        still_active.push_back(std::move(active[t]));
      } else {
        finished.push_back(std::move(active[t]));
      }
    }
    for (std::size_t p = 0; p < snap.partials.size(); ++p) {
      if (peak_taken[p]) continue;
      PartialTrack track;
      track.birth_frame = track.death_frame = f;
      track.points.push_back({f, snap.time, snap.partials[p].frequency, snap.partials[p].magnitude});
      still_active.push_back(std::move(track));
    }
    active = std::move(still_active);
  }
  for (auto& t : active) finished.push_back(std::move(t));

  std::vector<PartialTrack> out;
  for (auto& t : finished) {
    if (t.points.size() >= params.min_frames) out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const PartialTrack& a, const PartialTrack& b) {
    const double ma = a.mean_frequency(), mb = b.mean_frequency();
    if (ma != mb) return ma < mb;
    return a.birth_frame < b.birth_frame;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i) + 1;
  return out;
}

}  // namespace pitchfield
