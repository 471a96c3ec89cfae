#include "pitchfield/modal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"

namespace pitchfield {

std::vector<FoldedValue> fold_to_pitch_classes(const PitchTrack& track, double final_hz,
                                               bool weight_by_salience) {
  if (!(final_hz > 0.0)) throw Error("final must be a positive frequency");
  std::vector<FoldedValue> out;
  for (const auto& frame : track.frames) {
    for (const auto& c : frame.candidates) {
      out.push_back({wrap_cents(cents(c.frequency, final_hz)), weight_by_salience ? c.salience : 1.0});
    }
  }
  if (out.empty()) throw Error("empty track");
  return out;
}

namespace {

double weighted_quantile(std::vector<std::pair<double, double>> values, double q) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (const auto& v : values) total += v.second;
  double acc = 0.0;
  for (const auto& v : values) {
    acc += v.second;
    if (acc >= q * total) return v.first;
  }
  return values.back().first;
}

struct Candidate {
  double position;
  double density;
};

std::vector<Candidate> density_maxima(std::span<const FoldedValue> values, const PoleParams& p) {
  const auto bins = static_cast<std::size_t>(std::lround(1200.0 / p.bin_cents));
  std::vector<double> density(bins, 0.0);
  const double inv2h2 = 1.0 / (2.0 * p.bandwidth_cents * p.bandwidth_cents);
  const double reach = 5.0 * p.bandwidth_cents;
  for (const auto& v : values) {
    const auto centre = static_cast<long>(std::lround(v.cents / p.bin_cents));
    const auto span = static_cast<long>(std::ceil(reach / p.bin_cents));
    for (long j = centre - span; j <= centre + span; ++j) {
      const auto idx = static_cast<std::size_t>(((j % static_cast<long>(bins)) + static_cast<long>(bins)) %
                                                static_cast<long>(bins));
      const double d = circular_diff(static_cast<double>(idx) * p.bin_cents, v.cents);
      density[idx] += v.weight * std::exp(-d * d * inv2h2);
    }
  }

  auto at = [&](long j) {
    const long n = static_cast<long>(bins);
    return density[static_cast<std::size_t>(((j % n) + n) % n)];
  };
  std::vector<Candidate> out;
  const long n = static_cast<long>(bins);
  for (long j = 0; j < n; ++j) {
    const double h = at(j);
    if (!(h > at(j - 1) && h >= at(j + 1))) continue;
    // Prominence: walk each way until higher ground, tracking the valley.
    double left_min = h, right_min = h;
    bool left_higher = false, right_higher = false;
    for (long k = 1; k < n; ++k) {
      if (at(j - k) > h) { left_higher = true; break; }
      left_min = std::min(left_min, at(j - k));
    }
    for (long k = 1; k < n; ++k) {
      if (at(j + k) > h) { right_higher = true; break; }
      right_min = std::min(right_min, at(j + k));
    }
    double saddle;
    if (left_higher && right_higher) saddle = std::max(left_min, right_min);
    else if (left_higher) saddle = left_min;
    else if (right_higher) saddle = right_min;
    else saddle = *std::min_element(density.begin(), density.end());
    if (left_higher || right_higher) {
      if (h - saddle < p.min_relative_prominence * h) continue;
    }
    const double a = at(j - 1), c = at(j + 1);
    const double denom = a - 2.0 * h + c;
    const double shift = denom < 0.0 ? std::clamp(0.5 * (a - c) / denom, -0.5, 0.5) : 0.0;
    out.push_back({wrap_cents((static_cast<double>(j) + shift) * p.bin_cents), h});
  }

  // Merge maxima closer than merge_cents, keeping the denser one.
  std::sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) { return x.density > y.density; });
  std::vector<Candidate> kept;
  for (const auto& c : out) {
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
      return std::abs(circular_diff(c.position, k.position)) < p.merge_cents;
    });
    if (!close) kept.push_back(c);
  }
  return kept;
}

// Index of the nearest pole within the radius, or -1.
long nearest_pole(double v, const std::vector<double>& poles, double radius) {
  long best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const double d = std::abs(circular_diff(v, poles[i]));
    if (d <= radius && d < best_d) {
      best_d = d;
      best = static_cast<long>(i);
    }
  }
  return best;
}

}  // namespace

PoleSet estimate_poles(std::span<const FoldedValue> values, const PoleParams& params) {
  if (values.size() < params.min_observations) {
    throw Error("need at least " + std::to_string(params.min_observations) + " observations");
  }
  const double total = std::accumulate(values.begin(), values.end(), 0.0,
                                       [](double acc, const FoldedValue& v) { return acc + v.weight; });
  PoleSet result;
  if (!(total > 0.0)) return result;

  const auto candidates = density_maxima(values, params);
  std::vector<double> poles;
  for (const auto& c : candidates) poles.push_back(c.position);

  // Drop light poles and reassign until the set is stable.
  std::vector<long> owner(values.size(), -1);
  for (int iteration = 0; iteration < 32; ++iteration) {
    std::vector<double> mass(poles.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      owner[i] = nearest_pole(values[i].cents, poles, params.assign_radius_cents);
      if (owner[i] >= 0) mass[static_cast<std::size_t>(owner[i])] += values[i].weight;
    }
    std::vector<double> kept;
    for (std::size_t k = 0; k < poles.size(); ++k) {
      if (mass[k] / total >= params.min_mass) kept.push_back(poles[k]);
    }
    if (kept.size() == poles.size()) break;
    poles = std::move(kept);
  }

  const std::size_t hist_bins =
      static_cast<std::size_t>(std::lround(2.0 * PoleDistribution::kHistogramSpan / params.bin_cents));
  result.poles.resize(poles.size());
  std::vector<std::vector<std::pair<double, double>>> offsets(poles.size());
  double assigned_total = 0.0;
  for (std::size_t k = 0; k < poles.size(); ++k) {
    result.poles[k].pole_cents = poles[k];
    result.poles[k].histogram.assign(hist_bins, 0.0);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (owner[i] < 0) continue;
    const auto k = static_cast<std::size_t>(owner[i]);
    auto& pole = result.poles[k];
    const double d = circular_diff(values[i].cents, poles[k]);
    offsets[k].emplace_back(d, values[i].weight);
    pole.assigned_weight += values[i].weight;
    pole.observations += 1;
    assigned_total += values[i].weight;
    auto bin = static_cast<long>(std::floor((d + PoleDistribution::kHistogramSpan) / params.bin_cents));
    bin = std::clamp<long>(bin, 0, static_cast<long>(hist_bins) - 1);
    pole.histogram[static_cast<std::size_t>(bin)] += values[i].weight;
  }
  for (std::size_t k = 0; k < poles.size(); ++k) {
    auto& pole = result.poles[k];
    pole.mass = pole.assigned_weight / total;
    if (!offsets[k].empty()) {
      pole.q_cents = weighted_quantile(offsets[k], 0.75) - weighted_quantile(offsets[k], 0.25);
    }
  }
  result.residual_mass = std::max(0.0, 1.0 - assigned_total / total);
  std::sort(result.poles.begin(), result.poles.end(),
            [](const PoleDistribution& a, const PoleDistribution& b) { return a.pole_cents < b.pole_cents; });
  return result;
}

ModeEstimate infer_mode(std::span<const PoleDistribution> poles, const ModeParams& params) {
  if (poles.empty()) throw Error("no poles");
  std::size_t final_idx = 0;
  if (params.final_cents) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poles.size(); ++i) {
      const double d = std::abs(circular_diff(poles[i].pole_cents, *params.final_cents));
      if (d < best) {
        best = d;
        final_idx = i;
      }
    }
  } else {
    // Highest mass; ties resolved by position so pole order never matters.
    for (std::size_t i = 1; i < poles.size(); ++i) {
      const auto& a = poles[i];
      const auto& b = poles[final_idx];
      if (a.mass > b.mass || (a.mass == b.mass && a.pole_cents < b.pole_cents)) final_idx = i;
    }
  }

  ModeEstimate mode;
  mode.final_cents = poles[final_idx].pole_cents;
  mode.final_hz = poles[final_idx].pole_hz;

  std::vector<std::pair<double, double>> rel;  // (cents from final, mass)
  for (const auto& p : poles) rel.emplace_back(wrap_cents(p.pole_cents - mode.final_cents), p.mass);
  // Dedupe within dedupe_cents, heavier first; the final always survives.
  std::sort(rel.begin(), rel.end(), [](const auto& a, const auto& b) {
    if (a.first == 0.0 || b.first == 0.0) return a.first == 0.0 && b.first != 0.0;
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::pair<double, double>> kept;
  for (const auto& r : rel) {
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
      return std::abs(circular_diff(r.first, k.first)) < params.dedupe_cents;
    });
    if (!close) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end());
  for (const auto& [c, m] : kept) {
    const double offset = circular_diff(c, 100.0 * std::round(c / 100.0));
    mode.degrees.push_back({c, degree_name(c), offset, m});
  }

  for (std::size_t i = 0; i < mode.degrees.size(); ++i) {
    for (std::size_t j = i + 1; j < mode.degrees.size(); ++j) {
      const auto& a = mode.degrees[i];
      const auto& b = mode.degrees[j];
      const double d = std::abs(circular_diff(a.cents_from_final, b.cents_from_final));
      if (d < params.ambiguity_min_cents || d > params.ambiguity_max_cents) continue;
      if (a.mass < params.min_mass || b.mass < params.min_mass) continue;
      if (degree_letter(a.cents_from_final) != degree_letter(b.cents_from_final)) continue;
      mode.ambiguous.emplace_back(a.name, b.name);
    }
  }
  return mode;
}

std::optional<double> tuning_offset(std::span<const std::pair<double, double>> observations) {
  std::vector<std::pair<double, double>> folded;  // (cents mod 100, weight)
  double total = 0.0;
  for (const auto& [f, w] : observations) {
    if (!(f > 0.0) || !(w > 0.0)) continue;
    folded.emplace_back(wrap_cents(cents(f, kA4Hz), 100.0), w);
    total += w;
  }
  if (folded.empty()) return std::nullopt;

  auto cost = [&](double o) {
    double acc = 0.0;
    for (const auto& [v, w] : folded) {
      const double d = circular_diff(v, o, 100.0);
      acc += w * d * d;
    }
    return acc;
  };
  double best = -50.0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double o = -50.0; o < 50.0; o += 0.5) {
    const double c = cost(o);
    if (c < best_cost) {
      best_cost = c;
      best = o;
    }
  }
  // The cost is piecewise quadratic; the weighted mean of wrapped residuals is
  // its stationary point once the wrap assignment settles.
  for (int i = 0; i < 50; ++i) {
    double acc = 0.0;
    for (const auto& [v, w] : folded) acc += w * circular_diff(v, best, 100.0);
    const double step = acc / total;
    best += step;
    if (std::abs(step) < 1e-12) break;
  }
  return circular_diff(best, 0.0, 100.0);
}

std::vector<SegmentOffset> estimate_tuning_offset(const PitchTrack& track,
                                                  std::span<const Segment> segments) {
  std::vector<Segment> spans(segments.begin(), segments.end());
  if (spans.empty()) {
    spans.push_back({-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                     "global"});
  }
  std::vector<SegmentOffset> out;
  for (const auto& seg : spans) {
    SegmentOffset so{seg, std::nullopt, 0};
    std::vector<std::pair<double, double>> obs;
    for (const auto& f : track.frames) {
      if (!f.voiced() || f.time < seg.start || f.time >= seg.end) continue;
      ++so.voiced_frames;
      for (const auto& c : f.candidates) obs.emplace_back(c.frequency, c.salience);
    }
    so.offset_cents = tuning_offset(obs);
    out.push_back(std::move(so));
  }
  return out;
}

}  // namespace pitchfield
