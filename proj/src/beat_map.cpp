#include "pitchfield/beat_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "fft.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/signal.hpp"

namespace pitchfield {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::size_t envelope_length(const BeatMapParams& p) {
  const auto n = static_cast<std::size_t>(std::llround(p.duration * p.sample_rate));
  return frame_count(n, p.rms_frame, p.rms_hop);
}

std::size_t envelope_fft_size(const BeatMapParams& p) {
  return next_pow2(envelope_length(p) * static_cast<std::size_t>(std::max(1, p.zero_pad)));
}

void validate(const BeatMapParams& p) {
  if (!(p.base_f0 > 0.0)) throw Error("beat map base f0 must be positive");
  if (p.partials < 1) throw Error("beat map needs at least one partial");
  if (!(p.step > 0.0)) throw Error("beat map step must be positive");
  if (p.sample_rate <= 0) throw Error("beat map sample rate must be positive");
  if (p.rms_frame == 0 || p.rms_hop == 0 || p.rms_hop > p.rms_frame) throw Error("invalid RMS framing");
  if (p.phase_sets < 1) throw Error("beat map needs at least one phase set");
  if (!(p.duration * p.sample_rate > static_cast<double>(p.rms_frame))) {
    throw Error("beat map duration shorter than one RMS frame");
  }
}

}  // namespace

std::vector<std::vector<double>> beat_phase_sets(const BeatMapParams& params) {
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  std::vector<std::vector<double>> sets(static_cast<std::size_t>(params.phase_sets));
  for (auto& s : sets) {
    s.resize(static_cast<std::size_t>(params.partials));
    for (auto& v : s) v = dist(rng);
  }
  return sets;
}

std::vector<double> beat_frequency_axis(const BeatMapParams& params) {
  const double env_rate = static_cast<double>(params.sample_rate) / static_cast<double>(params.rms_hop);
  const std::size_t size = envelope_fft_size(params);
  std::vector<double> axis;
  for (std::size_t k = 1; k <= size / 2; ++k) {
    const double f = env_rate * static_cast<double>(k) / static_cast<double>(size);
    if (f > params.max_beat_hz) break;
    axis.push_back(f);
  }
  return axis;
}

std::vector<double> beat_spectrum(double f_a, double f_b, const std::vector<double>& phases_a,
                                  const std::vector<double>& phases_b, const BeatMapParams& params) {
  const auto n = static_cast<std::size_t>(std::llround(params.duration * params.sample_rate));
  std::vector<double> x(n, 0.0);
  auto add_tone = [&](double f0, const std::vector<double>& phases) {
    for (int k = 1; k <= params.partials; ++k) {
      const double amp = 1.0 / std::pow(static_cast<double>(k), params.rolloff);
      const double w = kTwoPi * f0 * k / params.sample_rate;
      const double ph = phases.at(static_cast<std::size_t>(k - 1));
      for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * static_cast<double>(i) + ph);
    }
  };
  add_tone(f_a, phases_a);
  add_tone(f_b, phases_b);
  auto env = rms_envelope(Signal(std::move(x), params.sample_rate), params.rms_frame, params.rms_hop);
  const double mean = std::accumulate(env.begin(), env.end(), 0.0) / static_cast<double>(env.size());
  const std::size_t size = envelope_fft_size(params);
  std::vector<double> padded(size, 0.0);
  for (std::size_t i = 0; i < env.size(); ++i) padded[i] = env[i] - mean;
  detail::RealFft fft(size);
  const auto bins = fft.forward(padded);
  const std::size_t count = beat_frequency_axis(params).size();
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = std::abs(bins[k + 1]) / static_cast<double>(env.size());
  return out;
}

std::vector<double> beat_row(double interval_semitones, const BeatMapParams& params) {
  validate(params);
  const auto sets = beat_phase_sets(params);
  const std::vector<double> zero(static_cast<std::size_t>(params.partials), 0.0);
  const double f_b = params.base_f0 * std::exp2(interval_semitones / 12.0);
  std::vector<double> acc;
  for (const auto& ph : sets) {
    const auto s = beat_spectrum(params.base_f0, f_b, zero, ph, params);
    if (acc.empty()) acc.assign(s.size(), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) acc[k] += s[k] * s[k];
  }
  for (double& v : acc) v = std::sqrt(v / static_cast<double>(sets.size()));
  return acc;
}

double row_energy(const std::vector<double>& row) {
  double e = 0.0;
  for (double v : row) e += v * v;
  return e;
}

BeatMap compute_beat_map(const BeatMapParams& params) {
  validate(params);
  BeatMap map;
  map.params = params;
  map.beat_frequencies = beat_frequency_axis(params);
  if (params.interval_min > params.interval_max) return map;
  const auto steps = static_cast<std::size_t>(
      std::floor((params.interval_max - params.interval_min) / params.step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    map.intervals.push_back(params.interval_min + params.step * static_cast<double>(i));
  }
  for (double iv : map.intervals) {
    const double top = params.base_f0 * std::exp2(iv / 12.0) * params.partials;
    if (top >= params.sample_rate / 2.0 || params.base_f0 * params.partials >= params.sample_rate / 2.0) {
      std::ostringstream msg;
      msg << "partials reach Nyquist at interval " << iv << " semitones";
      throw Error(msg.str());
    }
  }

  map.matrix.resize(map.intervals.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, map.intervals.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < map.intervals.size(); i += workers) {
        map.matrix[i] = beat_row(map.intervals[i], params);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& row : map.matrix) map.energy.push_back(row_energy(row));
  return map;
}

std::optional<std::pair<int, int>> nearest_ratio(double cents, int max_term, double tolerance_cents) {
  std::optional<std::pair<int, int>> best;
  double best_err = tolerance_cents;
  for (int q = 1; q <= max_term; ++q) {
    for (int p = q; p <= max_term; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const double err = std::abs(1200.0 * std::log2(static_cast<double>(p) / q) - cents);
      if (err <= best_err) {
        best_err = err;
        best = std::make_pair(p, q);
      }
    }
  }
  return best;
}

std::vector<BeatMinimum> find_beat_minima(const BeatMap& map, const MinimaParams& params) {
  std::vector<BeatMinimum> out;
  const auto& e = map.energy;
  const std::size_t n = e.size();
  if (n == 0) return out;
  if (map.params.step > 0.05 + 1e-12) throw Error("beat minima need a map step of at most 0.05 semitones");
  const double peak = *std::max_element(e.begin(), e.end());
  const auto reach = static_cast<std::size_t>(std::llround(params.neighbourhood / map.params.step));

  for (std::size_t i = 0; i < n; ++i) {
    const bool has_left = i > 0;
    const bool has_right = i + 1 < n;
    if (!has_left && !has_right) continue;
    if (has_left && !(e[i] < e[i - 1])) continue;
    if (has_right && !(e[i] <= e[i + 1])) continue;
    double left_max = 0.0;
    double right_max = 0.0;
    for (std::size_t k = 1; k <= reach; ++k) {
      if (i >= k) left_max = std::max(left_max, e[i - k]);
      if (i + k < n) right_max = std::max(right_max, e[i + k]);
    }
    const double edge = params.sharpness * e[i];
    if (has_left && e[i - 1] < edge) continue;
    if (has_right && e[i + 1] < edge) continue;
    const double threshold = params.significance * e[i];
    if (has_left && left_max < threshold) continue;
    if (has_right && right_max < threshold) continue;
    if (std::max(left_max, right_max) < params.floor_fraction * peak) continue;

    BeatMinimum m;
    m.interval = map.intervals[i];
    if (auto r = nearest_ratio(m.interval * 100.0, params.max_term, params.label_tolerance_cents)) {
      m.label = std::to_string(r->first) + ":" + std::to_string(r->second);
      m.ratio_cents = 1200.0 * std::log2(static_cast<double>(r->first) / r->second);
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace pitchfield
