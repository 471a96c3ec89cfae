#include <cmath>
#include <cstring>
#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/inharmonicity.hpp"
#include "pitchfield/modal.hpp"
#include "pitchfield/pitch.hpp"
#include "pitchfield/synthesis.hpp"

using namespace pitchfield;

namespace {

constexpr int kRate = 48000;

bool bit_identical(const Signal& a, const Signal& b) {
  return a.size() == b.size() && a.sample_rate() == b.sample_rate() &&
         std::memcmp(a.samples().data(), b.samples().data(), a.size() * sizeof(double)) == 0;
}

double peak(const Signal& s) {
  double m = 0.0;
  for (double v : s.samples()) m = std::max(m, std::abs(v));
  return m;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

PitchFrame frame_nearest(const PitchTrack& t, double time) {
  return *std::min_element(t.frames.begin(), t.frames.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.time - time) < std::abs(b.time - time);
  });
}

}  // namespace

TEST_CASE("complex tone: ten equal harmonics round trip") {
  const auto s = synth_complex_tone(ComplexToneSpec::harmonic(110.0, 10, 1.0, 0.1), kRate);
  const auto snap = fixtures::middle_snapshot(s);
  REQUIRE(snap.partials.size() == 10);
  for (int h = 1; h <= 10; ++h) CHECK(std::abs(cents(snap.partials[h - 1].frequency, 110.0 * h)) <= 5.0);
}

TEST_CASE("complex tone: zero amplitude is silence") {
  const auto s = synth_complex_tone(ComplexToneSpec::harmonic(110.0, 4, 0.5, 0.0), kRate);
  CHECK(s.size() == 24000);
  for (double v : s.samples()) CHECK(v == 0.0);
}

TEST_CASE("complex tone: boosted fifth harmonic of a 39 Hz bass") {
  const auto snap = fixtures::middle_snapshot(synth_complex_tone(fixtures::boosted_tone(39.0, {5}), kRate));
  const auto r = detect_salient_partials(snap, nullptr);
  REQUIRE(r.salient == std::set<int>{5});
  for (const auto& p : r.partials) {
    if (p.harmonic == 5) {
      CHECK(p.frequency >= 188.0);
      CHECK(p.frequency <= 195.0);
    }
  }
}

TEST_CASE("complex tone: invalid specs") {
  ComplexToneSpec spec = ComplexToneSpec::harmonic(1000.0, 30, 0.1);
  const auto msg = error_of([&] { synth_complex_tone(spec, kRate); });
  CHECK(msg.find("Nyquist") != std::string::npos);
  CHECK(msg.find("#23 (24000 Hz)") != std::string::npos);
  CHECK(msg.find("#29") != std::string::npos);
  CHECK(msg.find("#22 ") == std::string::npos);
  CHECK_THROWS_AS(synth_complex_tone(ComplexToneSpec{}, kRate), Error);
  spec = ComplexToneSpec::harmonic(100.0, 2, 0.1);
  spec.partials[0].amplitude = -1.0;
  CHECK_THROWS_AS(synth_complex_tone(spec, kRate), Error);
}

TEST_CASE("complex tone: exponential envelope") {
  ComplexToneSpec spec = ComplexToneSpec::harmonic(100.0, 1, 1.0, 0.5);
  spec.envelope = {Envelope::Kind::exponential, 0.25};
  const auto env = rms_envelope(synth_complex_tone(spec, kRate), 4800, 4800);
  for (std::size_t i = 1; i < env.size(); ++i) CHECK(env[i] / env[i - 1] == doctest::Approx(std::exp(-0.1 / 0.25)).epsilon(0.01));
}

TEST_CASE("waveshape: identity and pure cubic") {
  const auto x = oracles::sine(440.0, 0.8, 0.5, kRate);
  CHECK(bit_identical(waveshape(x, {}), x));

  const auto cubic = waveshape(oracles::sine(500.0, 1.0, 1.0, kRate) , {{0.0, 0.0, 0.0, 1.0}, 1.0, 1.0});
  const auto peaks = oracles::whole_signal_peaks(cubic);
  REQUIRE(peaks.partials.size() == 2);
  CHECK(peaks.partials[0].frequency == doctest::Approx(500.0).epsilon(1e-5));
  CHECK(peaks.partials[1].frequency == doctest::Approx(1500.0).epsilon(1e-5));
  CHECK(peaks.partials[0].magnitude / peaks.partials[1].magnitude == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("waveshape: degree-three intermodulation set") {
  const auto a = oracles::sine(440.0, 0.4, 1.0, kRate);
  const auto b = oracles::sine(300.0, 0.4, 1.0, kRate);
  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = a.samples()[i] + b.samples()[i];
  const auto y = waveshape(Signal(sum, kRate), {{0.0, 1.0, 0.6, 0.5}, 1.0, 1.0});
  const auto cmp = oracles::compare_peaks(oracles::whole_signal_peaks(y), oracles::intermodulation_set(440, 300, 3), 0.5);
  CHECK(cmp.missing.empty());
  CHECK(cmp.unexpected.empty());
}

TEST_CASE("waveshape: mix and drive") {
  const auto x = oracles::sine(100.0, 0.5, 0.1, kRate);
  const auto half = waveshape(x, {{0.0, 0.0, 1.0}, 2.0, 0.5});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.samples()[i];
    CHECK(half.samples()[i] == doctest::Approx(0.5 * v + 0.5 * 4.0 * v * v));
  }
  CHECK_THROWS_AS(waveshape(x, {{1.0}, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(waveshape(x, {{0.0, 1.0}, 1.0, 1.5}), Error);
}

TEST_CASE("ring modulation: sum and difference only") {
  const auto y = ring_modulate(oracles::sine(100.0, 0.9, 1.0, kRate), oracles::sine(30.0, 0.9, 1.0, kRate));
  const auto cmp = oracles::compare_peaks(oracles::whole_signal_peaks(y), {70.0, 130.0}, 0.5);
  CHECK(cmp.exact());

  const auto tone = synth_complex_tone(ComplexToneSpec::harmonic(100.0, 3, 1.0, 0.3), kRate);
  const auto z = ring_modulate(tone, oracles::sine(37.0, 0.9, 1.0, kRate));
  const auto cmp2 = oracles::compare_peaks(oracles::whole_signal_peaks(z),
                                           oracles::sum_difference_set({100, 200, 300}, {37}), 0.5);
  CHECK(cmp2.exact());
}

TEST_CASE("ring modulation: unit carrier and mismatches") {
  const auto a = oracles::sine(220.0, 0.7, 0.2, kRate);
  const Signal one(std::vector<double>(a.size(), 1.0), kRate);
  CHECK(bit_identical(ring_modulate(a, one), a));
  CHECK_THROWS_AS(ring_modulate(a, oracles::sine(220.0, 0.7, 0.3, kRate)), Error);
  CHECK_THROWS_AS(ring_modulate(a, oracles::sine(220.0, 0.7, 0.2, 44100)), Error);
}

TEST_CASE("unison: one voice, beating pair, zero spread") {
  const auto spec = ComplexToneSpec::harmonic(440.0, 1, 2.0, 0.5);
  CHECK(bit_identical(unison(spec, {1, 25.0, true}, kRate), synth_complex_tone(spec, kRate)));

  for (double d : {10.0, 20.0, 40.0}) {
    const auto env = rms_envelope(unison(spec, {2, d, true}, kRate), 1200, 24);
    const double beat = 440.0 * (std::exp2(d / 1200.0) - 1.0);
    const double period = oracles::mean_minimum_spacing(env) * 24.0 / kRate;
    REQUIRE(period > 0.0);
    CHECK(1.0 / period == doctest::Approx(beat).epsilon(0.05));
  }

  const auto flat = rms_envelope(unison(spec, {2, 0.0, true}, kRate), 1200, 24);
  const auto [lo, hi] = std::minmax_element(flat.begin() + 1, flat.end() - 1);
  CHECK(*hi - *lo < 1e-3 * *hi);
}

TEST_CASE("unison: detunes") {
  CHECK(unison_detunes(1, 30.0) == std::vector<double>{0.0});
  CHECK(unison_detunes(3, 20.0) == std::vector<double>{-10.0, 0.0, 10.0});
  CHECK_THROWS_AS(unison_detunes(0, 10.0), Error);
}

TEST_CASE("glide: flat contour is the plain tone") {
  const auto spec = ComplexToneSpec::harmonic(220.0, 3, 0.5, 0.3);
  PitchContour flat{{{0.0, 0.0}, {0.5, 0.0}}};
  CHECK(bit_identical(glide(spec, flat, kRate), synth_complex_tone(spec, kRate)));
}

TEST_CASE("glide: octave bend reaches 440 Hz") {
  const auto spec = ComplexToneSpec::harmonic(220.0, 1, 1.5, 0.8);
  PitchContour up{{{0.0, 0.0}, {1.0, 1200.0}}};
  const auto track = autocorrelation_track(glide(spec, up, kRate), {1024, 256}, {100.0, 1000.0, 0.3});
  const auto f = frame_nearest(track, 1.0);
  REQUIRE(f.voiced());
  CHECK(std::abs(cents(f.top_frequency(), 440.0)) <= 10.0);
  const auto mid = frame_nearest(track, 0.5);
  CHECK(std::abs(cents(mid.top_frequency(), 220.0 * std::exp2(0.5))) <= 10.0);
}

TEST_CASE("glide: screw contour shape") {
  PitchContour screw{{{0.0, 0.0}, {1.0, -600.0}}, PitchContour::Kind::screw};
  CHECK(screw.cents_at(0.0) == 0.0);
  CHECK(screw.cents_at(1.0) == -600.0);
  CHECK(screw.cents_at(0.2) < -300.0);
  for (double t = 0.0; t < 1.0; t += 0.05) CHECK(screw.cents_at(t + 0.05) <= screw.cents_at(t));
}

TEST_CASE("glide: contour errors") {
  const auto spec = ComplexToneSpec::harmonic(2000.0, 10, 0.2);
  CHECK_THROWS_AS(glide(spec, {{{0.0, 0.0}, {0.1, 2500.0}}}, kRate), Error);
  CHECK_THROWS_AS(glide(spec, {{{0.0, 0.0}, {0.1, 1200.0}}}, kRate), Error);
  CHECK_THROWS_AS(glide(ComplexToneSpec::harmonic(100.0, 1, 0.2), {{{0.1, 0.0}, {0.1, 10.0}}}, kRate), Error);
}

TEST_CASE("glide: wide glides widen the pole") {
  const auto spec = ComplexToneSpec::harmonic(110.0, 4, 4.0, 0.2);
  PitchContour stable{{{0.0, 0.0}, {4.0, 0.0}}};
  PitchContour wide{{{0.0, 0.0}, {1.0, 0.0}, {1.8, -200.0}, {2.6, 0.0}, {4.0, 0.0}}};
  auto q_of = [&](const PitchContour& c) {
    const auto track = autocorrelation_track(glide(spec, c, kRate), {2048, 512}, {50.0, 1000.0, 0.3});
    const auto set = estimate_poles(fold_to_pitch_classes(track, 110.0, false));
    double q = 0.0, best_mass = 0.0;
    for (const auto& p : set.poles) {
      if (p.mass > best_mass) {
        best_mass = p.mass;
        q = p.q_cents;
      }
    }
    return q;
  };
  CHECK(q_of(wide) > q_of(stable));
}

TEST_CASE("808: glide starts a semitone high and settles") {
  Bass808Patch patch;
  patch.target_f0 = 55.0;
  patch.glide_time_constant = 0.5;
  patch.duration = 3.0;
  patch.decay = 2.0;
  const auto track = autocorrelation_track(synth_808(patch, kRate), {2048, 256}, {47.0, 1000.0, 0.3});
  REQUIRE(track.frames.front().voiced());
  CHECK(std::abs(cents(track.frames.front().top_frequency(), 55.0) - 100.0) <= 10.0);
  std::size_t settled = 0;
  for (const auto& f : track.frames) {
    if (!f.voiced()) continue;
    CHECK(std::abs(cents(f.top_frequency(), bass808_frequency(patch, f.time))) <= 5.0);
    if (f.time >= 3.0 * patch.glide_time_constant) {
      CHECK(std::abs(cents(f.top_frequency(), 55.0)) <= 10.0);
      ++settled;
    }
  }
  CHECK(settled > 50);
}

TEST_CASE("808: modes 1-3 boost sets") {
  std::vector<int> even;
  for (int h = 2; h <= 16; h += 2) even.push_back(h);
  const std::vector<std::set<int>> expected = {{3, 5}, {8, 10}, std::set<int>(even.begin(), even.end())};
  for (int mode = 1; mode <= 3; ++mode) {
    Bass808Patch patch;
    patch.mode = mode;
    patch.target_f0 = 55.0;
    const auto snap = fixtures::middle_snapshot(synth_808(patch, kRate));
    CHECK(detect_salient_partials(snap, nullptr).salient == expected[static_cast<std::size_t>(mode - 1)]);
  }
}

TEST_CASE("808: custom pattern and patterns table") {
  const auto table = default_808_patterns(16);
  CHECK(table[0] == std::vector<int>{3, 5});
  CHECK(table[1] == std::vector<int>{8, 10});
  CHECK(table[2].size() == 8);
  Bass808Patch patch;
  patch.custom_pattern = {2, 7};
  const auto snap = fixtures::middle_snapshot(synth_808(patch, kRate));
  CHECK(detect_salient_partials(snap, nullptr).salient == std::set<int>{2, 7});
}

TEST_CASE("808: invalid patches") {
  Bass808Patch p;
  p.mode = 8;
  CHECK_THROWS_AS(synth_808(p, kRate), Error);
  p = {};
  p.decay = 0.0;
  CHECK_THROWS_AS(synth_808(p, kRate), Error);
  p = {};
  p.target_f0 = 19.0;
  CHECK_THROWS_AS(synth_808(p, kRate), Error);
  p = {};
  p.target_f0 = 1500.0;
  CHECK_THROWS_AS(synth_808(p, kRate), Error);
}

TEST_CASE("808: amplitude decays exponentially") {
  Bass808Patch patch;
  patch.decay = 0.5;
  patch.glide_depth_cents = 0.0;
  const auto env = rms_envelope(synth_808(patch, kRate), 9600, 9600);
  for (std::size_t i = 1; i < env.size(); ++i) {
    CHECK(env[i] / env[i - 1] == doctest::Approx(std::exp(-0.2 / 0.5)).epsilon(0.02));
  }
}

TEST_CASE("property: generators are deterministic and peak limited") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> f0(30.0, 400.0), amp(0.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexToneSpec spec;
    spec.f0 = f0(rng);
    spec.duration = 0.2;
    for (int h = 1; h <= 8; ++h) spec.partials.push_back({static_cast<double>(h), false, amp(rng), 0.0});
    const auto a = synth_complex_tone(spec, kRate);
    CHECK(bit_identical(a, synth_complex_tone(spec, kRate)));
    CHECK(peak(a) <= 1.0 - 1e-6);
    const auto u = unison(spec, {3, 15.0, false}, kRate);
    CHECK(bit_identical(u, unison(spec, {3, 15.0, false}, kRate)));
    CHECK(peak(u) <= 1.0 - 1e-6);
    PitchContour c{{{0.0, 0.0}, {0.2, 300.0}}, PitchContour::Kind::screw};
    const auto g = glide(spec, c, kRate);
    CHECK(bit_identical(g, glide(spec, c, kRate)));
    CHECK(peak(g) <= 1.0 - 1e-6);
  }
  Bass808Patch patch;
  patch.duration = 0.5;
  const auto b = synth_808(patch, kRate);
  CHECK(bit_identical(b, synth_808(patch, kRate)));
  CHECK(peak(b) <= 1.0 - 1e-6);
}

TEST_CASE("property: quiet renders are not amplified") {
  const auto s = synth_complex_tone(ComplexToneSpec::harmonic(100.0, 1, 0.1, 0.25), kRate);
  CHECK(peak(s) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("property: ring modulation is bilinear") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(1000), y(1000);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  const Signal sx(x, kRate), sy(y, kRate);
  for (double a : {0.5, 2.0, -0.25, 0.3}) {
    const auto lhs = ring_modulate(sx.scaled(a), sy);
    const auto rhs = ring_modulate(sx, sy).scaled(a);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(lhs.samples()[i] == doctest::Approx(rhs.samples()[i]).epsilon(1e-15));
  }
  for (double a : {0.5, 2.0, -0.25}) CHECK(bit_identical(ring_modulate(sx.scaled(a), sy), ring_modulate(sx, sy).scaled(a)));
}
