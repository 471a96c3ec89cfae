#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/modal.hpp"

using namespace pitchfield;

namespace {

PitchTrack constant_track(double hz, std::size_t frames) {
  PitchTrack t;
  for (std::size_t i = 0; i < frames; ++i) t.frames.push_back({0.02 * static_cast<double>(i), {{hz, 1.0}}});
  return t;
}

PoleDistribution pole(double cents, double mass) {
  PoleDistribution p;
  p.pole_cents = cents;
  p.mass = mass;
  return p;
}

std::vector<std::string> degree_names(const ModeEstimate& m) {
  std::vector<std::string> out;
  for (const auto& d : m.degrees) out.push_back(d.name);
  return out;
}

/// Sample interquartile range, independent of the library's quantile code.
double sample_iqr(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return q(0.75) - q(0.25);
}

const std::vector<double> kSevenDegreeShape = {0, 300, 400, 500, 700, 800, 1000};

}  // namespace

TEST_CASE("fold: octave equivalence and the fifth") {
  for (const auto& v : fold_to_pitch_classes(constant_track(2.0 * 61.0, 10), 61.0)) {
    CHECK(std::abs(circular_diff(v.cents, 0.0)) < 1e-9);
  }
  for (const auto& v : fold_to_pitch_classes(constant_track(61.0 * std::exp2(700.0 / 1200.0), 10), 61.0)) {
    CHECK(v.cents == doctest::Approx(700.0).epsilon(1e-12));
  }
}

TEST_CASE("fold: empty track and bad final") {
  PitchTrack t;
  t.frames.push_back({0.0, {}});
  CHECK_THROWS_WITH_AS(fold_to_pitch_classes(t, 61.0), "empty track", Error);
  CHECK_THROWS_AS(fold_to_pitch_classes(constant_track(100, 3), 0.0), Error);
}

TEST_CASE("fold: salience weights") {
  PitchTrack t;
  t.frames.push_back({0.0, {{100.0, 0.25}}});
  CHECK(fold_to_pitch_classes(t, 100.0).front().weight == 0.25);
  CHECK(fold_to_pitch_classes(t, 100.0, false).front().weight == 1.0);
}

TEST_CASE("fold: bimodal mixture of final and fifth") {
  const double sigma = 15.0;
  const auto track = fixtures::pole_track(73.0, {0.0, 700.0}, {0.5, 0.5}, sigma, 4000, 11, 0.3);
  const auto folded = fold_to_pitch_classes(track, 73.0);
  std::vector<double> near0, near700;
  for (const auto& v : folded) {
    const double d0 = circular_diff(v.cents, 0.0);
    if (std::abs(d0) < 200) near0.push_back(d0);
    else if (std::abs(v.cents - 700.0) < 200) near700.push_back(v.cents - 700.0);
  }
  CHECK(near0.size() + near700.size() == folded.size());
  CHECK(sample_iqr(near0) == doctest::Approx(fixtures::gaussian_iqr(sigma)).epsilon(0.1));
  CHECK(sample_iqr(near700) == doctest::Approx(fixtures::gaussian_iqr(sigma)).epsilon(0.1));
}

TEST_CASE("poles: single Gaussian pole") {
  const auto track = fixtures::pole_track(61.0, {200.0}, {1.0}, 20.0, 3000, 2);
  const auto set = estimate_poles(fold_to_pitch_classes(track, 61.0));
  REQUIRE(set.poles.size() == 1);
  CHECK(std::abs(set.poles[0].pole_cents - 200.0) <= 10.0);
  CHECK(set.poles[0].q_cents == doctest::Approx(fixtures::gaussian_iqr(20.0)).epsilon(0.2));
  CHECK(set.poles[0].mass == doctest::Approx(1.0));
}

TEST_CASE("poles: constant pitch has zero width") {
  const auto set = estimate_poles(fold_to_pitch_classes(constant_track(61.0, 200), 61.0));
  REQUIRE(set.poles.size() == 1);
  CHECK(set.poles[0].q_cents == 0.0);
  CHECK(std::abs(circular_diff(set.poles[0].pole_cents, 0.0)) < 1e-6);
}

TEST_CASE("poles: two equal poles") {
  const auto track = fixtures::pole_track(61.0, {0.0, 300.0}, {0.5, 0.5}, 10.0, 4000, 9);
  const auto set = estimate_poles(fold_to_pitch_classes(track, 61.0));
  REQUIRE(set.poles.size() == 2);
  int near0 = 0, near300 = 0;
  for (const auto& p : set.poles) {
    if (std::abs(circular_diff(p.pole_cents, 0.0)) <= 10.0) ++near0;
    if (std::abs(circular_diff(p.pole_cents, 300.0)) <= 10.0) ++near300;
    CHECK(std::abs(p.mass - 0.5) <= 0.05);
  }
  CHECK(near0 == 1);
  CHECK(near300 == 1);
}

TEST_CASE("poles: too few observations") {
  CHECK_THROWS_AS(estimate_poles(fold_to_pitch_classes(constant_track(61.0, 99), 61.0)), Error);
}

TEST_CASE("poles: histogram sums to the assigned weight") {
  const auto track = fixtures::pole_track(61.0, {0.0, 500.0, 700.0}, {0.5, 0.2, 0.3}, 25.0, 3000, 4);
  const auto set = estimate_poles(fold_to_pitch_classes(track, 61.0));
  double total_mass = 0.0;
  for (const auto& p : set.poles) {
    double h = 0.0;
    for (double c : p.histogram) h += c;
    CHECK(h == doctest::Approx(p.assigned_weight));
    CHECK(p.histogram.size() == 100);
    CHECK(p.q_cents >= 0.0);
    CHECK(p.mass >= 0.0);
    CHECK(p.mass <= 1.0);
    total_mass += p.mass;
  }
  CHECK(total_mass <= 1.0 + 1e-12);
  CHECK(total_mass + set.residual_mass == doctest::Approx(1.0));
}

TEST_CASE("poles: residual mass for far observations") {
  std::vector<FoldedValue> v;
  for (int i = 0; i < 950; ++i) v.push_back({0.0, 1.0});
  for (int i = 0; i < 50; ++i) v.push_back({600.0, 1.0});
  PoleParams p;
  p.min_mass = 0.1;
  const auto set = estimate_poles(v, p);
  REQUIRE(set.poles.size() == 1);
  CHECK(set.residual_mass == doctest::Approx(0.05));
}

TEST_CASE("poles: wide and narrow spreads") {
  double q_narrow = 0.0, q_wide = 0.0;
  for (double sigma : {5.0, 20.0, 50.0}) {
    const auto track = fixtures::pole_track(84.0, {0.0, 700.0}, {0.6, 0.4}, sigma, 4000, 21);
    const auto set = estimate_poles(fold_to_pitch_classes(track, 84.0));
    REQUIRE(set.poles.size() == 2);
    for (const auto& p : set.poles) {
      const double target = std::abs(circular_diff(p.pole_cents, 0.0)) < 350 ? 0.0 : 700.0;
      CHECK(std::abs(circular_diff(p.pole_cents, target)) <= 10.0);
      CHECK(p.q_cents == doctest::Approx(fixtures::gaussian_iqr(sigma)).epsilon(0.2));
      if (sigma == 5.0 && target == 0.0) q_narrow = p.q_cents;
      if (sigma == 50.0 && target == 0.0) q_wide = p.q_cents;
    }
  }
  CHECK(q_wide > q_narrow);
}

TEST_CASE("mode: seven-degree shape with an ambiguous third") {
  std::vector<PoleDistribution> poles;
  const std::vector<double> masses = {0.3, 0.1, 0.1, 0.12, 0.2, 0.1, 0.08};
  for (std::size_t i = 0; i < kSevenDegreeShape.size(); ++i) poles.push_back(pole(kSevenDegreeShape[i], masses[i]));
  const auto m = infer_mode(poles);
  CHECK(degree_names(m) == std::vector<std::string>{"C", "Eb", "E", "F", "G", "Ab", "Bb"});
  REQUIRE(m.ambiguous.size() == 1);
  CHECK(m.ambiguous[0] == std::pair<std::string, std::string>{"Eb", "E"});
  for (const auto& d : m.degrees) CHECK(std::abs(d.offset_cents) < 1e-9);
}

TEST_CASE("mode: seven-degree shape from a generated track") {
  const double final_hz = 84.0;
  const auto track = fixtures::pole_track(final_hz, kSevenDegreeShape, {0.3, 0.1, 0.1, 0.12, 0.2, 0.1, 0.08}, 10.0, 6000, 7, 0.2);
  const auto set = estimate_poles(fold_to_pitch_classes(track, final_hz));
  const auto m = infer_mode(set.poles);
  CHECK(std::abs(circular_diff(m.final_cents, 0.0)) <= 10.0);
  CHECK(degree_names(m) == std::vector<std::string>{"C", "Eb", "E", "F", "G", "Ab", "Bb"});
  REQUIRE(m.ambiguous.size() == 1);
  CHECK(m.ambiguous[0].first == "Eb");
  CHECK(m.ambiguous[0].second == "E");
}

TEST_CASE("mode: single pole and the fifth") {
  const std::vector<PoleDistribution> one = {pole(0.0, 1.0)};
  CHECK(degree_names(infer_mode(one)) == std::vector<std::string>{"C"});
  const std::vector<PoleDistribution> fifth = {pole(0.0, 0.7), pole(700.0, 0.3)};
  const auto names = degree_names(infer_mode(fifth));
  CHECK(std::find(names.begin(), names.end(), "G") != names.end());
  CHECK_THROWS_AS(infer_mode(std::vector<PoleDistribution>{}), Error);
}

TEST_CASE("mode: final is the heaviest pole, relative degrees follow it") {
  const std::vector<PoleDistribution> poles = {pole(100.0, 0.2), pole(800.0, 0.5), pole(300.0, 0.3)};
  const auto m = infer_mode(poles);
  CHECK(m.final_cents == 800.0);
  CHECK(degree_names(m) == std::vector<std::string>{"C", "F", "G"});
}

TEST_CASE("mode: final override and dedupe") {
  const std::vector<PoleDistribution> poles = {pole(0.0, 0.5), pole(30.0, 0.1), pole(700.0, 0.4)};
  ModeParams p;
  const auto m = infer_mode(poles, p);
  CHECK(m.degrees.size() == 2);
  p.final_cents = 690.0;
  const auto o = infer_mode(poles, p);
  CHECK(o.final_cents == 700.0);
  CHECK(degree_names(o).front() == "C");
}

TEST_CASE("mode: light poles are not ambiguous") {
  const std::vector<PoleDistribution> poles = {pole(0.0, 0.6), pole(300.0, 0.36), pole(400.0, 0.04)};
  CHECK(infer_mode(poles).ambiguous.empty());
}

TEST_CASE("mode: the fifth is recovered in every generated fixture with it") {
  const std::vector<std::vector<double>> shapes = {
      {0, 700}, {0, 300, 700}, {0, 200, 500, 700, 1000}, kSevenDegreeShape, {0, 100, 700, 800}};
  unsigned seed = 100;
  for (const auto& shape : shapes) {
    std::vector<double> probs(shape.size(), 1.0);
    probs[0] = 2.0;
    const auto track = fixtures::pole_track(61.0, shape, probs, 12.0, 5000, seed++, 0.2);
    const auto m = infer_mode(estimate_poles(fold_to_pitch_classes(track, 61.0)).poles);
    const auto names = degree_names(m);
    CHECK(std::find(names.begin(), names.end(), "G") != names.end());
  }
}

TEST_CASE("tuning: on grid, off grid and two segments") {
  PitchTrack on;
  on.frames = fixtures::tuned_frames(0.0, 10.0, 0.0, 1);
  CHECK(std::abs(*estimate_tuning_offset(on).front().offset_cents) <= 2.0);

  PitchTrack off;
  off.frames = fixtures::tuned_frames(0.0, 10.0, 30.0, 2);
  CHECK(*estimate_tuning_offset(off).front().offset_cents == doctest::Approx(30.0).epsilon(0.1));

  PitchTrack two;
  two.frames = fixtures::tuned_frames(0.0, 10.0, 0.0, 3);
  const auto b = fixtures::tuned_frames(10.0, 20.0, -40.0, 4);
  two.frames.insert(two.frames.end(), b.begin(), b.end());
  const std::vector<Segment> segs = {{0.0, 10.0, "A"}, {10.0, 20.0, "B"}, {30.0, 40.0, "C"}};
  const auto r = estimate_tuning_offset(two, segs);
  REQUIRE(r.size() == 3);
  CHECK(std::abs(*r[0].offset_cents) <= 3.0);
  CHECK(std::abs(*r[1].offset_cents + 40.0) <= 3.0);
  CHECK_FALSE(r[2].offset_cents);
  CHECK(r[2].voiced_frames == 0);
}

TEST_CASE("property: folding is octave invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> f(30.0, 2000.0);
  std::uniform_int_distribution<int> oct(-3, 3);
  PitchTrack a, b;
  for (int i = 0; i < 500; ++i) {
    const double hz = f(rng);
    a.frames.push_back({i * 0.02, {{hz, 1.0}}});
    b.frames.push_back({i * 0.02, {{hz * std::exp2(oct(rng)), 1.0}}});
  }
  const auto fa = fold_to_pitch_classes(a, 61.0), fb = fold_to_pitch_classes(b, 61.0);
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(std::abs(circular_diff(fa[i].cents, fb[i].cents)) <= 1e-9);
}

TEST_CASE("property: the final ignores pole order") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(0.0, 1200.0), mass(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PoleDistribution> poles;
    for (int k = 0; k < 6; ++k) poles.push_back(pole(pos(rng), mass(rng)));
    const double expected = std::max_element(poles.begin(), poles.end(), [](const auto& x, const auto& y) {
                              return x.mass < y.mass;
                            })->pole_cents;
    for (int s = 0; s < 5; ++s) {
      std::shuffle(poles.begin(), poles.end(), rng);
      CHECK(infer_mode(poles).final_cents == expected);
    }
  }
}

TEST_CASE("property: tuning offset is transposition equivariant") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  PitchTrack base;
  base.frames = fixtures::tuned_frames(0.0, 5.0, 0.0, 14);
  const double o0 = *estimate_tuning_offset(base).front().offset_cents;
  for (int trial = 0; trial < 50; ++trial) {
    const double c = shift(rng);
    PitchTrack t = base;
    for (auto& f : t.frames)
      for (auto& cand : f.candidates) cand.frequency = apply_cents(cand.frequency, c);
    const double o = *estimate_tuning_offset(t).front().offset_cents;
    CHECK(std::abs(circular_diff(o, o0 + c, 100.0)) <= 1.0);
  }
}
