#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "doctest.h"

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/signal.hpp"

using namespace pitchfield;

namespace {

Signal sine(double f, double amp, std::size_t n, int rate = 48000) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * std::numbers::pi * f * i / rate);
  return Signal(std::move(x), rate);
}

Signal noise(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return Signal(std::move(x), 48000);
}

}  // namespace

TEST_CASE("cents conversions") {
  CHECK(cents(880.0, 440.0) == doctest::Approx(1200.0));
  CHECK(apply_cents(440.0, -1200.0) == doctest::Approx(220.0));
  CHECK(wrap_cents(-100.0) == doctest::Approx(1100.0));
  CHECK(wrap_cents(2500.0) == doctest::Approx(100.0));
  CHECK(circular_diff(10.0, 1190.0) == doctest::Approx(20.0));
  CHECK(circular_diff(1190.0, 10.0) == doctest::Approx(-20.0));
}

TEST_CASE("note names parse with cent offsets") {
  CHECK(parse_note_or_hz("61") == doctest::Approx(61.0));
  CHECK(parse_note_or_hz("61Hz") == doctest::Approx(61.0));
  CHECK(parse_note_or_hz("A4") == doctest::Approx(440.0));
  // E2 = 82.4069 Hz; +41 cents gives about 84 Hz.
  CHECK(parse_note_or_hz("E2+41c") == doctest::Approx(82.4068892 * std::exp2(41.0 / 1200.0)).epsilon(1e-6));
  CHECK(parse_note_or_hz("B1") == doctest::Approx(61.7354).epsilon(1e-5));
  CHECK(parse_note_or_hz("D#1") == doctest::Approx(parse_note_or_hz("Eb1")));
  CHECK_THROWS_AS(parse_note_or_hz("H2"), Error);
  CHECK_THROWS_AS(parse_note_or_hz(""), Error);
  CHECK(degree_name(300.0) == "Eb");
  CHECK(degree_name(700.0) == "G");
  CHECK(degree_name(1190.0) == "C");
  CHECK(note_name(440.0) == "A4");
}

TEST_CASE("signal validates its contents") {
  CHECK_THROWS_AS(Signal({0.0}, 0), Error);
  CHECK_THROWS_AS(Signal({std::nan("")}, 48000), Error);
  CHECK_THROWS_AS(Signal({INFINITY}, 48000), Error);
  Signal s({0.5, -0.5}, 8000);
  CHECK(s.duration() == doctest::Approx(2.0 / 8000));
}

TEST_CASE("frame counts") {
  CHECK(frame_count(1000, 400, 200) == 4);
  CHECK(frame_count(4096, 4096, 123) == 1);
  CHECK(frame_count(48000, 4096, 1024) == 44);

  const FrameSequence frames(noise(1000, 1), 400, 200, Window::hann);
  CHECK(frames.count() == 4);
  const FrameSequence single(noise(777, 2), 777, 50, Window::rectangular);
  CHECK(single.count() == 1);
}

TEST_CASE("framing errors") {
  CHECK_THROWS_WITH_AS(FrameSequence(Signal({}, 48000), 4, 2, Window::hann), "empty input", Error);
  CHECK_THROWS_WITH_AS(FrameSequence(noise(100, 3), 10, 0, Window::hann), "invalid hop", Error);
  CHECK_THROWS_WITH_AS(rms_envelope(Signal({}, 48000), 4, 2), "empty input", Error);
  CHECK_THROWS_AS(parse_window("kaiser"), Error);
}

TEST_CASE("last frame is zero padded, never dropped") {
  std::vector<double> x(1000, 1.0);
  const FrameSequence frames(Signal(x, 48000), 400, 250, Window::rectangular);
  REQUIRE(frames.count() == 4);
  const auto last = frames.frame(3);
  REQUIRE(last.size() == 400);
  CHECK(last[249] == 1.0);
  CHECK(last[250] == 0.0);
}

TEST_CASE("rms of constant and sine") {
  const auto env = rms_envelope(Signal(std::vector<double>(4800, -0.25), 48000), 480, 240);
  for (double v : env) CHECK(v == doctest::Approx(0.25));
  const auto s = rms_envelope(sine(440.0, 1.0, 48000), 4800, 2400);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) CHECK(s[i] == doctest::Approx(std::sqrt(0.5)).epsilon(0.01));
}

TEST_CASE("rms of two sines a semitone apart oscillates at the difference frequency") {
  const double fa = 440.0;
  const double fb = 440.0 * std::exp2(1.0 / 12.0);
  const int rate = 48000;
  std::vector<double> x(rate * 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2 * std::numbers::pi * fa * i / rate) + std::sin(2 * std::numbers::pi * fb * i / rate);
  }
  const std::size_t frame = 480, hop = 48;
  const auto env = rms_envelope(Signal(x, rate), frame, hop);
  // Count envelope minima over full frames and convert to a rate.
  std::vector<double> minima;
  const std::size_t full = (x.size() - frame) / hop + 1;
  for (std::size_t i = 1; i + 1 < full; ++i) {
    if (env[i] < env[i - 1] && env[i] <= env[i + 1]) minima.push_back(static_cast<double>(i) * hop / rate);
  }
  REQUIRE(minima.size() > 10);
  const double period = (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
  CHECK(1.0 / period == doctest::Approx(fb - fa).epsilon(0.02));
}

TEST_CASE("property: frame count is non-increasing in hop") {
  for (std::size_t len : {1000u, 4097u, 48000u}) {
    std::size_t prev = SIZE_MAX;
    for (std::size_t hop = 1; hop <= 1024; hop += 7) {
      const auto c = frame_count(len, 1024, hop);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("property: rms envelope is positively homogeneous") {
  const auto x = noise(5000, 7);
  const auto base = rms_envelope(x, 512, 128);
  for (double a : {-3.0, 0.5, 2.0}) {
    const auto scaled = rms_envelope(x.scaled(a), 512, 128);
    REQUIRE(scaled.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(std::abs(scaled[i] - std::abs(a) * base[i]) <= 1e-9 * std::abs(a) * base[i]);
    }
  }
}

TEST_CASE("property: windowed frame energy does not exceed unwindowed energy") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const FrameSequence frames(noise(9000, seed), 1024, 512, Window::hann);
    for (std::size_t i = 0; i < frames.count(); ++i) {
      const auto raw = frames.frame(i);
      const auto win = frames.windowed(i);
      const double e_raw = std::inner_product(raw.begin(), raw.end(), raw.begin(), 0.0);
      const double e_win = std::inner_product(win.begin(), win.end(), win.begin(), 0.0);
      CHECK(e_win <= e_raw + 1e-12);
    }
  }
}

TEST_CASE("windows lie in [0, 1]") {
  for (auto w : {Window::rectangular, Window::hann}) {
    for (double v : make_window(w, 1000)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}
