#include "pitchfield/inharmonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pitchfield/cents.hpp"
#include "pitchfield/error.hpp"
#include "pitchfield/pitch.hpp"

namespace pitchfield {

std::string_view to_string(Harmonicity h) {
  switch (h) {
    case Harmonicity::harmonic: return "harmonic";
    case Harmonicity::quasi_harmonic: return "quasi_harmonic";
    case Harmonicity::inharmonic: return "inharmonic";
  }
  return "unknown";
}

namespace {

// Fundamental of the least-deviating series, falling back to the lowest partial.
double reference_f0(const ComplexToneSnapshot& snapshot, double tolerance, double min_f0) {
  if (auto f = f0_gcd(snapshot, {tolerance, min_f0})) return *f;
  return snapshot.lowest().frequency;
}

constexpr double kSlack = 1e-9;

}  // namespace

InharmonicityReport inharmonicity(const ComplexToneSnapshot& snapshot,
                                  const InharmonicityParams& params) {
  if (snapshot.partials.size() < 2) throw Error("insufficient partials");
  InharmonicityReport report;
  report.f0_ref = reference_f0(snapshot, params.series_tolerance_cents, params.min_f0);
  const auto harmonics = assign_harmonics(snapshot, report.f0_ref);

  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    const double dev = cents(snapshot.partials[i].frequency, harmonics[i] * report.f0_ref);
    report.partials.push_back({snapshot.partials[i].frequency, harmonics[i], dev});
    report.max_abs_deviation_cents = std::max(report.max_abs_deviation_cents, std::abs(dev));
  }

  // (f_n / n)² = f0² + f0²·B·n² is linear in n².
  const auto distinct = std::set<int>(harmonics.begin(), harmonics.end()).size();
  if (harmonics.size() >= 3 && distinct >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(harmonics.size());
    for (std::size_t i = 0; i < harmonics.size(); ++i) {
      const double n = harmonics[i];
      const double x = n * n;
      const double y = std::pow(snapshot.partials[i].frequency / n, 2.0);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    if (intercept > 0.0) {
      report.stretch_f0 = std::sqrt(intercept);
      report.stretch_b = slope / intercept;
      double acc = 0.0;
      for (std::size_t i = 0; i < harmonics.size(); ++i) {
        const double n = harmonics[i];
        const double model = n * *report.stretch_f0 * std::sqrt(std::max(0.0, 1.0 + *report.stretch_b * n * n));
        const double e = model > 0.0 ? cents(snapshot.partials[i].frequency, model) : 0.0;
        acc += e * e;
      }
      report.fit_residual_cents = std::sqrt(acc / m);
    }
  }

  if (report.max_abs_deviation_cents <= params.harmonic_max_cents + kSlack) {
    report.classification = Harmonicity::harmonic;
  } else if (report.max_abs_deviation_cents <= params.quasi_harmonic_max_cents + kSlack) {
    report.classification = Harmonicity::quasi_harmonic;
  } else {
    report.classification = Harmonicity::inharmonic;
  }
  return report;
}

SalienceReport detect_salient_partials(const ComplexToneSnapshot& snapshot,
                                       const LoudnessContour* contour,
                                       const SalienceParams& params) {
  SalienceReport report;
  if (snapshot.partials.empty()) return report;
  const double f0 = reference_f0(snapshot, params.series_tolerance_cents, params.min_f0);
  const auto harmonics = assign_harmonics(snapshot, f0);

  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    const auto& p = snapshot.partials[i];
    const double weighted = p.magnitude * (contour ? contour->gain(p.frequency) : 1.0);
    const double db = 20.0 * std::log10(std::max(weighted, std::numeric_limits<double>::min()));
    report.partials.push_back({harmonics[i], p.frequency, db});
  }
  report.fundamental_frequency = report.partials.front().frequency;
  report.fundamental_weighted_db = report.partials.front().weighted_db;

  const double bar = report.fundamental_weighted_db + params.margin_db;
  for (std::size_t i = 0; i < report.partials.size(); ++i) {
    const bool is_fundamental = i == 0;
    if (is_fundamental ? params.margin_db < 0.0 : report.partials[i].weighted_db >= bar) {
      report.salient.insert(report.partials[i].harmonic);
    }
  }

  // Runs of consecutive salient harmonic numbers.
  std::vector<int> run;
  auto flush = [&] {
    if (run.size() >= params.min_carrier_run) {
      double wsum = 0.0, fsum = 0.0;
      for (const auto& p : report.partials) {
        if (std::find(run.begin(), run.end(), p.harmonic) == run.end()) continue;
        const double w = std::pow(10.0, p.weighted_db / 20.0);
        wsum += w;
        fsum += w * p.frequency;
      }
      report.carriers.push_back({run, wsum > 0.0 ? fsum / wsum : 0.0});
    }
    run.clear();
  };
  for (int h : report.salient) {
    if (!run.empty() && h != run.back() + 1) flush();
    run.push_back(h);
  }
  flush();
  return report;
}

OddHarmonicProfile odd_harmonic_profile(const ComplexToneSnapshot& snapshot,
                                        const InharmonicityParams& params) {
  if (snapshot.partials.size() < 4) throw Error("insufficient partials");
  OddHarmonicProfile profile;
  const auto f0 = f0_gcd(snapshot, {params.series_tolerance_cents, params.min_f0});
  const double ref = f0 ? *f0 : snapshot.lowest().frequency;
  const auto harmonics = assign_harmonics(snapshot, ref);
  bool assignable = f0.has_value();
  for (std::size_t i = 0; i < harmonics.size(); ++i) {
    const auto& p = snapshot.partials[i];
    if (std::abs(cents(p.frequency, harmonics[i] * ref)) > params.series_tolerance_cents) {
      assignable = false;
    }
    const double e = p.magnitude * p.magnitude;
    (harmonics[i] % 2 == 1 ? profile.odd_energy : profile.even_energy) += e;
  }
  profile.ratio = profile.even_energy > 0.0 ? profile.odd_energy / profile.even_energy
                                            : std::numeric_limits<double>::infinity();
  if (assignable) {
    profile.odd_dominant = profile.even_energy < 0.1 * profile.odd_energy;
  } else {
    profile.warning = "harmonic numbers assigned by nearest integer multiple of the lowest partial";
  }
  return profile;
}

}  // namespace pitchfield
