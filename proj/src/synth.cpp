#include "sdvc/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/error.hpp"
#include "sdvc/filter_design.hpp"
#include "sdvc/simd/kernels.hpp"

namespace sdvc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSourcePeak = 0.25;
constexpr std::size_t kDesignLen = 4096;
constexpr double kFadeSeconds = 0.03;

// Two-pole resonator with unit gain at DC.
class Resonator {
public:
  void tune(double freq_hz, double bandwidth_hz, double fs) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / fs);
    a1_ = 2.0 * r * std::cos(kTwoPi * freq_hz / fs);
    a2_ = -r * r;
    g_ = 1.0 - a1_ - a2_;
  }
  double step(double x) {
    const double y = g_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

private:
  double a1_ = 0.0, a2_ = 0.0, g_ = 1.0, y1_ = 0.0, y2_ = 0.0;
};

struct Vowel {
  std::array<double, 4> formants;
};

Vowel random_vowel(Rng& rng) {
  return {{rng.uniform(300.0, 800.0), rng.uniform(900.0, 2200.0), rng.uniform(2300.0, 3000.0),
           rng.uniform(3300.0, 3900.0)}};
}

// Real cepstrum of a resonance pole pair at radius r: r^n cos(n w) / n.
double resonance_term(std::size_t n, double freq_hz, double radius, double fs) {
  const double w = kTwoPi * freq_hz / fs;
  return std::pow(radius, static_cast<double>(n)) * std::cos(static_cast<double>(n) * w) /
         static_cast<double>(n);
}

}  // namespace

Cepstrum reference_differential(const AnalysisConfig& cfg, const DifferentialShape& shape) {
  cfg.validate();
  Cepstrum cep(cfg.cep_dim, 0.0);
  const double fs = cfg.sample_rate;
  for (std::size_t n = 1; n < cfg.cep_dim; ++n) {
    cep[n] = shape.gain * (resonance_term(n, shape.boost_hz, shape.boost_radius, fs) -
                           resonance_term(n, shape.cut_hz, shape.cut_radius, fs));
  }
  cep[0] = shape.level;
  if (cfg.cep_dim > 1) cep[1] += shape.tilt;
  return cep;
}

Waveform synthesize_source(const AnalysisConfig& cfg, double duration_s, std::uint64_t seed,
                           double silence_s) {
  require(duration_s > 0.0, ErrorKind::InvalidArgument, "duration must be positive");
  Rng rng(seed);
  const double fs = cfg.sample_rate;
  const auto total = static_cast<std::size_t>(duration_s * fs);
  const auto gap = static_cast<std::size_t>(silence_s * fs);
  require(total > 3 * gap + 4 * static_cast<std::size_t>(kFadeSeconds * fs) + cfg.window_len, ErrorKind::InvalidArgument,
          "duration too short for the requested silences");

  const double base_f0 = rng.uniform(100.0, 180.0);
  const double ph1 = rng.uniform(0.0, kTwoPi), ph2 = rng.uniform(0.0, kTwoPi);
  const double env_phase = rng.uniform(0.0, kTwoPi);
  std::array<Resonator, 4> formants;
  const std::array<double, 4> bandwidths{80.0, 100.0, 130.0, 170.0};
  Vowel from = random_vowel(rng), to = random_vowel(rng);
  auto seg_len = static_cast<std::size_t>(rng.uniform(0.12, 0.25) * fs);
  std::size_t seg_pos = 0;
  const auto glide = static_cast<std::size_t>(0.04 * fs);

  std::vector<double> out(total, 0.0);
  double phase = 0.0, glottal = 0.0;
  const std::size_t mid_gap_start = total / 2 - gap / 2;
  for (std::size_t i = 0; i < total; ++i) {
    const double t = static_cast<double>(i) / fs;
    if (seg_pos >= seg_len) {
      from = to;
      to = random_vowel(rng);
      seg_len = static_cast<std::size_t>(rng.uniform(0.12, 0.25) * fs);
      seg_pos = 0;
    }
    const double mix = std::min(1.0, static_cast<double>(seg_pos) / static_cast<double>(glide));
    ++seg_pos;
    if (i % 32 == 0) {
      for (std::size_t k = 0; k < formants.size(); ++k) {
        formants[k].tune(from.formants[k] + mix * (to.formants[k] - from.formants[k]),
                         bandwidths[k], fs);
      }
    }

    const double f0 = base_f0 * (1.0 + 0.12 * std::sin(kTwoPi * 0.7 * t + ph1) +
                                 0.04 * std::sin(kTwoPi * 2.3 * t + ph2));
    phase += f0 / fs;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    glottal = 0.8 * glottal + pulse;
    double x = glottal + 0.03 * rng.normal();
    for (auto& f : formants) x = f.step(x);
    const double env = 0.65 + 0.35 * std::sin(kTwoPi * 3.1 * t + env_phase);
    out[i] = x * env;
  }

  // Speech regions [gap, mid_gap_start) and [mid_gap_start + gap, total - gap)
  // fade in and out with raised-cosine ramps; everything else is silent.
  const auto ramp = static_cast<std::size_t>(kFadeSeconds * fs);
  auto fade = [&](std::size_t i, std::size_t begin, std::size_t end) {
    if (i < begin || i >= end) return 0.0;
    const std::size_t edge = std::min(i - begin, end - 1 - i);
    if (edge >= ramp) return 1.0;
    return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) / static_cast<double>(ramp));
  };
  for (std::size_t i = 0; i < total; ++i) {
    out[i] *= fade(i, gap, mid_gap_start) + fade(i, mid_gap_start + gap, total - gap);
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (auto& v : out) v *= kSourcePeak / peak;
  }
  return Waveform{std::move(out), cfg.sample_rate};
}

Waveform apply_cepstral_filter(const Waveform& wave, const Cepstrum& cep, const AnalysisConfig& cfg) {
  AnalysisConfig design = cfg;
  design.fft_len = std::max(kDesignLen, cfg.fft_len);
  const auto lifter = Lifter::minimum_phase(design.fft_len, design.cep_dim);
  const auto h = design_filter(cep, lifter, design);
  std::vector<double> y(wave.size() + h.taps.size() - 1, 0.0);
  simd::kernels().convolve_add(wave.samples.data(), wave.size(), h.taps.data(), h.taps.size(),
                               y.data());
  y.resize(wave.size());
  return Waveform{std::move(y), wave.sample_rate};
}

std::vector<SpeakerPair> synthesize_pairs(const AnalysisConfig& cfg, const SynthOptions& opts,
                                          const DifferentialShape& shape) {
  const auto base = reference_differential(cfg, shape);
  Rng jitter_rng(opts.seed ^ 0x5DEECE66Dull);
  std::vector<SpeakerPair> pairs;
  pairs.reserve(opts.utterances);
  for (std::size_t u = 0; u < opts.utterances; ++u) {
    auto source = synthesize_source(cfg, opts.duration_s, opts.seed * 1000003ull + u, opts.silence_s);
    Cepstrum diff = base;
    for (std::size_t n = 1; n < diff.size(); ++n) {
      diff[n] += opts.jitter * jitter_rng.normal() / static_cast<double>(n);
    }
    auto target = apply_cepstral_filter(source, diff, cfg);
    pairs.push_back({std::move(source), std::move(target)});
  }
  return pairs;
}

}  // namespace sdvc
