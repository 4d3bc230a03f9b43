#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdvc/cepstral.hpp"
#include "sdvc/config.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

/// Synthetic "speaker pair" corpus for desk-scale runs.
///
/// A source utterance is a glottal pulse train with drifting pitch plus
/// aspiration noise, shaped by drifting formant resonators, with silent gaps.
/// Its target is the same waveform passed through a fixed minimum-phase
/// filter whose cepstrum is `differential` (a formant shift plus a tilt),
/// optionally perturbed per utterance by random cepstral jitter that the
/// source gives no way to predict.
struct SynthOptions {
  std::size_t utterances = 8;
  double duration_s = 2.0;
  std::uint64_t seed = 7;
  /// Standard deviation of the per-utterance jitter on coefficient n is
  /// jitter / n (coefficient 0 is never jittered).
  double jitter = 0.0;
  /// Leading, trailing and one internal gap of digital silence.
  double silence_s = 0.12;
};

struct DifferentialShape {
  double level = -1.0;          // coefficient 0 (log gain)
  double tilt = -0.25;          // coefficient 1 offset
  double boost_hz = 1200.0;     // resonance added to the target
  double boost_radius = 0.96;
  double cut_hz = 2600.0;       // resonance removed from the target
  double cut_radius = 0.94;
  double gain = 1.25;           // weight of both resonance terms
};

/// Cepstrum (cep_dim coefficients) of the fixed source-to-target filter.
Cepstrum reference_differential(const AnalysisConfig& cfg, const DifferentialShape& shape = {});

struct SpeakerPair {
  Waveform source;
  Waveform target;
};

std::vector<SpeakerPair> synthesize_pairs(const AnalysisConfig& cfg, const SynthOptions& opts,
                                          const DifferentialShape& shape = {});

/// Source-style utterance alone (used for conversion and benchmarks).
Waveform synthesize_source(const AnalysisConfig& cfg, double duration_s, std::uint64_t seed,
                           double silence_s = 0.0);

/// Applies the minimum-phase filter of a cep_dim cepstrum to a whole signal
/// (time-invariant, 4096-point design).
Waveform apply_cepstral_filter(const Waveform& wave, const Cepstrum& cep, const AnalysisConfig& cfg);

}  // namespace sdvc
