#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/filter_design.hpp"
#include "sdvc/spectral.hpp"
#include "sdvc/training.hpp"

namespace sdvc {

struct ConvertOptions {
  std::size_t taps = 0;  // 0: the model's trained_taps (fft_len if unset)
  std::optional<SubbandGate> gate;
  ConvolutionMode mode = ConvolutionMode::Auto;
  double clamp = 1.0;  // output samples are limited to [-clamp, clamp]
};

struct ConvertResult {
  Waveform wave;
  std::size_t frames = 0;
  std::size_t clipped = 0;     // samples limited by the safety clamp
  std::size_t non_finite = 0;  // samples replaced by 0
  double max_imag_residual = 0.0;
};

/// Full conversion of one utterance: STFT, per-frame cepstra, model inference,
/// filter design with the model's lifter, optional gate, truncation and
/// overlap-add filtering.
ConvertResult convert(const Waveform& wave, const AcousticModel& model,
                      const ConvertOptions& opts = {});

struct UtteranceMetrics {
  std::string name;
  std::size_t frames = 0;
  double rmse = 0.0;
};

struct MetricsReport {
  std::size_t taps = 0;
  std::vector<UtteranceMetrics> utterances;
  std::size_t frames = 0;
  double rmse = 0.0;  // sqrt(total squared error / total frames)

  /// Rows taps,utterance,frames,rmse with an "ALL" row last.
  std::string to_csv(bool header = true) const;
};

/// Truncation-aware RMSE over aligned test pairs. `lifter` defaults to the
/// model's own lifter.
MetricsReport eval_rmse(const AcousticModel& model, std::span<const AlignedPair> pairs,
                        std::span<const std::string> names, std::size_t taps,
                        std::optional<std::vector<double>> lifter = std::nullopt,
                        const SubbandGate* gate = nullptr);

/// Mean over frames of the normalized cumulative energy of the full-length
/// differential filter; entry n covers taps 0..n.
std::vector<double> cumulative_power(const AcousticModel& model,
                                     std::span<const AlignedPair> pairs);

/// Number of leading taps needed for the curve to reach `level`.
std::size_t taps_to_reach(std::span<const double> curve, double level);

std::string cumulative_power_csv(std::span<const double> curve);

struct BenchOptions {
  std::vector<std::size_t> taps;
  double duration_s = 10.0;
  std::size_t repeats = 5;
  ConvolutionMode mode = ConvolutionMode::Direct;
  std::uint64_t seed = 3;
};

struct BenchRow {
  std::size_t taps = 0;
  double median_s = 0.0;
  double ns_per_sample = 0.0;
  double speedup = 0.0;  // relative to taps == fft_len
};

/// Median-of-repeats wall time of ola_filter on noise with random decaying
/// filters. The fft_len case is always measured for the speedup reference.
std::vector<BenchRow> bench_filtering(const BenchOptions& opts, const AnalysisConfig& cfg);

std::string bench_csv(std::span<const BenchRow> rows);

/// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

}  // namespace sdvc
