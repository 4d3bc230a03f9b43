#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdvc/config.hpp"
#include "sdvc/fft.hpp"

namespace sdvc {

/// Mono audio in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  /// Throws ErrorKind::InvalidArgument on a non-finite sample.
  void validate() const;
};

/// Complex spectrum of one analysis frame (fft_len bins).
using Spectrum = ComplexVector;

/// Per-frame FIR response, either the full fft_len taps or a truncated prefix.
struct DifferentialFilter {
  std::vector<double> taps;
  std::size_t frame_index = 0;
  /// Largest |imag| discarded when the response was taken from an inverse DFT.
  double imag_residual = 0.0;
  /// Taps ahead of lag zero: taps[lead] multiplies the current sample. 0 for
  /// causal filters.
  std::size_t lead = 0;
};

enum class Window { Hann, Rectangular };

/// Periodic Hann (0.5 - 0.5 cos(2 pi n / len)) or all-ones.
std::vector<double> analysis_window(std::size_t len, Window kind);

/// ceil(num_samples / hop)
std::size_t frame_count(std::size_t num_samples, std::size_t hop);

/// Frame t covers samples [t * hop, t * hop + window_len), windowed and
/// zero-padded to fft_len; samples past the end count as zero.
std::vector<Spectrum> stft(const Waveform& wave, const AnalysisConfig& cfg,
                           Window window = Window::Hann);

enum class ConvolutionMode {
  Auto,    // FFT when the filter is longer than kDirectTapLimit taps
  Direct,  // time-domain kernel
  Fft,
};

inline constexpr std::size_t kDirectTapLimit = 64;

/// Time-varying FIR filtering. The hop-length block starting at t * hop is
/// convolved with filters[t] and the full result (tail included) is added at
/// offset t * hop - filters[t].lead; the output is trimmed back to the input
/// length.
Waveform ola_filter(const Waveform& wave, std::span<const DifferentialFilter> filters,
                    const AnalysisConfig& cfg, ConvolutionMode mode = ConvolutionMode::Auto);

}  // namespace sdvc
