#pragma once

#include <cstddef>

namespace sdvc {

/// Frame-level analysis parameters shared by every stage of the pipeline.
///
/// Two presets cover the supported bandwidths: narrow band (16 kHz, 512-point
/// FFT, 40 cepstral coefficients) and full band (48 kHz, 2048-point FFT,
/// 120 coefficients). Both use a 25 ms window with a 5 ms shift.
struct AnalysisConfig {
  int sample_rate = 16000;
  std::size_t window_len = 400;
  std::size_t hop = 80;
  std::size_t fft_len = 512;
  std::size_t cep_dim = 40;

  static AnalysisConfig narrow_band();
  static AnalysisConfig full_band();
  /// Preset for `sample_rate` (16000 or 48000).
  static AnalysisConfig for_rate(int sample_rate);

  /// Throws ErrorKind::InvalidArgument unless window_len <= fft_len,
  /// hop <= window_len, cep_dim <= fft_len / 2, fft_len is a power of two
  /// and every field is positive.
  void validate() const;

  bool operator==(const AnalysisConfig&) const = default;
};

bool is_power_of_two(std::size_t n);

}  // namespace sdvc
