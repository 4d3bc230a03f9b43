#include "sdvc/config.hpp"

#include <string>

#include "sdvc/error.hpp"

namespace sdvc {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

AnalysisConfig AnalysisConfig::narrow_band() { return {16000, 400, 80, 512, 40}; }

AnalysisConfig AnalysisConfig::full_band() { return {48000, 1200, 240, 2048, 120}; }

AnalysisConfig AnalysisConfig::for_rate(int sample_rate) {
  if (sample_rate == 16000) return narrow_band();
  if (sample_rate == 48000) return full_band();
  fail(ErrorKind::Unsupported, "no analysis preset for " + std::to_string(sample_rate) + " Hz");
}

void AnalysisConfig::validate() const {
  require(sample_rate > 0 && window_len > 0 && hop > 0 && fft_len > 0 && cep_dim > 0,
          ErrorKind::InvalidArgument, "analysis config fields must be positive");
  require(is_power_of_two(fft_len), ErrorKind::InvalidArgument,
          "fft_len must be a power of two, got " + std::to_string(fft_len));
  require(window_len <= fft_len, ErrorKind::InvalidArgument, "window_len exceeds fft_len");
  require(hop <= window_len, ErrorKind::InvalidArgument, "hop exceeds window_len");
  require(cep_dim <= fft_len / 2, ErrorKind::InvalidArgument, "cep_dim exceeds fft_len / 2");
}

}  // namespace sdvc
