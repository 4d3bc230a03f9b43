#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdvc/config.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

/// Low-order real cepstrum, quefrencies 0 .. cep_dim - 1.
using Cepstrum = std::vector<double>;

/// Magnitudes are floored here before the log so every frame has a cepstrum.
inline constexpr double kMagnitudeFloor = 1e-10;

/// Quefrency weighting applied to a cepstrum before it is turned back into a
/// spectrum. Holds cep_dim coefficients; only the first cep_dim quefrencies
/// are ever nonzero.
struct Lifter {
  std::vector<double> coeffs;
  bool trainable = false;

  /// First cep_dim entries of minimum_phase_lifter(fft_len).
  static Lifter minimum_phase(std::size_t fft_len, std::size_t cep_dim, bool trainable = false);

  std::size_t size() const noexcept { return coeffs.size(); }
};

/// First cep_dim entries of idft(log(max(|frame|, floor))).
Cepstrum real_cepstrum(std::span<const Complex> frame, const AnalysisConfig& cfg);

/// 1 at n = 0 and n = N/2, 2 for 0 < n < N/2, 0 above N/2.
std::vector<double> minimum_phase_lifter(std::size_t n);

/// exp(dft(zero_pad(lifter * cep, fft_len))), element by element.
Spectrum reconstruct_spectrum(std::span<const double> cep, const Lifter& lifter,
                              const AnalysisConfig& cfg);

}  // namespace sdvc
