#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sdvc/cepstral.hpp"
#include "sdvc/config.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

/// Sigmoid crossover that keeps the differential filter below `crossover_hz`
/// and fades it to the identity above. Per bin with frequency f the weight is
/// g = sigmoid((crossover - f) / steepness) and the gated bin is 1 + g (F - 1).
/// steepness 0 selects a hard step (g = 1 below, 0 above, 0.5 at crossover).
struct SubbandGate {
  double crossover_hz = 8000.0;
  double steepness_hz = 200.0;

  /// 0 < crossover < sample_rate / 2 and steepness >= 0.
  void validate(int sample_rate) const;
  double weight(double freq_hz) const;
};

/// Per-bin gate weights for all fft_len bins; bins above N/2 mirror their
/// conjugate partner so a real response stays real.
std::vector<double> gate_weights(const SubbandGate& gate, const AnalysisConfig& cfg);

/// Applies the gate to a differential spectrum. Bins with g == 1 are copied
/// through untouched and bins with g == 0 become exactly 1.
Spectrum subband_gate(std::span<const Complex> spec_d, const SubbandGate& gate,
                      const AnalysisConfig& cfg);

/// Real part of idft(spectrum); the largest discarded |imag| is recorded.
DifferentialFilter impulse_response(std::span<const Complex> spectrum,
                                    std::size_t frame_index = 0);

/// Negative lags kept by an l-tap two-sided filter.
constexpr std::size_t two_sided_lead(std::size_t taps) noexcept { return taps / 4; }

/// Full-length (fft_len) differential filter for one frame. When `gate` is
/// given it is applied to the spectrum before the inverse transform. Gating
/// turns the minimum-phase response into a two-sided one, so the gated filter
/// is returned with lead two_sided_lead(fft_len): lags [-N/4, 3N/4).
DifferentialFilter design_filter(std::span<const double> cep_d, const Lifter& lifter,
                                 const AnalysisConfig& cfg, const SubbandGate* gate = nullptr,
                                 std::size_t frame_index = 0);

/// Binary window over circular lags with ones on [-lead, taps - lead).
std::vector<double> truncation_window(std::size_t n, std::size_t taps, std::size_t lead = 0);

/// Keeps `taps` coefficients. Causal filters keep their first taps; two-sided
/// filters keep lags [-two_sided_lead(taps), taps - two_sided_lead(taps)).
/// Requires 0 < taps <= filter length.
DifferentialFilter truncate(const DifferentialFilter& filter, std::size_t taps);

/// dft of the taps placed at their circular lags in an fft_len buffer.
Spectrum truncated_spectrum(const DifferentialFilter& filter, const AnalysisConfig& cfg);

/// Share of the filter energy held by the first `taps` coefficients.
double energy_ratio(std::span<const double> taps, std::size_t keep);

}  // namespace sdvc
