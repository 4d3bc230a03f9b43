#include "sdvc/filter_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdvc/error.hpp"

namespace sdvc {

void SubbandGate::validate(int sample_rate) const {
  require(crossover_hz > 0.0 && crossover_hz < 0.5 * sample_rate, ErrorKind::InvalidArgument,
          "gate crossover must lie in (0, sample_rate / 2)");
  require(steepness_hz >= 0.0 && std::isfinite(steepness_hz), ErrorKind::InvalidArgument,
          "gate steepness must be finite and non-negative");
}

double SubbandGate::weight(double freq_hz) const {
  if (steepness_hz == 0.0) {
    if (freq_hz < crossover_hz) return 1.0;
    return freq_hz > crossover_hz ? 0.0 : 0.5;
  }
  return 1.0 / (1.0 + std::exp(-(crossover_hz - freq_hz) / steepness_hz));
}

std::vector<double> gate_weights(const SubbandGate& gate, const AnalysisConfig& cfg) {
  const std::size_t n = cfg.fft_len;
  std::vector<double> g(n);
  const double bin_hz = static_cast<double>(cfg.sample_rate) / static_cast<double>(n);
  for (std::size_t k = 0; k <= n / 2; ++k) g[k] = gate.weight(static_cast<double>(k) * bin_hz);
  for (std::size_t k = n / 2 + 1; k < n; ++k) g[k] = g[n - k];
  return g;
}

Spectrum subband_gate(std::span<const Complex> spec_d, const SubbandGate& gate,
                      const AnalysisConfig& cfg) {
  require(spec_d.size() == cfg.fft_len, ErrorKind::LengthMismatch,
          "gated spectrum must have fft_len bins");
  const auto g = gate_weights(gate, cfg);
  Spectrum out(spec_d.begin(), spec_d.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (g[k] == 1.0) continue;
    out[k] = g[k] == 0.0 ? Complex{1.0, 0.0} : 1.0 + g[k] * (spec_d[k] - 1.0);
  }
  return out;
}

DifferentialFilter impulse_response(std::span<const Complex> spectrum, std::size_t frame_index) {
  const auto h = idft(spectrum);
  DifferentialFilter f{std::vector<double>(h.size()), frame_index, 0.0};
  for (std::size_t n = 0; n < h.size(); ++n) {
    f.taps[n] = h[n].real();
    f.imag_residual = std::max(f.imag_residual, std::abs(h[n].imag()));
  }
  return f;
}

DifferentialFilter design_filter(std::span<const double> cep_d, const Lifter& lifter,
                                 const AnalysisConfig& cfg, const SubbandGate* gate,
                                 std::size_t frame_index) {
  auto spec = reconstruct_spectrum(cep_d, lifter, cfg);
  if (gate == nullptr) return impulse_response(spec, frame_index);
  auto f = impulse_response(subband_gate(spec, *gate, cfg), frame_index);
  f.lead = two_sided_lead(f.taps.size());
  std::rotate(f.taps.begin(), f.taps.end() - static_cast<std::ptrdiff_t>(f.lead), f.taps.end());
  return f;
}

std::vector<double> truncation_window(std::size_t n, std::size_t taps, std::size_t lead) {
  require(taps > 0 && taps <= n && lead < taps, ErrorKind::InvalidArgument,
          "truncation length out of range");
  std::vector<double> w(n, 0.0);
  std::fill_n(w.begin(), taps - lead, 1.0);
  std::fill(w.end() - static_cast<std::ptrdiff_t>(lead), w.end(), 1.0);
  return w;
}

DifferentialFilter truncate(const DifferentialFilter& filter, std::size_t taps) {
  require(taps > 0 && taps <= filter.taps.size(), ErrorKind::InvalidArgument,
          "cannot truncate a " + std::to_string(filter.taps.size()) + "-tap filter to " +
              std::to_string(taps) + " taps");
  DifferentialFilter out = filter;
  if (filter.lead == 0) {
    out.taps.resize(taps);
    return out;
  }
  out.lead = std::min(filter.lead, two_sided_lead(taps));
  const std::size_t first = filter.lead - out.lead;
  require(first + taps <= filter.taps.size(), ErrorKind::InvalidArgument,
          "filter has too few causal taps for a " + std::to_string(taps) + "-tap window");
  const auto begin = filter.taps.begin() + static_cast<std::ptrdiff_t>(first);
  out.taps.assign(begin, begin + static_cast<std::ptrdiff_t>(taps));
  return out;
}

Spectrum truncated_spectrum(const DifferentialFilter& filter, const AnalysisConfig& cfg) {
  require(filter.taps.size() <= cfg.fft_len, ErrorKind::LengthMismatch,
          "filter longer than fft_len");
  const std::size_t n = cfg.fft_len;
  Spectrum spec(n);
  for (std::size_t m = 0; m < filter.taps.size(); ++m) {
    spec[(m + n - filter.lead) % n] = filter.taps[m];
  }
  fft_plan(n).forward(spec);
  return spec;
}

double energy_ratio(std::span<const double> taps, std::size_t keep) {
  double head = 0.0, total = 0.0;
  for (std::size_t n = 0; n < taps.size(); ++n) {
    const double e = taps[n] * taps[n];
    total += e;
    if (n < keep) head += e;
  }
  return total > 0.0 ? head / total : 1.0;
}

}  // namespace sdvc
