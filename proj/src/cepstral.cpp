#include "sdvc/cepstral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdvc/error.hpp"

namespace sdvc {

Lifter Lifter::minimum_phase(std::size_t fft_len, std::size_t cep_dim, bool trainable) {
  require(cep_dim <= fft_len, ErrorKind::InvalidArgument, "lifter longer than the transform");
  auto full = minimum_phase_lifter(fft_len);
  full.resize(cep_dim);
  return Lifter{std::move(full), trainable};
}

Cepstrum real_cepstrum(std::span<const Complex> frame, const AnalysisConfig& cfg) {
  require(frame.size() == cfg.fft_len, ErrorKind::LengthMismatch,
          "frame has " + std::to_string(frame.size()) + " bins, expected " +
              std::to_string(cfg.fft_len));
  ComplexVector logmag(frame.size());
  for (std::size_t k = 0; k < frame.size(); ++k) {
    logmag[k] = std::log(std::max(std::abs(frame[k]), kMagnitudeFloor));
  }
  fft_plan(cfg.fft_len).inverse(logmag);
  Cepstrum out(cfg.cep_dim);
  for (std::size_t n = 0; n < cfg.cep_dim; ++n) out[n] = logmag[n].real();
  return out;
}

std::vector<double> minimum_phase_lifter(std::size_t n) {
  require(n >= 4 && n % 2 == 0, ErrorKind::InvalidArgument,
          "minimum-phase lifter needs an even length >= 4, got " + std::to_string(n));
  std::vector<double> u(n, 0.0);
  u[0] = 1.0;
  for (std::size_t i = 1; i < n / 2; ++i) u[i] = 2.0;
  u[n / 2] = 1.0;
  return u;
}

Spectrum reconstruct_spectrum(std::span<const double> cep, const Lifter& lifter,
                              const AnalysisConfig& cfg) {
  require(cep.size() == cfg.cep_dim && lifter.size() == cfg.cep_dim, ErrorKind::LengthMismatch,
          "cepstrum and lifter must both have cep_dim = " + std::to_string(cfg.cep_dim) +
              " coefficients");
  Spectrum spec(cfg.fft_len);
  for (std::size_t n = 0; n < cep.size(); ++n) spec[n] = lifter.coeffs[n] * cep[n];
  fft_plan(cfg.fft_len).forward(spec);
  for (auto& z : spec) z = std::exp(z);
  return spec;
}

}  // namespace sdvc
