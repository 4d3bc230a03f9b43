#include "sdvc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdvc/error.hpp"
#include "sdvc/simd/kernels.hpp"

namespace sdvc {

void Waveform::validate() const {
  for (double s : samples) {
    require(std::isfinite(s), ErrorKind::InvalidArgument, "waveform contains a non-finite sample");
  }
}

std::vector<double> analysis_window(std::size_t len, Window kind) {
  std::vector<double> w(len, 1.0);
  if (kind == Window::Hann) {
    for (std::size_t n = 0; n < len; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(len));
    }
  }
  return w;
}

std::size_t frame_count(std::size_t num_samples, std::size_t hop) {
  return (num_samples + hop - 1) / hop;
}

std::vector<Spectrum> stft(const Waveform& wave, const AnalysisConfig& cfg, Window window) {
  cfg.validate();
  require(wave.sample_rate == cfg.sample_rate, ErrorKind::SampleRateMismatch,
          "waveform is " + std::to_string(wave.sample_rate) + " Hz, analysis expects " +
              std::to_string(cfg.sample_rate) + " Hz");
  require(!wave.empty(), ErrorKind::EmptyInput, "stft of an empty waveform");

  const auto w = analysis_window(cfg.window_len, window);
  const auto& plan = fft_plan(cfg.fft_len);
  const std::size_t frames = frame_count(wave.size(), cfg.hop);
  std::vector<Spectrum> out(frames, Spectrum(cfg.fft_len));
  for (std::size_t t = 0; t < frames; ++t) {
    auto& frame = out[t];
    const std::size_t start = t * cfg.hop;
    const std::size_t avail = std::min(cfg.window_len, wave.size() - start);
    for (std::size_t n = 0; n < avail; ++n) frame[n] = wave.samples[start + n] * w[n];
    plan.forward(frame);
  }
  return out;
}

namespace {

// Linear convolution of one block through the FFT, added into y.
class FftConvolver {
public:
  void add(std::span<const double> x, std::span<const double> h, double* y) {
    const std::size_t out_len = x.size() + h.size() - 1;
    std::size_t m = 1;
    while (m < out_len) m *= 2;
    const auto& plan = fft_plan(m);
    xs_.assign(m, Complex{});
    hs_.assign(m, Complex{});
    std::copy(x.begin(), x.end(), xs_.begin());
    std::copy(h.begin(), h.end(), hs_.begin());
    plan.forward(xs_);
    plan.forward(hs_);
    simd::kernels().complex_mul(reinterpret_cast<const double*>(xs_.data()),
                                reinterpret_cast<const double*>(hs_.data()),
                                reinterpret_cast<double*>(xs_.data()), m);
    plan.inverse(xs_);
    for (std::size_t n = 0; n < out_len; ++n) y[n] += xs_[n].real();
  }

private:
  ComplexVector xs_;
  ComplexVector hs_;
};

}  // namespace

Waveform ola_filter(const Waveform& wave, std::span<const DifferentialFilter> filters,
                    const AnalysisConfig& cfg, ConvolutionMode mode) {
  const std::size_t frames = frame_count(wave.size(), cfg.hop);
  require(filters.size() == frames, ErrorKind::LengthMismatch,
          std::to_string(filters.size()) + " filters for " + std::to_string(frames) + " frames");

  std::size_t max_taps = 0, max_lead = 0;
  for (const auto& f : filters) {
    require(!f.taps.empty() && f.taps.size() <= cfg.fft_len && f.lead < f.taps.size(),
            ErrorKind::InvalidArgument, "filter length must be in [1, fft_len]");
    max_taps = std::max(max_taps, f.taps.size());
    max_lead = std::max(max_lead, f.lead);
  }

  // Output is written max_lead samples late so two-sided filters can reach
  // back before the block start; the offset is dropped at the end.
  std::vector<double> y(max_lead + wave.size() + (max_taps > 0 ? max_taps - 1 : 0), 0.0);
  const auto& kern = simd::kernels();
  FftConvolver fft;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * cfg.hop;
    const std::size_t len = std::min(cfg.hop, wave.size() - start);
    const std::span<const double> block(wave.samples.data() + start, len);
    const std::span<const double> taps(filters[t].taps);
    double* out = y.data() + max_lead + start - filters[t].lead;
    const bool direct = mode == ConvolutionMode::Direct ||
                        (mode == ConvolutionMode::Auto && taps.size() <= kDirectTapLimit);
    if (direct) {
      kern.convolve_add(block.data(), block.size(), taps.data(), taps.size(), out);
    } else {
      fft.add(block, taps, out);
    }
  }
  y.erase(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(max_lead));
  y.resize(wave.size());
  return Waveform{std::move(y), wave.sample_rate};
}

}  // namespace sdvc
