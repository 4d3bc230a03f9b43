#include "sdvc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdvc/error.hpp"
#include "sdvc/simd/kernels.hpp"

namespace sdvc {

namespace {

double* raw(ComplexVector& v) { return reinterpret_cast<double*>(v.data()); }

}  // namespace

TruncationChain::TruncationChain(const AnalysisConfig& cfg, std::size_t taps,
                                 std::optional<SubbandGate> gate)
    : cfg_(cfg), taps_(taps) {
  require(is_power_of_two(cfg.fft_len) && cfg.cep_dim > 0 && cfg.cep_dim <= cfg.fft_len / 2,
          ErrorKind::InvalidArgument, "chain needs a power-of-two fft_len and cep_dim <= fft_len/2");
  require(taps > 0 && taps <= cfg.fft_len, ErrorKind::InvalidArgument,
          "truncation length must be in [1, fft_len], got " + std::to_string(taps));
  const std::size_t n = cfg.fft_len;
  if (gate) {
    gate_ = gate_weights(*gate, cfg);
    lead_ = two_sided_lead(taps);
  }
  window_ = truncation_window(n, taps, lead_);
  kept_.resize(taps);
  diff_spec_.resize(n);
  converted_.resize(n);
  work_.resize(n);
  grad_.resize(n);
  filter_.resize(n);
  grad_filter_.resize(n);
  cep_hat_.resize(cfg.cep_dim);
}

double TruncationChain::forward(std::span<const double> cep_d, std::span<const double> lifter,
                                std::span<const Complex> spec_x, std::span<const double> cep_y) {
  const std::size_t n = cfg_.fft_len;
  const std::size_t c = cfg_.cep_dim;
  require(cep_d.size() == c && lifter.size() == c && cep_y.size() == c,
          ErrorKind::LengthMismatch, "chain inputs must have cep_dim coefficients");
  require(spec_x.size() == n, ErrorKind::LengthMismatch, "source spectrum must have fft_len bins");
  const auto& plan = fft_plan(n);
  const auto& k = simd::kernels();

  cep_d_.assign(cep_d.begin(), cep_d.end());
  lifter_.assign(lifter.begin(), lifter.end());
  cep_y_.assign(cep_y.begin(), cep_y.end());
  spec_x_.assign(spec_x.begin(), spec_x.end());

  std::fill(diff_spec_.begin(), diff_spec_.end(), Complex{});
  for (std::size_t i = 0; i < c; ++i) diff_spec_[i] = lifter[i] * cep_d[i];
  plan.forward(diff_spec_);
  for (auto& z : diff_spec_) z = std::exp(z);

  work_ = diff_spec_;
  if (!gate_.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (gate_[i] == 1.0) continue;
      work_[i] = gate_[i] == 0.0 ? Complex{1.0, 0.0} : 1.0 + gate_[i] * (diff_spec_[i] - 1.0);
    }
  }
  plan.inverse(work_);
  for (std::size_t i = 0; i < n; ++i) filter_[i] = work_[i].real();

  for (std::size_t i = 0; i < n; ++i) work_[i] = filter_[i] * window_[i];
  for (std::size_t m = 0; m < taps_; ++m) kept_[m] = filter_[(m + n - lead_) % n];
  plan.forward(work_);
  k.complex_mul(raw(spec_x_), raw(work_), raw(converted_), n);

  for (std::size_t i = 0; i < n; ++i) {
    work_[i] = std::log(std::max(std::abs(converted_[i]), kMagnitudeFloor));
  }
  plan.inverse(work_);
  double loss = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    cep_hat_[i] = work_[i].real();
    const double e = cep_y[i] - cep_hat_[i];
    loss += e * e;
  }
  return loss;
}

void TruncationChain::backward(double scale, std::span<double> grad_cep_d,
                               std::span<double> grad_lifter) {
  const std::size_t n = cfg_.fft_len;
  const std::size_t c = cfg_.cep_dim;
  require(grad_cep_d.size() == c && grad_lifter.size() == c, ErrorKind::LengthMismatch,
          "gradient buffers must have cep_dim entries");
  require(cep_d_.size() == c, ErrorKind::InvalidArgument, "backward() before forward()");
  const auto& plan = fft_plan(n);
  const auto& k = simd::kernels();
  const double inv_n = 1.0 / static_cast<double>(n);

  // d loss / d cep_hat, then through the real part of the inverse DFT:
  // d/d logmag[k] = (1/N) Re dft(g)[k].
  std::fill(grad_.begin(), grad_.end(), Complex{});
  for (std::size_t i = 0; i < c; ++i) grad_[i] = -2.0 * scale * (cep_y_[i] - cep_hat_[i]);
  plan.forward(grad_);

  // log|Y|: dY = g * Y / |Y|^2; zero where the floor was active.
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::abs(converted_[i]);
    const double g = grad_[i].real() * inv_n;
    grad_[i] = mag > kMagnitudeFloor ? g * converted_[i] / (mag * mag) : Complex{};
  }

  // Y = F_x * F_l
  k.complex_mul_conj(raw(grad_), raw(spec_x_), raw(grad_), n);

  // F_l = dft(w * f) with real f: d f[m] = Re sum_k dF[k] e^{+2 pi i k m / N}.
  plan.inverse(grad_);
  for (std::size_t i = 0; i < n; ++i) {
    grad_filter_[i] = grad_[i].real() * static_cast<double>(n) * window_[i];
  }

  // f = Re idft(S'): dS'[k] = (1/N) dft(df)[k].
  for (std::size_t i = 0; i < n; ++i) grad_[i] = grad_filter_[i] * inv_n;
  plan.forward(grad_);

  if (!gate_.empty()) {
    for (std::size_t i = 0; i < n; ++i) grad_[i] *= gate_[i];
  }

  // S = exp(Z): dZ = dS * conj(S).
  k.complex_mul_conj(raw(grad_), raw(diff_spec_), raw(grad_), n);

  // Z = dft(v) with real v: dv[m] = Re sum_k dZ[k] e^{+2 pi i k m / N}.
  plan.inverse(grad_);
  for (std::size_t i = 0; i < c; ++i) {
    const double gv = grad_[i].real() * static_cast<double>(n);
    grad_cep_d[i] += gv * lifter_[i];
    grad_lifter[i] += gv * cep_d_[i];
  }
}

void ChainGradients::zero() {
  std::fill(params.begin(), params.end(), 0.0);
  std::fill(lifter.begin(), lifter.end(), 0.0);
}

ChainOutput chain_loss(const AcousticModel& model, std::span<const double> lifter,
                       const FrameBatch& batch, TruncationChain& chain, Mode mode,
                       ChainGradients* grads, AcousticModel::Cache* cache) {
  const auto frames = batch.src_cep.cols();
  require(frames > 0, ErrorKind::EmptyInput, "empty batch");
  require(batch.tgt_cep.cols() == frames &&
              batch.src_spec.size() == static_cast<std::size_t>(frames),
          ErrorKind::LengthMismatch, "batch columns disagree");
  const std::size_t c = model.cep_dim();

  AcousticModel::Cache local;
  AcousticModel::Cache* used = cache != nullptr ? cache : (grads != nullptr ? &local : nullptr);
  const Matrix cep_d = model.forward(batch.src_cep, mode, used);

  ChainOutput out;
  out.converted.resize(static_cast<Eigen::Index>(c), frames);
  Matrix grad_cep_d;
  if (grads != nullptr) grad_cep_d = Matrix::Zero(static_cast<Eigen::Index>(c), frames);
  const double scale = 1.0 / static_cast<double>(frames);
  double total = 0.0;
  for (Eigen::Index j = 0; j < frames; ++j) {
    const auto col = [&](const Matrix& m) {
      return std::span<const double>(m.col(j).data(), c);
    };
    total += chain.forward(col(cep_d), lifter, batch.src_spec[static_cast<std::size_t>(j)],
                           col(batch.tgt_cep));
    std::copy(chain.converted().begin(), chain.converted().end(), out.converted.col(j).data());
    if (grads != nullptr) {
      chain.backward(scale, std::span<double>(grad_cep_d.col(j).data(), c), grads->lifter);
    }
  }
  if (grads != nullptr) model.backward(*used, grad_cep_d, grads->params);
  out.loss = total * scale;
  return out;
}

double cepstral_loss(const AcousticModel& model, const Matrix& src_cep, const Matrix& tgt_cep,
                     Mode mode, std::span<double> grad_params, AcousticModel::Cache* cache) {
  require(src_cep.cols() > 0 && src_cep.cols() == tgt_cep.cols() && src_cep.rows() == tgt_cep.rows(),
          ErrorKind::ShapeMismatch, "source and target batches differ in shape");
  const bool want_grad = !grad_params.empty();
  AcousticModel::Cache local;
  AcousticModel::Cache* used = cache != nullptr ? cache : (want_grad ? &local : nullptr);
  const Matrix cep_d = model.forward(src_cep, mode, used);
  const Matrix err = tgt_cep - src_cep - cep_d;
  const double frames = static_cast<double>(src_cep.cols());
  if (want_grad) model.backward(*used, (-2.0 / frames) * err, grad_params);
  return err.squaredNorm() / frames;
}

}  // namespace sdvc
