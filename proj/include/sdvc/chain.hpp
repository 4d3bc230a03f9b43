#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/cepstral.hpp"
#include "sdvc/config.hpp"
#include "sdvc/filter_design.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

/// Differentiable per-frame conversion chain with filter truncation:
///
///   v      = lifter * cep_d (zero-padded to N)
///   S      = exp(dft(v))                 differential spectrum
///   S'     = 1 + g (S - 1)               optional sub-band gate
///   f      = Re idft(S')                 differential filter
///   F_l    = dft(f * w_l)                `taps` coefficients kept: lags [0, l)
///                                        or, with a gate, the two-sided
///                                        window [-l/4, l - l/4)
///   Y      = F_x * F_l                   converted spectrum
///   cep_hat = first c of Re idft(log max(|Y|, floor))
///   loss   = |cep_y - cep_hat|^2
///
/// backward() propagates exact reverse-mode gradients of the loss through every
/// step to the differential cepstrum and the lifter. One object holds the
/// workspace for one frame at a time; it is not thread-safe.
class TruncationChain {
public:
  TruncationChain(const AnalysisConfig& cfg, std::size_t taps,
                  std::optional<SubbandGate> gate = std::nullopt);

  std::size_t taps() const noexcept { return taps_; }
  const AnalysisConfig& config() const noexcept { return cfg_; }

  /// Runs the chain for one frame and returns its loss. Intermediates are kept
  /// for the next backward() call.
  double forward(std::span<const double> cep_d, std::span<const double> lifter,
                 std::span<const Complex> spec_x, std::span<const double> cep_y);

  /// Converted cepstrum from the last forward().
  std::span<const double> converted() const noexcept { return cep_hat_; }
  /// Lag-zero position within truncated_filter().
  std::size_t lead() const noexcept { return lead_; }
  /// Truncated differential filter from the last forward(), ordered by lag.
  std::span<const double> truncated_filter() const noexcept { return kept_; }

  /// Adds scale * d(loss)/d(cep_d) and scale * d(loss)/d(lifter) into the
  /// given buffers (each cep_dim long).
  void backward(double scale, std::span<double> grad_cep_d, std::span<double> grad_lifter);

private:
  AnalysisConfig cfg_;
  std::size_t taps_;
  std::size_t lead_ = 0;
  std::vector<double> gate_;    // empty when no gate
  std::vector<double> window_;  // circular truncation window

  // Forward state.
  std::vector<double> cep_d_, lifter_, cep_y_, cep_hat_;
  ComplexVector spec_x_;
  ComplexVector diff_spec_;  // S (before gating)
  ComplexVector converted_;  // Y
  std::vector<double> filter_, kept_;
  // Scratch.
  ComplexVector work_, grad_;
  std::vector<double> grad_filter_;
};

/// Frames of a batch, one per column / entry.
struct FrameBatch {
  const Matrix& src_cep;
  const Matrix& tgt_cep;
  std::span<const Spectrum> src_spec;
};

/// Flat gradient buffers matching a model and its lifter.
struct ChainGradients {
  std::vector<double> params;
  std::vector<double> lifter;

  ChainGradients() = default;
  ChainGradients(std::size_t num_params, std::size_t cep_dim)
      : params(num_params, 0.0), lifter(cep_dim, 0.0) {}
  void zero();
};

struct ChainOutput {
  double loss = 0.0;  // mean of per-frame losses
  Matrix converted;   // cep_dim x batch
};

/// Model forward + truncation chain over a batch. When `grads` is non-null the
/// gradients of the mean loss are accumulated into it. `cache`, when given,
/// receives the model intermediates (e.g. for update_running_stats()).
ChainOutput chain_loss(const AcousticModel& model, std::span<const double> lifter,
                       const FrameBatch& batch, TruncationChain& chain, Mode mode,
                       ChainGradients* grads = nullptr, AcousticModel::Cache* cache = nullptr);

/// Conventional training loss: mean over frames of |cep_y - (cep_x + cep_d)|^2.
/// Accumulates parameter gradients when `grad_params` is non-null.
double cepstral_loss(const AcousticModel& model, const Matrix& src_cep, const Matrix& tgt_cep,
                     Mode mode, std::span<double> grad_params = {},
                     AcousticModel::Cache* cache = nullptr);

}  // namespace sdvc
