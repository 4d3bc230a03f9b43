#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sdvc/cepstral.hpp"
#include "sdvc/config.hpp"

namespace sdvc {

/// Feature batches are column-major: one cepstrum per column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

enum class Mode { Train, Infer };

/// Per-dimension affine normalization, x_norm = (x - mean) / stddev.
struct FeatureStats {
  Vector mean;
  Vector stddev;

  static FeatureStats identity(std::size_t dim);
  /// Mean and population standard deviation of each row; stddev is floored
  /// at `min_stddev`.
  static FeatureStats from_columns(const Matrix& data, double min_stddev = 1e-6);
};

/// Running statistics of the two batch-norm branches of one GLU layer.
struct GluRunningStats {
  Vector value_mean, value_var;
  Vector gate_mean, gate_var;
};

/// Maps a source cepstrum to a differential cepstrum.
///
/// Each hidden layer is a gated linear unit whose two branches are batch
/// normalized before their activation:
///
///   h = tanh(BN_v(W_v x + b_v)) * sigmoid(BN_g(W_g x + b_g))
///
/// followed by a linear projection back to cep_dim. Inputs are normalized with
/// `input_stats` and outputs de-normalized with `output_stats`.
///
/// All trainable weights live in one contiguous buffer so the optimizer,
/// serializer and gradient checks can treat them as a flat vector. Per hidden
/// layer (in -> out) the order is W_v (out x in), b_v, W_g (out x in), b_g,
/// gamma_v, beta_v, gamma_g, beta_g; the output layer contributes W_o, b_o.
/// Matrices are stored column-major.
class AcousticModel {
public:
  struct LayerParams {
    Eigen::Map<Matrix> w_value;
    Eigen::Map<Vector> b_value;
    Eigen::Map<Matrix> w_gate;
    Eigen::Map<Vector> b_gate;
    Eigen::Map<Vector> gamma_value;
    Eigen::Map<Vector> beta_value;
    Eigen::Map<Vector> gamma_gate;
    Eigen::Map<Vector> beta_gate;
  };

  struct LayerCache {
    Matrix input;
    Matrix value_hat, gate_hat;  // normalized pre-activations
    Vector value_inv_std, gate_inv_std;
    Vector value_mean, value_var, gate_mean, gate_var;  // batch statistics
    Matrix value_act, gate_act;  // tanh and sigmoid outputs
  };

  /// Intermediates retained by forward() for backward().
  struct Cache {
    Mode mode = Mode::Infer;
    std::vector<LayerCache> layers;
    Matrix last_hidden;
  };

  AcousticModel() = default;
  /// Randomly initialized model: weights and biases ~ U(-1/sqrt(fan_in),
  /// 1/sqrt(fan_in)), batch-norm scale 1 and shift 0, identity feature stats
  /// and the minimum-phase lifter.
  AcousticModel(const AnalysisConfig& cfg, std::vector<std::size_t> hidden, std::uint64_t seed);

  /// Hidden sizes used for a bandwidth: {280, 100} at 16 kHz, {840, 300} at 48 kHz.
  static std::vector<std::size_t> default_hidden(const AnalysisConfig& cfg);

  const AnalysisConfig& config() const noexcept { return cfg_; }
  const std::vector<std::size_t>& hidden_sizes() const noexcept { return hidden_; }
  std::size_t cep_dim() const noexcept { return cfg_.cep_dim; }
  std::size_t num_layers() const noexcept { return hidden_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  LayerParams layer(std::size_t i);
  Eigen::Map<const Matrix> w_value(std::size_t i) const;
  Eigen::Map<const Matrix> w_gate(std::size_t i) const;
  Eigen::Map<Matrix> output_weight();
  Eigen::Map<Vector> output_bias();

  std::vector<GluRunningStats>& running_stats() noexcept { return running_; }
  const std::vector<GluRunningStats>& running_stats() const noexcept { return running_; }

  FeatureStats input_stats;
  FeatureStats output_stats;
  Lifter lifter;
  /// Truncation length the lifter was trained for (fft_len when untruncated).
  std::size_t trained_taps = 0;

  /// cep_x is cep_dim x batch. Train mode normalizes with batch statistics;
  /// infer mode with the running statistics. Running statistics are never
  /// touched here; see update_running_stats().
  Matrix forward(const Matrix& cep_x, Mode mode, Cache* cache = nullptr) const;

  Cepstrum infer(std::span<const double> cep_x) const;

  /// Accumulates d(loss)/d(params) into grad_params given d(loss)/d(output).
  /// When grad_input is non-null it receives d(loss)/d(cep_x).
  void backward(const Cache& cache, const Matrix& grad_output, std::span<double> grad_params,
                Matrix* grad_input = nullptr) const;

  /// Moves running statistics toward the batch statistics held in a
  /// train-mode cache (unbiased variance).
  void update_running_stats(const Cache& cache, double momentum = kBatchNormMomentum);

private:
  struct Offsets {
    std::size_t w_value, b_value, w_gate, b_gate, gamma_value, beta_value, gamma_gate, beta_gate;
    std::size_t in, out;
  };

  void build_layout();

  AnalysisConfig cfg_;
  std::vector<std::size_t> hidden_;
  std::vector<Offsets> offsets_;
  std::size_t out_w_ = 0, out_b_ = 0;
  std::vector<double> params_;
  std::vector<GluRunningStats> running_;

  friend AcousticModel make_model_shell(const AnalysisConfig&, std::vector<std::size_t>);
};

/// Model with the given shape and zero-filled buffers; used by the loader.
AcousticModel make_model_shell(const AnalysisConfig& cfg, std::vector<std::size_t> hidden);

/// Bias-corrected Adam.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate) : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

/// Deterministic generator for initialization and shuffling; identical streams
/// on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t below(std::size_t n);  // [0, n)

private:
  std::uint64_t state_;
};

}  // namespace sdvc
