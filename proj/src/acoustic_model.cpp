#include "sdvc/acoustic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sdvc/error.hpp"

namespace sdvc {

namespace {

using ConstMatMap = Eigen::Map<const Matrix>;
using ConstVecMap = Eigen::Map<const Vector>;
using MatMap = Eigen::Map<Matrix>;
using VecMap = Eigen::Map<Vector>;

Matrix sigmoid(const Matrix& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

// Linear map applied column by column in infer mode so that a frame's output
// does not depend on which batch it arrives in.
Matrix affine(const ConstMatMap& w, const ConstVecMap& b, const Matrix& x, Mode mode) {
  Matrix z(w.rows(), x.cols());
  if (mode == Mode::Train) {
    z.noalias() = w * x;
  } else {
    for (Eigen::Index j = 0; j < x.cols(); ++j) z.col(j).noalias() = w * x.col(j);
  }
  z.colwise() += b;
  return z;
}

struct NormResult {
  Matrix x_hat;
  Matrix y;
  Vector inv_std, mean, var;
};

NormResult batch_norm(const Matrix& z, Mode mode, const Vector& running_mean,
                      const Vector& running_var, const ConstVecMap& gamma,
                      const ConstVecMap& beta) {
  NormResult r;
  if (mode == Mode::Train) {
    r.mean = z.rowwise().mean();
    r.var = (z.colwise() - r.mean).array().square().rowwise().mean();
  } else {
    r.mean = running_mean;
    r.var = running_var;
  }
  r.inv_std = (r.var.array() + kBatchNormEps).rsqrt();
  r.x_hat = ((z.colwise() - r.mean).array().colwise() * r.inv_std.array()).matrix();
  r.y = ((r.x_hat.array().colwise() * gamma.array()).colwise() + beta.array()).matrix();
  return r;
}

// Gradient of the pre-normalization input given the gradient of x_hat.
Matrix batch_norm_backward(const Matrix& d_xhat, const Matrix& x_hat, const Vector& inv_std,
                           Mode mode) {
  if (mode == Mode::Infer) return (d_xhat.array().colwise() * inv_std.array()).matrix();
  const double b = static_cast<double>(d_xhat.cols());
  const Vector sum_d = d_xhat.rowwise().sum();
  const Vector sum_dx = d_xhat.cwiseProduct(x_hat).rowwise().sum();
  Matrix dz = (b * d_xhat.array()).matrix();
  dz.colwise() -= sum_d;
  dz -= (x_hat.array().colwise() * sum_dx.array()).matrix();
  return ((dz.array().colwise() * inv_std.array()) / b).matrix();
}

}  // namespace

FeatureStats FeatureStats::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return {Vector::Zero(n), Vector::Ones(n)};
}

FeatureStats FeatureStats::from_columns(const Matrix& data, double min_stddev) {
  require(data.cols() > 0, ErrorKind::EmptyInput, "statistics of an empty feature set");
  FeatureStats s;
  s.mean = data.rowwise().mean();
  s.stddev = (data.colwise() - s.mean).array().square().rowwise().mean().sqrt();
  s.stddev = s.stddev.cwiseMax(min_stddev);
  return s;
}

AcousticModel make_model_shell(const AnalysisConfig& cfg, std::vector<std::size_t> hidden) {
  cfg.validate();
  require(!hidden.empty(), ErrorKind::InvalidArgument, "model needs at least one hidden layer");
  for (auto h : hidden) require(h > 0, ErrorKind::InvalidArgument, "hidden size must be positive");
  AcousticModel m;
  m.cfg_ = cfg;
  m.hidden_ = std::move(hidden);
  m.build_layout();
  m.input_stats = FeatureStats::identity(cfg.cep_dim);
  m.output_stats = FeatureStats::identity(cfg.cep_dim);
  m.lifter = Lifter::minimum_phase(cfg.fft_len, cfg.cep_dim);
  m.trained_taps = cfg.fft_len;
  return m;
}

void AcousticModel::build_layout() {
  offsets_.clear();
  running_.clear();
  std::size_t pos = 0;
  std::size_t in = cfg_.cep_dim;
  for (std::size_t out : hidden_) {
    Offsets o{};
    o.in = in;
    o.out = out;
    o.w_value = pos; pos += out * in;
    o.b_value = pos; pos += out;
    o.w_gate = pos; pos += out * in;
    o.b_gate = pos; pos += out;
    o.gamma_value = pos; pos += out;
    o.beta_value = pos; pos += out;
    o.gamma_gate = pos; pos += out;
    o.beta_gate = pos; pos += out;
    offsets_.push_back(o);
    const auto n = static_cast<Eigen::Index>(out);
    running_.push_back({Vector::Zero(n), Vector::Ones(n), Vector::Zero(n), Vector::Ones(n)});
    in = out;
  }
  out_w_ = pos; pos += cfg_.cep_dim * in;
  out_b_ = pos; pos += cfg_.cep_dim;
  params_.assign(pos, 0.0);
}

AcousticModel::AcousticModel(const AnalysisConfig& cfg, std::vector<std::size_t> hidden,
                             std::uint64_t seed) {
  *this = make_model_shell(cfg, std::move(hidden));
  Rng rng(seed);
  auto fill_uniform = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (std::size_t k = 0; k < count; ++k) params_[offset + k] = rng.uniform(-bound, bound);
  };
  for (const auto& o : offsets_) {
    fill_uniform(o.w_value, o.out * o.in, o.in);
    fill_uniform(o.b_value, o.out, o.in);
    fill_uniform(o.w_gate, o.out * o.in, o.in);
    fill_uniform(o.b_gate, o.out, o.in);
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(o.gamma_value), o.out, 1.0);
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(o.gamma_gate), o.out, 1.0);
  }
  const std::size_t last = hidden_.back();
  fill_uniform(out_w_, cfg_.cep_dim * last, last);
  fill_uniform(out_b_, cfg_.cep_dim, last);
}

std::vector<std::size_t> AcousticModel::default_hidden(const AnalysisConfig& cfg) {
  if (cfg.sample_rate >= 48000) return {840, 300};
  return {280, 100};
}

AcousticModel::LayerParams AcousticModel::layer(std::size_t i) {
  const auto& o = offsets_.at(i);
  const auto in = static_cast<Eigen::Index>(o.in);
  const auto out = static_cast<Eigen::Index>(o.out);
  double* p = params_.data();
  return {MatMap(p + o.w_value, out, in),  VecMap(p + o.b_value, out),
          MatMap(p + o.w_gate, out, in),   VecMap(p + o.b_gate, out),
          VecMap(p + o.gamma_value, out),  VecMap(p + o.beta_value, out),
          VecMap(p + o.gamma_gate, out),   VecMap(p + o.beta_gate, out)};
}

Eigen::Map<const Matrix> AcousticModel::w_value(std::size_t i) const {
  const auto& o = offsets_.at(i);
  return ConstMatMap(params_.data() + o.w_value, static_cast<Eigen::Index>(o.out),
                     static_cast<Eigen::Index>(o.in));
}

Eigen::Map<const Matrix> AcousticModel::w_gate(std::size_t i) const {
  const auto& o = offsets_.at(i);
  return ConstMatMap(params_.data() + o.w_gate, static_cast<Eigen::Index>(o.out),
                     static_cast<Eigen::Index>(o.in));
}

Eigen::Map<Matrix> AcousticModel::output_weight() {
  return MatMap(params_.data() + out_w_, static_cast<Eigen::Index>(cfg_.cep_dim),
                static_cast<Eigen::Index>(hidden_.back()));
}

Eigen::Map<Vector> AcousticModel::output_bias() {
  return VecMap(params_.data() + out_b_, static_cast<Eigen::Index>(cfg_.cep_dim));
}

Matrix AcousticModel::forward(const Matrix& cep_x, Mode mode, Cache* cache) const {
  const auto c = static_cast<Eigen::Index>(cfg_.cep_dim);
  require(cep_x.rows() == c, ErrorKind::ShapeMismatch,
          "model expects " + std::to_string(c) + "-dim cepstra, got " +
              std::to_string(cep_x.rows()));
  require(cep_x.cols() > 0, ErrorKind::EmptyInput, "forward on an empty batch");

  Matrix x = ((cep_x.colwise() - input_stats.mean).array().colwise() / input_stats.stddev.array())
                 .matrix();
  if (cache != nullptr) {
    cache->mode = mode;
    cache->layers.resize(offsets_.size());
  }
  const double* p = params_.data();
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    const auto& o = offsets_[i];
    const auto in = static_cast<Eigen::Index>(o.in);
    const auto out = static_cast<Eigen::Index>(o.out);
    const Matrix zv = affine(ConstMatMap(p + o.w_value, out, in), ConstVecMap(p + o.b_value, out),
                             x, mode);
    const Matrix zg = affine(ConstMatMap(p + o.w_gate, out, in), ConstVecMap(p + o.b_gate, out),
                             x, mode);
    auto nv = batch_norm(zv, mode, running_[i].value_mean, running_[i].value_var,
                         ConstVecMap(p + o.gamma_value, out), ConstVecMap(p + o.beta_value, out));
    auto ng = batch_norm(zg, mode, running_[i].gate_mean, running_[i].gate_var,
                         ConstVecMap(p + o.gamma_gate, out), ConstVecMap(p + o.beta_gate, out));
    Matrix tv = nv.y.array().tanh().matrix();
    Matrix sg = sigmoid(ng.y);
    Matrix a = tv.cwiseProduct(sg);
    if (cache != nullptr) {
      auto& lc = cache->layers[i];
      lc.input = std::move(x);
      lc.value_hat = std::move(nv.x_hat);
      lc.gate_hat = std::move(ng.x_hat);
      lc.value_inv_std = std::move(nv.inv_std);
      lc.gate_inv_std = std::move(ng.inv_std);
      lc.value_mean = std::move(nv.mean);
      lc.value_var = std::move(nv.var);
      lc.gate_mean = std::move(ng.mean);
      lc.gate_var = std::move(ng.var);
      lc.value_act = std::move(tv);
      lc.gate_act = std::move(sg);
    }
    x = std::move(a);
  }
  const Matrix y = affine(ConstMatMap(p + out_w_, c, static_cast<Eigen::Index>(hidden_.back())),
                          ConstVecMap(p + out_b_, c), x, mode);
  if (cache != nullptr) cache->last_hidden = std::move(x);
  return ((y.array().colwise() * output_stats.stddev.array()).colwise() +
          output_stats.mean.array())
      .matrix();
}

Cepstrum AcousticModel::infer(std::span<const double> cep_x) const {
  const Matrix in = ConstVecMap(cep_x.data(), static_cast<Eigen::Index>(cep_x.size()));
  const Matrix out = forward(in, Mode::Infer);
  return Cepstrum(out.data(), out.data() + out.size());
}

void AcousticModel::backward(const Cache& cache, const Matrix& grad_output,
                             std::span<double> grad_params, Matrix* grad_input) const {
  require(grad_params.size() == params_.size(), ErrorKind::ShapeMismatch,
          "gradient buffer does not match the parameter count");
  require(cache.layers.size() == offsets_.size() && grad_output.cols() == cache.last_hidden.cols(),
          ErrorKind::ShapeMismatch, "cache does not belong to this gradient");
  const auto c = static_cast<Eigen::Index>(cfg_.cep_dim);
  const auto last = static_cast<Eigen::Index>(hidden_.back());
  const double* p = params_.data();
  double* g = grad_params.data();

  const Matrix dy = (grad_output.array().colwise() * output_stats.stddev.array()).matrix();
  MatMap(g + out_w_, c, last).noalias() += dy * cache.last_hidden.transpose();
  VecMap(g + out_b_, c) += dy.rowwise().sum();
  Matrix da = ConstMatMap(p + out_w_, c, last).transpose() * dy;

  for (std::size_t li = offsets_.size(); li-- > 0;) {
    const auto& o = offsets_[li];
    const auto& lc = cache.layers[li];
    const auto in = static_cast<Eigen::Index>(o.in);
    const auto out = static_cast<Eigen::Index>(o.out);

    const Matrix d_yv = (da.array() * lc.gate_act.array() *
                         (1.0 - lc.value_act.array().square()))
                            .matrix();
    const Matrix d_yg = (da.array() * lc.value_act.array() * lc.gate_act.array() *
                         (1.0 - lc.gate_act.array()))
                            .matrix();

    VecMap(g + o.gamma_value, out) += d_yv.cwiseProduct(lc.value_hat).rowwise().sum();
    VecMap(g + o.beta_value, out) += d_yv.rowwise().sum();
    VecMap(g + o.gamma_gate, out) += d_yg.cwiseProduct(lc.gate_hat).rowwise().sum();
    VecMap(g + o.beta_gate, out) += d_yg.rowwise().sum();

    const Matrix d_zv = batch_norm_backward(
        (d_yv.array().colwise() * ConstVecMap(p + o.gamma_value, out).array()).matrix(),
        lc.value_hat, lc.value_inv_std, cache.mode);
    const Matrix d_zg = batch_norm_backward(
        (d_yg.array().colwise() * ConstVecMap(p + o.gamma_gate, out).array()).matrix(),
        lc.gate_hat, lc.gate_inv_std, cache.mode);

    MatMap(g + o.w_value, out, in).noalias() += d_zv * lc.input.transpose();
    VecMap(g + o.b_value, out) += d_zv.rowwise().sum();
    MatMap(g + o.w_gate, out, in).noalias() += d_zg * lc.input.transpose();
    VecMap(g + o.b_gate, out) += d_zg.rowwise().sum();

    Matrix next = ConstMatMap(p + o.w_value, out, in).transpose() * d_zv;
    next.noalias() += ConstMatMap(p + o.w_gate, out, in).transpose() * d_zg;
    da = std::move(next);
  }
  if (grad_input != nullptr) {
    *grad_input = (da.array().colwise() / input_stats.stddev.array()).matrix();
  }
}

void AcousticModel::update_running_stats(const Cache& cache, double momentum) {
  require(cache.mode == Mode::Train && cache.layers.size() == running_.size(),
          ErrorKind::InvalidArgument, "running statistics need a train-mode cache");
  const double b = static_cast<double>(cache.last_hidden.cols());
  const double unbias = b > 1.0 ? b / (b - 1.0) : 1.0;
  for (std::size_t i = 0; i < running_.size(); ++i) {
    auto& r = running_[i];
    const auto& lc = cache.layers[i];
    r.value_mean = (1.0 - momentum) * r.value_mean + momentum * lc.value_mean;
    r.value_var = (1.0 - momentum) * r.value_var + momentum * unbias * lc.value_var;
    r.gate_mean = (1.0 - momentum) * r.gate_mean + momentum * lc.gate_mean;
    r.gate_var = (1.0 - momentum) * r.gate_var + momentum * unbias * lc.gate_var;
  }
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  require(params.size() == grads.size() && state.m.size() == params.size() &&
              state.v.size() == params.size(),
          ErrorKind::ShapeMismatch, "Adam state, parameters and gradients differ in size");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

Rng::Rng(std::uint64_t seed) : state_(seed) {}

// splitmix64
std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

}  // namespace sdvc
