#include "sdvc/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sdvc/cepstral.hpp"
#include "sdvc/error.hpp"

namespace sdvc {

namespace {

Matrix cepstra_of(const std::vector<Spectrum>& frames, const AnalysisConfig& cfg) {
  Matrix out(static_cast<Eigen::Index>(cfg.cep_dim), static_cast<Eigen::Index>(frames.size()));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto cep = real_cepstrum(frames[t], cfg);
    out.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const Vector>(cep.data(), out.rows());
  }
  return out;
}

// Rows 1.. of a cepstral sequence, mean/variance normalized over the sequence.
Matrix dtw_features(const Matrix& cep) {
  Matrix body = cep.bottomRows(cep.rows() - 1);
  if (body.rows() == 0) body = cep;
  const auto stats = FeatureStats::from_columns(body);
  return ((body.colwise() - stats.mean).array().colwise() / stats.stddev.array()).matrix();
}

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  return idx;
}

// Splits n items into round(n / batch) near-equal contiguous ranges (at least
// one) so no batch degenerates to a single frame.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t n, std::size_t batch) {
  const std::size_t count = std::max<std::size_t>(1, (n + batch / 2) / std::max<std::size_t>(batch, 1));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < count; ++b) out.emplace_back(b * n / count, (b + 1) * n / count);
  return out;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

AlignedPair concatenate(std::span<const AlignedPair> parts) {
  AlignedPair out;
  Eigen::Index rows = 0, total = 0;
  for (const auto& p : parts) {
    rows = std::max(rows, p.src_cep.rows());
    total += static_cast<Eigen::Index>(p.size());
  }
  out.src_cep.resize(rows, total);
  out.tgt_cep.resize(rows, total);
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    const auto n = static_cast<Eigen::Index>(p.size());
    if (n == 0) continue;
    require(p.src_cep.rows() == rows, ErrorKind::ShapeMismatch, "aligned pairs differ in cep_dim");
    out.src_cep.middleCols(col, n) = p.src_cep;
    out.tgt_cep.middleCols(col, n) = p.tgt_cep;
    out.src_spec.insert(out.src_spec.end(), p.src_spec.begin(), p.src_spec.end());
    out.src_frame.insert(out.src_frame.end(), p.src_frame.begin(), p.src_frame.end());
    out.tgt_frame.insert(out.tgt_frame.end(), p.tgt_frame.begin(), p.tgt_frame.end());
    col += n;
  }
  return out;
}

AlignedPair select_frames(const AlignedPair& data, std::span<const std::size_t> index) {
  AlignedPair out;
  const auto n = static_cast<Eigen::Index>(index.size());
  out.src_cep.resize(data.src_cep.rows(), n);
  out.tgt_cep.resize(data.tgt_cep.rows(), n);
  out.src_spec.reserve(index.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::size_t i = index[static_cast<std::size_t>(j)];
    require(i < data.size(), ErrorKind::InvalidArgument, "frame index out of range");
    out.src_cep.col(j) = data.src_cep.col(static_cast<Eigen::Index>(i));
    out.tgt_cep.col(j) = data.tgt_cep.col(static_cast<Eigen::Index>(i));
    out.src_spec.push_back(data.src_spec[i]);
    if (i < data.src_frame.size()) out.src_frame.push_back(data.src_frame[i]);
    if (i < data.tgt_frame.size()) out.tgt_frame.push_back(data.tgt_frame[i]);
  }
  return out;
}

AlignedPair align_utterances(const Waveform& source, const Waveform& target,
                             const AnalysisConfig& cfg, const PrepOptions& opts) {
  const Waveform src = opts.trim ? trim_silence(source, cfg.hop, opts.silence_db) : source;
  const Waveform tgt = opts.trim ? trim_silence(target, cfg.hop, opts.silence_db) : target;
  const auto src_spec = stft(src, cfg);
  const auto tgt_spec = stft(tgt, cfg);
  const Matrix src_cep = cepstra_of(src_spec, cfg);
  const Matrix tgt_cep = cepstra_of(tgt_spec, cfg);
  const auto dtw = dtw_align(dtw_features(src_cep), dtw_features(tgt_cep));

  AlignedPair out;
  const auto n = static_cast<Eigen::Index>(dtw.path.size());
  out.src_cep.resize(src_cep.rows(), n);
  out.tgt_cep.resize(tgt_cep.rows(), n);
  out.src_spec.reserve(dtw.path.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto [i, j] = dtw.path[static_cast<std::size_t>(t)];
    out.src_cep.col(t) = src_cep.col(static_cast<Eigen::Index>(i));
    out.tgt_cep.col(t) = tgt_cep.col(static_cast<Eigen::Index>(j));
    out.src_spec.push_back(src_spec[i]);
    out.src_frame.push_back(i);
    out.tgt_frame.push_back(j);
  }
  return out;
}

TrainConfig TrainConfig::for_rate(int sample_rate) {
  TrainConfig cfg;
  if (sample_rate >= 48000) {
    cfg.lr_pretrain = 1e-4;
    cfg.lr_finetune = 5e-6;
  }
  return cfg;
}

std::string TrainingLog::to_csv(bool include_time) const {
  std::ostringstream os;
  os << "epoch,train_loss,val_loss,rmse" << (include_time ? ",wall_time_s" : "") << '\n';
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g", e.epoch, e.train_loss, e.val_loss,
                  e.rmse);
    os << buf;
    if (include_time) {
      std::snprintf(buf, sizeof(buf), ",%.3f", e.wall_time_s);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

void TrainingLog::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << to_csv(true);
}

void fit_normalization(AcousticModel& model, const AlignedPair& train) {
  require(!train.empty(), ErrorKind::EmptyInput, "no training frames");
  model.input_stats = FeatureStats::from_columns(train.src_cep);
  model.output_stats = FeatureStats::from_columns(train.tgt_cep - train.src_cep);
}

TrainingLog pretrain_conventional(AcousticModel& model, const AlignedPair& train,
                                  const AlignedPair& val, const TrainConfig& cfg,
                                  const EpochCallback& on_epoch) {
  require(!train.empty(), ErrorKind::EmptyInput, "no training frames");
  const AlignedPair& check = val.empty() ? train : val;
  fit_normalization(model, train);

  AdamState adam(model.parameter_count(), cfg.lr_pretrain);
  std::vector<double> grads(model.parameter_count());
  Rng rng(cfg.seed);
  Stopwatch clock;
  TrainingLog log;
  auto record = [&](std::size_t epoch, double train_loss) {
    const double val_loss = cepstral_loss(model, check.src_cep, check.tgt_cep, Mode::Infer);
    log.epochs.push_back({epoch, train_loss, val_loss, std::sqrt(val_loss), clock.seconds()});
    if (on_epoch) on_epoch(log.epochs.back());
  };
  record(0, cepstral_loss(model, train.src_cep, train.tgt_cep, Mode::Infer));

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = shuffled(train.size(), rng);
    double sum = 0.0;
    std::size_t seen = 0;
    for (const auto& [lo, hi] : batch_ranges(order.size(), cfg.batch_size)) {
      Matrix sx(train.src_cep.rows(), static_cast<Eigen::Index>(hi - lo));
      Matrix sy(train.tgt_cep.rows(), sx.cols());
      for (std::size_t k = lo; k < hi; ++k) {
        sx.col(static_cast<Eigen::Index>(k - lo)) = train.src_cep.col(static_cast<Eigen::Index>(order[k]));
        sy.col(static_cast<Eigen::Index>(k - lo)) = train.tgt_cep.col(static_cast<Eigen::Index>(order[k]));
      }
      std::fill(grads.begin(), grads.end(), 0.0);
      AcousticModel::Cache cache;
      const double loss = cepstral_loss(model, sx, sy, Mode::Train, grads, &cache);
      model.update_running_stats(cache);
      adam_step(adam, model.parameters(), grads);
      sum += loss * static_cast<double>(hi - lo);
      seen += hi - lo;
    }
    record(epoch, sum / static_cast<double>(seen));
  }
  return log;
}

TrainingLog train_lifter(AcousticModel& model, const AlignedPair& train, const AlignedPair& val,
                         const TrainConfig& cfg, const EpochCallback& on_epoch) {
  require(!train.empty(), ErrorKind::EmptyInput, "no training frames");
  const AlignedPair& check = val.empty() ? train : val;
  const auto& acfg = model.config();
  const std::size_t taps = cfg.effective_taps(acfg);
  if (!model.lifter.trainable) model.lifter = Lifter::minimum_phase(acfg.fft_len, acfg.cep_dim, true);

  const std::optional<SubbandGate> gate =
      cfg.gate_in_training ? std::optional<SubbandGate>(cfg.gate) : std::nullopt;
  TruncationChain chain(acfg, taps, gate);
  AdamState adam_params(model.parameter_count(), cfg.lr_finetune);
  AdamState adam_lifter(acfg.cep_dim, cfg.lr_finetune);
  ChainGradients grads(model.parameter_count(), acfg.cep_dim);
  Rng rng(cfg.seed);
  Stopwatch clock;
  TrainingLog log;
  auto record = [&](std::size_t epoch, double train_loss) {
    const double val_loss = chain_loss(model, model.lifter.coeffs, check.batch(), chain, Mode::Infer).loss;
    log.epochs.push_back({epoch, train_loss, val_loss, std::sqrt(val_loss), clock.seconds()});
    if (on_epoch) on_epoch(log.epochs.back());
  };
  record(0, chain_loss(model, model.lifter.coeffs, train.batch(), chain, Mode::Infer).loss);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = shuffled(train.size(), rng);
    double sum = 0.0;
    std::size_t seen = 0;
    for (const auto& [lo, hi] : batch_ranges(order.size(), cfg.batch_size)) {
      const auto batch = select_frames(train, std::span(order).subspan(lo, hi - lo));
      grads.zero();
      AcousticModel::Cache cache;
      const auto out = chain_loss(model, model.lifter.coeffs, batch.batch(), chain, Mode::Train,
                                  &grads, &cache);
      model.update_running_stats(cache);
      adam_step(adam_params, model.parameters(), grads.params);
      adam_step(adam_lifter, model.lifter.coeffs, grads.lifter);
      sum += out.loss * static_cast<double>(hi - lo);
      seen += hi - lo;
    }
    record(epoch, sum / static_cast<double>(seen));
  }
  model.trained_taps = taps;
  return log;
}

ChainEvaluation evaluate_chain(const AcousticModel& model, std::span<const double> lifter,
                               const AlignedPair& data, std::size_t taps,
                               const SubbandGate* gate) {
  require(!data.empty(), ErrorKind::EmptyInput, "evaluation set is empty");
  TruncationChain chain(model.config(), taps,
                        gate != nullptr ? std::optional<SubbandGate>(*gate) : std::nullopt);
  auto out = chain_loss(model, lifter, data.batch(), chain, Mode::Infer);
  return {out.loss, std::sqrt(out.loss), std::move(out.converted)};
}

}  // namespace sdvc
