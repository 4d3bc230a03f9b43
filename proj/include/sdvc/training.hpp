#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/alignment.hpp"
#include "sdvc/chain.hpp"
#include "sdvc/config.hpp"
#include "sdvc/filter_design.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

/// Source/target frames paired by a warping path. Column t of src_cep and
/// tgt_cep and entry t of src_spec belong to the same aligned step; the
/// source spectra are the (possibly repeated) warped source frames.
struct AlignedPair {
  Matrix src_cep;  // cep_dim x T
  Matrix tgt_cep;  // cep_dim x T
  std::vector<Spectrum> src_spec;
  std::vector<std::size_t> src_frame;  // original frame indices along the path
  std::vector<std::size_t> tgt_frame;

  std::size_t size() const noexcept { return src_spec.size(); }
  bool empty() const noexcept { return src_spec.empty(); }
  FrameBatch batch() const { return {src_cep, tgt_cep, src_spec}; }
};

AlignedPair concatenate(std::span<const AlignedPair> parts);

/// Frames selected by index, in the given order.
AlignedPair select_frames(const AlignedPair& data, std::span<const std::size_t> index);

struct PrepOptions {
  bool trim = true;
  double silence_db = kDefaultSilenceDb;
};

/// Silence trimming, STFT, cepstra and DTW for one utterance pair. DTW runs on
/// per-utterance mean/variance normalized cepstra without coefficient 0.
AlignedPair align_utterances(const Waveform& source, const Waveform& target,
                             const AnalysisConfig& cfg, const PrepOptions& opts = {});

struct TrainConfig {
  std::size_t taps = 0;  // truncation length for lifter training; 0 means fft_len
  double lr_pretrain = 5e-4;
  double lr_finetune = 1e-5;
  std::size_t batch_size = 1000;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  bool gate_in_training = false;
  SubbandGate gate;
  double silence_db = kDefaultSilenceDb;

  /// Defaults for a bandwidth; full band uses rates 1e-4 and 5e-6.
  static TrainConfig for_rate(int sample_rate);
  std::size_t effective_taps(const AnalysisConfig& cfg) const { return taps == 0 ? cfg.fft_len : taps; }
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double rmse = 0.0;
  double wall_time_s = 0.0;
};

/// Per-epoch losses. Row 0 holds the losses before the first update.
struct TrainingLog {
  std::vector<EpochLog> epochs;

  /// CSV with header epoch,train_loss,val_loss,rmse,wall_time_s. Losses are
  /// written with 17 significant digits.
  std::string to_csv(bool include_time = true) const;
  void write_csv(const std::filesystem::path& path) const;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Fits input stats on the source cepstra and output stats on the
/// differential (target - source) cepstra.
void fit_normalization(AcousticModel& model, const AlignedPair& train);

/// Conventional training on the cepstral loss (no filter in the loop).
/// Normalization statistics are fitted first. Validation falls back to the
/// training set when `val` is empty.
TrainingLog pretrain_conventional(AcousticModel& model, const AlignedPair& train,
                                  const AlignedPair& val, const TrainConfig& cfg,
                                  const EpochCallback& on_epoch = {});

/// Joint training of the model and its lifter through the truncation chain at
/// cfg.taps. The lifter is reset to the minimum-phase prefix when it is not
/// already marked trainable.
TrainingLog train_lifter(AcousticModel& model, const AlignedPair& train, const AlignedPair& val,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {});

struct ChainEvaluation {
  double loss = 0.0;  // mean per-frame squared cepstral error
  double rmse = 0.0;  // sqrt(loss)
  Matrix converted;   // cep_dim x T
};

/// Infer-mode evaluation of the truncation chain with the given lifter.
ChainEvaluation evaluate_chain(const AcousticModel& model, std::span<const double> lifter,
                               const AlignedPair& data, std::size_t taps,
                               const SubbandGate* gate = nullptr);

}  // namespace sdvc
