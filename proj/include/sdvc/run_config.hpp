#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdvc/config.hpp"
#include "sdvc/filter_design.hpp"
#include "sdvc/training.hpp"

namespace sdvc {

struct RunPaths {
  std::filesystem::path train_list;
  std::filesystem::path val_list;  // optional; empty when not given
  std::filesystem::path test_list;  // optional
  std::filesystem::path output_dir;
};

/// Everything a training or evaluation run needs, loaded from one JSON file:
///
///   {
///     "analysis": {"sample_rate": 16000, "window_len": 400, "hop": 80,
///                  "fft_len": 512, "cep_dim": 40},
///     "model":    {"hidden": [280, 100], "seed": 1},
///     "train":    {"lr_pretrain": 5e-4, "lr_finetune": 1e-5, "batch_size": 1000,
///                  "pretrain_epochs": 100, "finetune_epochs": 100, "seed": 1,
///                  "taps": 512, "silence_db": 40},
///     "gate":     {"enabled": false, "crossover_hz": 8000, "steepness_hz": 200},
///     "paths":    {"train": "train.txt", "val": "val.txt", "test": "test.txt",
///                  "output_dir": "out"}
///   }
///
/// Every key is optional except paths.train; missing values take the preset of
/// the chosen sample rate. Unknown keys are rejected. Relative paths are taken
/// from the directory of the config file.
struct RunConfig {
  AnalysisConfig analysis;
  std::vector<std::size_t> hidden;
  std::uint64_t model_seed = 1;
  TrainConfig train;
  std::size_t pretrain_epochs = 100;
  std::size_t finetune_epochs = 100;
  bool gate_enabled = false;
  RunPaths paths;

  TrainConfig pretrain_config() const;
  TrainConfig finetune_config(std::size_t taps) const;
  std::optional<SubbandGate> gate() const;

  std::filesystem::path frames_path(const std::string& split) const;
  std::filesystem::path pretrained_model_path() const;
  std::filesystem::path lifter_model_path(std::size_t taps) const;
};

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);

/// Parses the file and checks that the referenced list files exist.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace sdvc
