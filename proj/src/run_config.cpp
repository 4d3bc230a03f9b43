#include "sdvc/run_config.hpp"

#include <initializer_list>
#include <json.hpp>
#include <string_view>

#include "sdvc/error.hpp"
#include "sdvc/model_io.hpp"

namespace sdvc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  require(obj.is_object(), ErrorKind::InvalidArgument,
          "config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    require(known, ErrorKind::InvalidArgument,
            "unknown config key '" + std::string(section) + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
  if (obj.contains(key)) dst = obj.at(key).get<T>();
}

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  return root.contains(name) ? root.at(name) : empty;
}

}  // namespace

TrainConfig RunConfig::pretrain_config() const {
  TrainConfig cfg = train;
  cfg.epochs = pretrain_epochs;
  return cfg;
}

TrainConfig RunConfig::finetune_config(std::size_t taps) const {
  TrainConfig cfg = train;
  cfg.epochs = finetune_epochs;
  cfg.taps = taps;
  return cfg;
}

std::optional<SubbandGate> RunConfig::gate() const {
  return gate_enabled ? std::optional<SubbandGate>(train.gate) : std::nullopt;
}

std::filesystem::path RunConfig::frames_path(const std::string& split) const {
  return paths.output_dir / (split + ".frames");
}

std::filesystem::path RunConfig::pretrained_model_path() const {
  return paths.output_dir / "pretrained.sdvc";
}

std::filesystem::path RunConfig::lifter_model_path(std::size_t taps) const {
  return paths.output_dir / ("lifter_L" + std::to_string(taps) + ".sdvc");
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Malformed, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "config", {"analysis", "model", "train", "gate", "paths"});

  RunConfig rc;
  try {
    const json& an = section(root, "analysis");
    check_keys(an, "analysis", {"sample_rate", "window_len", "hop", "fft_len", "cep_dim"});
    int rate = 16000;
    read(an, "sample_rate", rate);
    require(rate == 16000 || rate == 48000, ErrorKind::Unsupported,
            "sample_rate must be 16000 or 48000");
    rc.analysis = AnalysisConfig::for_rate(rate);
    read(an, "window_len", rc.analysis.window_len);
    read(an, "hop", rc.analysis.hop);
    read(an, "fft_len", rc.analysis.fft_len);
    read(an, "cep_dim", rc.analysis.cep_dim);
    rc.analysis.validate();

    const json& model = section(root, "model");
    check_keys(model, "model", {"hidden", "seed"});
    rc.hidden = AcousticModel::default_hidden(rc.analysis);
    read(model, "hidden", rc.hidden);
    read(model, "seed", rc.model_seed);
    for (auto h : rc.hidden) {
      require(h > 0, ErrorKind::InvalidArgument, "hidden layer sizes must be positive");
    }

    const json& tr = section(root, "train");
    check_keys(tr, "train",
               {"lr_pretrain", "lr_finetune", "batch_size", "pretrain_epochs", "finetune_epochs",
                "seed", "taps", "silence_db", "gate_in_training"});
    rc.train = TrainConfig::for_rate(rate);
    read(tr, "lr_pretrain", rc.train.lr_pretrain);
    read(tr, "lr_finetune", rc.train.lr_finetune);
    read(tr, "batch_size", rc.train.batch_size);
    read(tr, "pretrain_epochs", rc.pretrain_epochs);
    read(tr, "finetune_epochs", rc.finetune_epochs);
    read(tr, "seed", rc.train.seed);
    read(tr, "taps", rc.train.taps);
    read(tr, "silence_db", rc.train.silence_db);
    read(tr, "gate_in_training", rc.train.gate_in_training);
    require(rc.train.batch_size > 0, ErrorKind::InvalidArgument, "batch_size must be positive");
    require(rc.train.lr_pretrain > 0.0 && rc.train.lr_finetune > 0.0,
            ErrorKind::InvalidArgument, "learning rates must be positive");
    require(rc.train.taps <= rc.analysis.fft_len, ErrorKind::InvalidArgument,
            "train.taps exceeds fft_len");

    const json& gate = section(root, "gate");
    check_keys(gate, "gate", {"enabled", "crossover_hz", "steepness_hz"});
    read(gate, "enabled", rc.gate_enabled);
    read(gate, "crossover_hz", rc.train.gate.crossover_hz);
    read(gate, "steepness_hz", rc.train.gate.steepness_hz);
    if (rc.gate_enabled || rc.train.gate_in_training) rc.train.gate.validate(rc.analysis.sample_rate);

    const json& paths = section(root, "paths");
    check_keys(paths, "paths", {"train", "val", "test", "output_dir"});
    auto resolve = [&](const char* key) -> std::filesystem::path {
      if (!paths.contains(key)) return {};
      std::filesystem::path p = paths.at(key).get<std::string>();
      return p.is_absolute() ? p : base_dir / p;
    };
    rc.paths.train_list = resolve("train");
    rc.paths.val_list = resolve("val");
    rc.paths.test_list = resolve("test");
    rc.paths.output_dir = resolve("output_dir");
    if (rc.paths.output_dir.empty()) rc.paths.output_dir = base_dir / "out";
    require(!rc.paths.train_list.empty(), ErrorKind::InvalidArgument,
            "config is missing paths.train");
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidArgument, std::string("bad config value: ") + e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  RunConfig rc;
  try {
    rc = parse_run_config(std::string(bytes.begin(), bytes.end()), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
  for (const auto* p : {&rc.paths.train_list, &rc.paths.val_list, &rc.paths.test_list}) {
    require(p->empty() || std::filesystem::is_regular_file(*p), ErrorKind::Io,
            path.string() + ": listed file " + p->string() + " does not exist");
  }
  return rc;
}

}  // namespace sdvc
