// Command-line front end: data preparation, training, conversion, evaluation
// and the filtering benchmark.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/dataset.hpp"
#include "sdvc/error.hpp"
#include "sdvc/model_io.hpp"
#include "sdvc/run_config.hpp"
#include "sdvc/runtime.hpp"
#include "sdvc/synth.hpp"
#include "sdvc/training.hpp"
#include "sdvc/wav.hpp"

namespace fs = std::filesystem;
using namespace sdvc;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text(out_path, text);
  }
}

ConvolutionMode parse_mode(const std::string& name) {
  if (name == "auto") return ConvolutionMode::Auto;
  if (name == "direct") return ConvolutionMode::Direct;
  if (name == "fft") return ConvolutionMode::Fft;
  fail(ErrorKind::InvalidArgument, "unknown convolution mode '" + name + "'");
}

EpochCallback progress(const std::string& stage) {
  return [stage](const EpochLog& e) {
    std::fprintf(stderr, "%s epoch %zu  train %.6g  val %.6g  rmse %.6g\n", stage.c_str(), e.epoch,
                 e.train_loss, e.val_loss, e.rmse);
  };
}

AlignedPair load_split(const RunConfig& rc, const std::string& split, bool required) {
  const auto path = rc.frames_path(split);
  if (!fs::exists(path)) {
    require(!required, ErrorKind::Io, path.string() + " not found; run 'prep' first");
    return {};
  }
  return load_frames(path, rc.analysis);
}

std::string lifter_csv(const Lifter& trained, const AnalysisConfig& cfg) {
  const auto reference = Lifter::minimum_phase(cfg.fft_len, cfg.cep_dim);
  std::string out = "n,trained,minimum_phase,difference\n";
  char buf[128];
  for (std::size_t n = 0; n < trained.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", n, trained.coeffs[n],
                  reference.coeffs[n], trained.coeffs[n] - reference.coeffs[n]);
    out += buf;
  }
  return out;
}

void cmd_prep(const std::string& config_path) {
  const auto rc = load_run_config(config_path);
  fs::create_directories(rc.paths.output_dir);
  const PrepOptions opts{true, rc.train.silence_db};
  for (const auto& [split, list] :
       {std::pair{std::string("train"), rc.paths.train_list}, std::pair{std::string("val"), rc.paths.val_list}}) {
    if (list.empty()) continue;
    const auto entries = read_pair_list(list);
    require(!entries.empty(), ErrorKind::EmptyInput, list.string() + " lists no pairs");
    const auto set = load_aligned_set(entries, rc.analysis, opts);
    const auto frames = concatenate(set.pairs);
    save_frames(rc.frames_path(split), frames, rc.analysis);
    std::fprintf(stderr, "%s: %zu pairs, %zu aligned frames -> %s\n", split.c_str(),
                 entries.size(), frames.size(), rc.frames_path(split).c_str());
  }
}

void cmd_pretrain(const std::string& config_path) {
  const auto rc = load_run_config(config_path);
  const auto train = load_split(rc, "train", true);
  const auto val = load_split(rc, "val", false);
  AcousticModel model(rc.analysis, rc.hidden, rc.model_seed);
  const auto log = pretrain_conventional(model, train, val, rc.pretrain_config(), progress("pretrain"));
  save_model(rc.pretrained_model_path(), model);
  log.write_csv(rc.paths.output_dir / "pretrain_log.csv");
  std::fprintf(stderr, "saved %s\n", rc.pretrained_model_path().c_str());
}

void cmd_train_lifter(const std::string& config_path, std::size_t taps, bool from_scratch) {
  const auto rc = load_run_config(config_path);
  require(taps > 0 && taps <= rc.analysis.fft_len, ErrorKind::InvalidArgument,
          "--taps must be in 1.." + std::to_string(rc.analysis.fft_len));
  const auto train = load_split(rc, "train", true);
  const auto val = load_split(rc, "val", false);
  AcousticModel model;
  if (from_scratch) {
    model = AcousticModel(rc.analysis, rc.hidden, rc.model_seed);
    fit_normalization(model, train);
  } else {
    model = load_model(rc.pretrained_model_path(), &rc.analysis);
  }
  const auto log = train_lifter(model, train, val, rc.finetune_config(taps),
                                progress("lifter L=" + std::to_string(taps)));
  const auto stem = "L" + std::to_string(taps);
  save_model(rc.lifter_model_path(taps), model);
  log.write_csv(rc.paths.output_dir / ("train_lifter_" + stem + "_log.csv"));
  write_text(rc.paths.output_dir / ("lifter_" + stem + ".csv"), lifter_csv(model.lifter, rc.analysis));
  std::fprintf(stderr, "saved %s\n", rc.lifter_model_path(taps).c_str());
}

void cmd_convert(const std::string& model_path, const std::string& in, const std::string& out,
                 std::size_t taps, bool subband, double crossover, const std::string& mode) {
  const auto model = load_model(model_path);
  const auto wave = wav_read(in);
  ConvertOptions opts;
  opts.taps = taps;
  opts.mode = parse_mode(mode);
  if (subband) opts.gate = SubbandGate{crossover, SubbandGate{}.steepness_hz};
  const auto res = convert(wave, model, opts);
  wav_write(out, res.wave);
  std::fprintf(stderr, "converted %zu samples (%zu frames), clipped %zu\n", res.wave.size(),
               res.frames, res.clipped);
}

AlignedSet load_eval_pairs(const std::string& pairs_path, const AnalysisConfig& cfg, bool trim) {
  const auto entries = read_pair_list(pairs_path);
  require(!entries.empty(), ErrorKind::EmptyInput, pairs_path + " lists no pairs");
  return load_aligned_set(entries, cfg, PrepOptions{trim, kDefaultSilenceDb});
}

void cmd_eval(const std::string& model_path, const std::string& pairs_path,
              const std::vector<std::size_t>& taps, bool min_phase, bool trim,
              const std::string& out) {
  const auto model = load_model(model_path);
  const auto set = load_eval_pairs(pairs_path, model.config(), trim);
  std::optional<std::vector<double>> lifter;
  if (min_phase) {
    lifter = Lifter::minimum_phase(model.config().fft_len, model.config().cep_dim).coeffs;
  }
  std::string text;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    require(taps[i] > 0 && taps[i] <= model.config().fft_len, ErrorKind::InvalidArgument,
            "--taps must be in 1.." + std::to_string(model.config().fft_len));
    text += eval_rmse(model, set.pairs, set.names, taps[i], lifter).to_csv(i == 0);
  }
  emit(out, text);
}

void cmd_cumpow(const std::string& model_path, const std::string& pairs_path, bool trim,
                const std::string& out) {
  const auto model = load_model(model_path);
  const auto set = load_eval_pairs(pairs_path, model.config(), trim);
  const auto curve = cumulative_power(model, set.pairs);
  emit(out, cumulative_power_csv(curve));
  std::fprintf(stderr, "taps holding 95%% of the energy: %zu\n", taps_to_reach(curve, 0.95));
}

void cmd_bench(const std::vector<std::size_t>& taps, int rate, double duration,
               std::size_t repeats, const std::string& mode, const std::string& out) {
  BenchOptions opts;
  opts.taps = taps;
  opts.duration_s = duration;
  opts.repeats = repeats;
  opts.mode = parse_mode(mode);
  const auto rows = bench_filtering(opts, AnalysisConfig::for_rate(rate));
  emit(out, bench_csv(rows));
  if (rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
      x.push_back(static_cast<double>(r.taps));
      y.push_back(r.median_s);
    }
    std::fprintf(stderr, "linear fit R^2 = %.4f\n", linear_fit_r2(x, y));
  }
}

void cmd_synth(const std::string& out_dir, int rate, std::size_t n_train, std::size_t n_val,
               std::size_t n_test, double duration, std::uint64_t seed, double jitter) {
  const auto cfg = AnalysisConfig::for_rate(rate);
  const fs::path dir(out_dir);
  fs::create_directories(dir / "wav");
  SynthOptions opts;
  opts.utterances = n_train + n_val + n_test;
  opts.duration_s = duration;
  opts.seed = seed;
  opts.jitter = jitter;
  const auto pairs = synthesize_pairs(cfg, opts);

  std::vector<PairEntry> entries;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%03zu", i);
    const fs::path src = fs::path("wav") / (std::string("src_") + name + ".wav");
    const fs::path tgt = fs::path("wav") / (std::string("tgt_") + name + ".wav");
    wav_write(dir / src, pairs[i].source);
    wav_write(dir / tgt, pairs[i].target);
    entries.push_back({src, tgt});
  }
  const std::span<const PairEntry> all(entries);
  write_pair_list(dir / "train.txt", all.first(n_train));
  nlohmann::json paths = {{"train", "train.txt"}, {"output_dir", "out"}};
  if (n_val > 0) {
    write_pair_list(dir / "val.txt", all.subspan(n_train, n_val));
    paths["val"] = "val.txt";
  }
  if (n_test > 0) {
    write_pair_list(dir / "test.txt", all.subspan(n_train + n_val, n_test));
    paths["test"] = "test.txt";
  }
  const nlohmann::json config = {{"analysis", {{"sample_rate", rate}}}, {"paths", paths}};
  write_text(dir / "config.json", config.dump(2) + "\n");
  std::fprintf(stderr, "wrote %zu pairs and config.json to %s\n", pairs.size(), dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-differential voice conversion with truncated filters"};
  app.require_subcommand(1);

  std::string config, model, in, out, pairs, mode = "auto";
  std::size_t taps = 0;
  std::vector<std::size_t> tap_list;
  bool subband = false, from_scratch = false, min_phase = false, trim = false;
  double crossover = SubbandGate{}.crossover_hz;

  auto* prep = app.add_subcommand("prep", "Trim, analyze and align the train/val pair lists");
  prep->add_option("--config", config, "Run config (JSON)")->required();

  auto* pretrain = app.add_subcommand("pretrain", "Conventional training on the cepstral loss");
  pretrain->add_option("--config", config, "Run config (JSON)")->required();

  auto* lifter = app.add_subcommand("train-lifter", "Joint model and lifter training at a tap length");
  lifter->add_option("--config", config, "Run config (JSON)")->required();
  lifter->add_option("--taps", taps, "Truncation length")->required();
  lifter->add_flag("--from-scratch", from_scratch, "Skip the pretrained model (single stage)");

  auto* conv = app.add_subcommand("convert", "Convert one WAV file");
  conv->add_option("--model", model, "Model file")->required();
  conv->add_option("--in", in, "Input WAV")->required();
  conv->add_option("--out", out, "Output WAV")->required();
  conv->add_option("--taps", taps, "Truncation length (default: the model's)");
  conv->add_flag("--subband", subband, "Leave the band above the crossover untouched");
  conv->add_option("--crossover", crossover, "Sub-band crossover in Hz");
  conv->add_option("--mode", mode, "Convolution: auto, direct or fft");

  auto* eval = app.add_subcommand("eval", "Cepstral RMSE on test pairs");
  eval->add_option("--model", model, "Model file")->required();
  eval->add_option("--pairs", pairs, "Pair list")->required();
  eval->add_option("--taps", tap_list, "Truncation length(s), comma separated")
      ->required()
      ->delimiter(',');
  eval->add_flag("--min-phase", min_phase, "Use the fixed minimum-phase lifter");
  eval->add_flag("--trim", trim, "Trim silence before alignment");
  eval->add_option("--out", out, "CSV output (default: stdout)");

  auto* cumpow = app.add_subcommand("cumpow", "Cumulative power of the differential filters");
  cumpow->add_option("--model", model, "Model file")->required();
  cumpow->add_option("--pairs", pairs, "Pair list")->required();
  cumpow->add_flag("--trim", trim, "Trim silence before alignment");
  cumpow->add_option("--out", out, "CSV output (default: stdout)");

  int rate = 16000;
  double duration = 10.0;
  std::size_t repeats = 5;
  auto* bench = app.add_subcommand("bench", "Time overlap-add filtering against tap length");
  bench->add_option("--taps", tap_list, "Tap lengths, comma separated")->required()->delimiter(',');
  bench->add_option("--rate", rate, "Sample rate (16000 or 48000)");
  bench->add_option("--duration", duration, "Signal length in seconds");
  bench->add_option("--repeats", repeats, "Timed repetitions per tap length");
  bench->add_option("--mode", mode, "Convolution: direct, fft or auto")->default_str("direct");
  bench->add_option("--out", out, "CSV output (default: stdout)");

  std::size_t n_train = 8, n_val = 2, n_test = 2;
  std::uint64_t seed = 7;
  double jitter = 0.0;
  auto* synth = app.add_subcommand("synth", "Write a synthetic speaker-pair corpus");
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--rate", rate, "Sample rate (16000 or 48000)");
  synth->add_option("--train", n_train, "Training pairs");
  synth->add_option("--val", n_val, "Validation pairs");
  synth->add_option("--test", n_test, "Test pairs");
  synth->add_option("--duration", duration, "Seconds per utterance")->default_str("2");
  synth->add_option("--seed", seed, "Random seed");
  synth->add_option("--jitter", jitter, "Per-utterance cepstral jitter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prep) {
      cmd_prep(config);
    } else if (*pretrain) {
      cmd_pretrain(config);
    } else if (*lifter) {
      cmd_train_lifter(config, taps, from_scratch);
    } else if (*conv) {
      cmd_convert(model, in, out, taps, subband, crossover, mode);
    } else if (*eval) {
      cmd_eval(model, pairs, tap_list, min_phase, trim, out);
    } else if (*cumpow) {
      cmd_cumpow(model, pairs, trim, out);
    } else if (*bench) {
      cmd_bench(tap_list, rate, duration, repeats, bench->count("--mode") ? mode : "direct", out);
    } else if (*synth) {
      cmd_synth(out, rate, n_train, n_val, n_test, synth->count("--duration") ? duration : 2.0,
                seed, jitter);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "sdvc: %s: %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sdvc: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
