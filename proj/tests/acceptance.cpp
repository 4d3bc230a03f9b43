// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion,
// followed by the measurements behind it, and exits non-zero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdvc/chain.hpp"
#include "sdvc/model_io.hpp"
#include "sdvc/runtime.hpp"
#include "sdvc/simd/kernels.hpp"
#include "sdvc/synth.hpp"
#include "sdvc/training.hpp"

using namespace sdvc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(const char* name, bool pass, const std::string& detail, double secs) {
  std::printf("%s  %-28s %s  [%.1f s]\n", pass ? "PASS" : "FAIL", name, detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& line) {
  std::printf("      %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

AnalysisConfig small_config(std::size_t n, std::size_t c) {
  AnalysisConfig cfg;
  cfg.fft_len = n;
  cfg.window_len = n;
  cfg.hop = n / 2;
  cfg.cep_dim = c;
  return cfg;
}

Spectrum real_frame_spectrum(std::mt19937_64& rng, std::size_t n) {
  const auto x = oracle::random_vector(rng, n);
  const auto d = oracle::naive_dft_real(x);
  return Spectrum(d.begin(), d.end());
}

// ---------------------------------------------------------------------------

void gradient_fidelity() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  const std::size_t sizes[] = {16, 32, 64};
  constexpr std::size_t kInstances = 120;
  constexpr double kFloor = 1e-6;
  double worst = 0.0;
  std::size_t checked = 0;

  for (std::size_t inst = 0; inst < kInstances; ++inst) {
    const std::size_t n = sizes[inst % 3];
    const std::size_t c = 4 + inst % 5;
    const std::size_t taps = 1 + rng() % n;
    const auto cfg = small_config(n, c);
    const std::optional<SubbandGate> gate =
        inst % 4 == 3 ? std::optional<SubbandGate>(SubbandGate{2000.0 + 200.0 * (inst % 20), 250.0})
                      : std::nullopt;
    const Mode mode = inst % 2 == 0 ? Mode::Train : Mode::Infer;

    AcousticModel model(cfg, {5, 3}, inst);
    // Non-trivial batch-norm running statistics for infer mode.
    for (auto& r : model.running_stats()) {
      r.value_mean.setRandom();
      r.gate_mean.setRandom();
      r.value_var.setConstant(1.5);
      r.gate_var.setConstant(0.7);
    }
    auto lifter = Lifter::minimum_phase(n, c).coeffs;
    const auto jitter = oracle::random_vector(rng, c, 0.2);
    for (std::size_t i = 0; i < c; ++i) lifter[i] += jitter[i];

    const Eigen::Index frames = 3;
    Matrix src(static_cast<Eigen::Index>(c), frames), tgt(static_cast<Eigen::Index>(c), frames);
    std::vector<Spectrum> spec;
    for (Eigen::Index j = 0; j < frames; ++j) {
      spec.push_back(real_frame_spectrum(rng, n));
      const auto cx = real_cepstrum(spec.back(), cfg);
      const auto d = oracle::random_vector(rng, c, 0.3);
      for (std::size_t i = 0; i < c; ++i) {
        src(static_cast<Eigen::Index>(i), j) = cx[i];
        tgt(static_cast<Eigen::Index>(i), j) = cx[i] + d[i];
      }
    }
    const FrameBatch batch{src, tgt, spec};
    TruncationChain chain(cfg, taps, gate);

    ChainGradients grads(model.parameter_count(), c);
    chain_loss(model, lifter, batch, chain, mode, &grads);

    std::vector<double> params(model.parameters().begin(), model.parameters().end());
    auto loss = [&] {
      std::copy(params.begin(), params.end(), model.parameters().begin());
      return chain_loss(model, lifter, batch, chain, mode).loss;
    };
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double fd = oracle::five_point_difference(loss, params, i, 1e-4);
      worst = std::max(worst, oracle::relative_error(grads.params[i], fd, kFloor));
      ++checked;
    }
    for (std::size_t i = 0; i < c; ++i) {
      const double fd = oracle::five_point_difference(loss, lifter, i, 1e-4);
      worst = std::max(worst, oracle::relative_error(grads.lifter[i], fd, kFloor));
      ++checked;
    }
  }
  const double secs = seconds_since(start);
  verdict("gradient-fidelity", worst < 1e-4 && secs < 60.0,
          fmt("%zu instances, %zu partials, max rel err %.2e (< 1e-4)", kInstances, checked, worst),
          secs);
}

void oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(202);
  double worst_loss = 0.0, worst_cep = 0.0;
  std::size_t count = 0;
  struct Shape {
    std::size_t n, c;
  };
  std::vector<Shape> shapes;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    for (std::size_t c = 4; c <= 8; ++c) shapes.push_back({n, c});
  }
  shapes.push_back({512, 40});

  for (const auto& s : shapes) {
    const int reps = s.n == 512 ? 3 : 10;
    for (int r = 0; r < reps; ++r) {
      const auto cfg = small_config(s.n, s.c);
      const std::size_t taps = 1 + rng() % s.n;
      const bool gated = r % 2 == 1;
      const std::optional<SubbandGate> gate =
          gated ? std::optional<SubbandGate>(SubbandGate{3000.0, 400.0}) : std::nullopt;
      TruncationChain chain(cfg, taps, gate);

      const auto cep_d = oracle::random_vector(rng, s.c, 0.3);
      auto lifter = Lifter::minimum_phase(s.n, s.c).coeffs;
      const auto jitter = oracle::random_vector(rng, s.c, 0.2);
      for (std::size_t i = 0; i < s.c; ++i) lifter[i] += jitter[i];
      const auto cep_y = oracle::random_vector(rng, s.c, 0.5);
      const auto spec = real_frame_spectrum(rng, s.n);

      const double loss = chain.forward(cep_d, lifter, spec, cep_y);
      const auto ref = oracle::naive_chain(cep_d, lifter, spec, cep_y, s.n, taps,
                                           gated ? gate_weights(*gate, cfg) : std::vector<double>{});
      worst_loss = std::max(worst_loss, std::abs(loss - ref.loss));
      for (std::size_t i = 0; i < s.c; ++i) {
        worst_cep = std::max(worst_cep, std::abs(chain.converted()[i] - ref.cep_hat[i]));
      }
      ++count;
    }
  }
  verdict("oracle-equivalence", worst_loss < 1e-8,
          fmt("%zu instances, max |loss diff| %.2e, max |cepstrum diff| %.2e (< 1e-8)", count,
              worst_loss, worst_cep),
          seconds_since(start));
}

// ---------------------------------------------------------------------------

struct TaskResults {
  AlignedPair train, val;
  AcousticModel pretrained;
  double full_rmse = 0.0;  // pretrained model, minimum-phase lifter, l = N
  std::vector<std::size_t> taps;
  std::vector<double> fixed, trained, finetuned_umin;
  AcousticModel model32;
  double seconds = 0.0;
};

TaskResults run_synthetic_task() {
  const auto start = Clock::now();
  const auto cfg = AnalysisConfig::narrow_band();
  SynthOptions opts;
  opts.utterances = 10;
  opts.duration_s = 2.0;
  const auto pairs = synthesize_pairs(cfg, opts);
  std::vector<AlignedPair> train, val;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (i < 8 ? train : val).push_back(align_utterances(pairs[i].source, pairs[i].target, cfg));
  }

  TaskResults res;
  res.train = concatenate(train);
  res.val = concatenate(val);

  TrainConfig tc;
  tc.batch_size = 200;
  tc.lr_pretrain = 5e-4;
  tc.lr_finetune = 5e-4;
  tc.epochs = 30;
  res.pretrained = AcousticModel(cfg, AcousticModel::default_hidden(cfg), 1);
  pretrain_conventional(res.pretrained, res.train, res.val, tc);
  info(fmt("synthetic task: %zu train / %zu val aligned frames, pretrained in %.1f s",
           res.train.size(), res.val.size(), seconds_since(start)));

  const auto umin = Lifter::minimum_phase(cfg.fft_len, cfg.cep_dim).coeffs;
  res.full_rmse = evaluate_chain(res.pretrained, umin, res.val, cfg.fft_len).rmse;
  tc.epochs = 50;
  for (std::size_t l : {32u, 48u, 64u, 128u}) {
    AcousticModel m = res.pretrained;
    tc.taps = l;
    train_lifter(m, res.train, res.val, tc);
    res.taps.push_back(l);
    res.fixed.push_back(evaluate_chain(res.pretrained, umin, res.val, l).rmse);
    res.trained.push_back(evaluate_chain(m, m.lifter.coeffs, res.val, l).rmse);
    res.finetuned_umin.push_back(evaluate_chain(m, umin, res.val, l).rmse);
    info(fmt("l=%3zu  fixed u_min %.4f  trained %.4f  gap %+.4f", l, res.fixed.back(),
             res.trained.back(), res.fixed.back() - res.trained.back()));
    if (l == 32) res.model32 = std::move(m);
  }
  res.seconds = seconds_since(start);
  return res;
}

void trained_beats_fixed(const TaskResults& r) {
  bool every = true;
  for (std::size_t i = 0; i < r.taps.size(); ++i) every = every && r.trained[i] < r.fixed[i];
  const double gap_short = r.fixed.front() - r.trained.front();
  const double gap_long = r.fixed.back() - r.trained.back();
  verdict("trained-lifter-beats-fixed", every && gap_short > gap_long && r.seconds <= 1800.0,
          fmt("trained < fixed at every l: %s; gap l=32 %.4f > gap l=128 %.4f", every ? "yes" : "no",
              gap_short, gap_long),
          r.seconds);
}

void short_filter_matches_full(const TaskResults& r) {
  const double ratio = r.trained.front() / r.full_rmse;
  verdict("short-filter-matches-full", ratio <= 1.05,
          fmt("RMSE l=32 trained %.4f vs l=512 u_min %.4f, ratio %.4f (<= 1.05)", r.trained.front(),
              r.full_rmse, ratio),
          0.0);
  // How much of the gain the lifter itself carries, as opposed to the model
  // fine-tuned through the truncated chain.
  info(fmt("ablation at l=32: fine-tuned model with u_min %.4f, with trained lifter %.4f",
           r.finetuned_umin.front(), r.trained.front()));
}

void energy_concentration(const TaskResults& r) {
  const auto start = Clock::now();
  const AlignedPair pairs[] = {r.val};
  const auto curve = cumulative_power(r.pretrained, pairs);
  const std::size_t at = taps_to_reach(curve, 0.95);
  verdict("energy-concentration", at <= 128,
          fmt("95%% of filter energy within %zu taps (<= 128); power at tap 100 %.4f", at,
              curve[99]),
          seconds_since(start));
}

// ---------------------------------------------------------------------------

double rms(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

void subband_identity() {
  const auto start = Clock::now();
  const auto cfg = AnalysisConfig::full_band();
  Waveform high{std::vector<double>(48000), 48000};
  std::mt19937_64 rng(303);
  const double freqs[] = {9500.0, 12000.0, 15250.0, 19800.0};
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (double f : freqs) {
    const double p = phase(rng);
    for (std::size_t n = 0; n < high.size(); ++n) {
      high.samples[n] += 0.15 * std::sin(2.0 * std::numbers::pi * f * n / 48000.0 + p);
    }
  }
  // A slow tremolo makes every frame's filter different; 50 ms raised-cosine
  // fades keep the onset and offset from splattering energy below 9 kHz.
  const std::size_t fade = 2400;
  for (std::size_t n = 0; n < high.size(); ++n) {
    high.samples[n] *= 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * 3.0 * n / 48000.0);
  }
  for (std::size_t n = 0; n < fade; ++n) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * n / fade);
    high.samples[n] *= g;
    high.samples[high.size() - 1 - n] *= g;
  }

  auto rms_change = [&](const Waveform& out) {
    std::vector<double> d(high.size());
    for (std::size_t n = 0; n < high.size(); ++n) d[n] = out.samples[n] - high.samples[n];
    return rms(d) / rms(high.samples);
  };

  // Untrained network with speech-scale output statistics: a fixed speaker
  // differential plus per-frame variation that shrinks with quefrency.
  AcousticModel model(cfg, {64}, 17);
  const auto offset = reference_differential(cfg);
  for (std::size_t i = 0; i < cfg.cep_dim; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    model.output_stats.mean[k] = offset[i];
    model.output_stats.stddev[k] = 1.0 / (1.0 + static_cast<double>(i));
  }
  ConvertOptions gated;
  gated.gate = SubbandGate{};
  const double change = rms_change(convert(high, model, gated).wave);
  const double change_ungated = rms_change(convert(high, model).wave);

  // Unit-variance output on every coefficient: far rougher than any speech
  // differential. Reported, not judged.
  const AcousticModel rough(cfg, {64}, 17);
  const double change_rough = rms_change(convert(high, rough, gated).wave);

  std::vector<double> diff(high.size());
  const AcousticModel zero = make_model_shell(cfg, {4});
  double worst_identity = 0.0;
  for (const auto* w : {&high}) {
    const auto same = convert(*w, zero);
    for (std::size_t n = 0; n < w->size(); ++n) diff[n] = same.wave.samples[n] - w->samples[n];
    worst_identity = std::max(worst_identity, rms(diff));
  }
  const auto narrow = AnalysisConfig::narrow_band();
  const auto speech = synthesize_source(narrow, 2.0, 5, 0.1);
  const auto same = convert(speech, make_model_shell(narrow, {4}));
  std::vector<double> d2(speech.size());
  for (std::size_t n = 0; n < speech.size(); ++n) d2[n] = same.wave.samples[n] - speech.samples[n];
  worst_identity = std::max(worst_identity, rms(d2));

  verdict("subband-identity", change < 0.005 && worst_identity < 1e-6,
          fmt("gated change %.3f%% RMS (< 0.5%%), zero-differential error %.1e RMS (< 1e-6)",
              100.0 * change, worst_identity),
          seconds_since(start));
  info(fmt("same model without the gate changes the signal by %.1f%% RMS", 100.0 * change_ungated));
  info(fmt("unit-variance differential (stress case) with the gate: %.3f%% RMS", 100.0 * change_rough));
}

void linear_cost() {
  const auto start = Clock::now();
  BenchOptions opts;
  opts.taps = {32, 64, 128, 256, 512};
  opts.duration_s = 10.0;
  opts.repeats = 11;
  opts.mode = ConvolutionMode::Direct;
  const auto rows = bench_filtering(opts, AnalysisConfig::narrow_band());
  std::vector<double> x, y;
  for (const auto& r : rows) {
    x.push_back(static_cast<double>(r.taps));
    y.push_back(r.median_s);
  }
  const double r2 = linear_fit_r2(x, y);
  const double speedup = rows.front().speedup;
  const double secs = seconds_since(start);
  verdict("linear-cost", r2 > 0.95 && speedup >= 8.0 && secs < 120.0,
          fmt("direct mode on %s: R^2 %.4f (> 0.95), speedup l=32 vs l=512 %.1fx (>= 8)",
              std::string(simd::to_string(simd::kernels().isa)).c_str(), r2, speedup),
          secs);
  for (const auto& r : rows) {
    info(fmt("l=%3zu  median %.4f s  %.2f ns/sample", r.taps, r.median_s, r.ns_per_sample));
  }
}

void determinism(const TaskResults& r) {
  const auto start = Clock::now();
  const auto cfg = AnalysisConfig::narrow_band();
  auto run = [&] {
    AcousticModel m(cfg, AcousticModel::default_hidden(cfg), 9);
    TrainConfig tc;
    tc.batch_size = 200;
    tc.lr_pretrain = 5e-4;
    tc.lr_finetune = 5e-4;
    tc.epochs = 3;
    std::string logs = pretrain_conventional(m, r.train, r.val, tc).to_csv(false);
    tc.epochs = 2;
    tc.taps = 32;
    logs += train_lifter(m, r.train, r.val, tc).to_csv(false);
    return std::pair{logs, serialize_model(m)};
  };
  const auto a = run();
  const auto b = run();
  const bool same_logs = a.first == b.first;
  const bool same_models = a.second == b.second;

  const auto path = std::filesystem::temp_directory_path() / "sdvc_acceptance_model.sdvc";
  save_model(path, r.model32);
  const auto loaded = load_model(path, &cfg);
  std::filesystem::remove(path);
  const bool same_bytes = serialize_model(loaded) == serialize_model(r.model32);
  const bool same_eval = evaluate_chain(loaded, loaded.lifter.coeffs, r.val, 32).loss ==
                         evaluate_chain(r.model32, r.model32.lifter.coeffs, r.val, 32).loss;

  verdict("determinism", same_logs && same_models && same_bytes && same_eval,
          fmt("identical logs %s, identical weights %s, save/load bytes %s, reloaded eval %s",
              same_logs ? "yes" : "no", same_models ? "yes" : "no", same_bytes ? "yes" : "no",
              same_eval ? "yes" : "no"),
          seconds_since(start));
}

}  // namespace

int main() {
  std::printf("kernels: %s\n", std::string(simd::to_string(simd::kernels().isa)).c_str());
  // Timing runs first, before training has grown the heap and warmed the
  // machine.
  linear_cost();
  gradient_fidelity();
  oracle_equivalence();
  const auto task = run_synthetic_task();
  trained_beats_fixed(task);
  short_filter_matches_full(task);
  energy_concentration(task);
  subband_identity();
  determinism(task);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
