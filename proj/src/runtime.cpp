#include "sdvc/runtime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "sdvc/cepstral.hpp"
#include "sdvc/error.hpp"

namespace sdvc {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Matrix frame_cepstra(std::span<const Spectrum> frames, const AnalysisConfig& cfg) {
  Matrix cep(static_cast<Eigen::Index>(cfg.cep_dim), static_cast<Eigen::Index>(frames.size()));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto c = real_cepstrum(frames[t], cfg);
    cep.col(static_cast<Eigen::Index>(t)) = Eigen::Map<const Vector>(c.data(), c.size());
  }
  return cep;
}

std::span<const double> column(const Matrix& m, Eigen::Index col) {
  return {m.data() + col * m.rows(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

ConvertResult convert(const Waveform& wave, const AcousticModel& model, const ConvertOptions& opts) {
  const auto& cfg = model.config();
  require(wave.sample_rate == cfg.sample_rate, ErrorKind::SampleRateMismatch,
          "input is " + std::to_string(wave.sample_rate) + " Hz but the model expects " +
              std::to_string(cfg.sample_rate) + " Hz");
  require(model.lifter.size() == cfg.cep_dim, ErrorKind::ShapeMismatch,
          "model lifter does not match its cepstral dimension");
  require(opts.clamp > 0.0, ErrorKind::InvalidArgument, "clamp level must be positive");
  wave.validate();
  const std::size_t taps =
      opts.taps != 0 ? opts.taps : (model.trained_taps != 0 ? model.trained_taps : cfg.fft_len);
  require(taps <= cfg.fft_len, ErrorKind::InvalidArgument,
          "tap length " + std::to_string(taps) + " exceeds the FFT length");
  if (opts.gate) opts.gate->validate(cfg.sample_rate);

  ConvertResult res;
  const auto frames = stft(wave, cfg);
  res.frames = frames.size();
  const Matrix cep_d = model.forward(frame_cepstra(frames, cfg), Mode::Infer);

  std::vector<DifferentialFilter> filters;
  filters.reserve(frames.size());
  const SubbandGate* gate = opts.gate ? &*opts.gate : nullptr;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto full = design_filter(column(cep_d, static_cast<Eigen::Index>(t)), model.lifter, cfg,
                                    gate, t);
    res.max_imag_residual = std::max(res.max_imag_residual, full.imag_residual);
    filters.push_back(truncate(full, taps));
  }

  res.wave = ola_filter(wave, filters, cfg, opts.mode);
  for (auto& s : res.wave.samples) {
    if (!std::isfinite(s)) {
      s = 0.0;
      ++res.non_finite;
    } else if (std::abs(s) > opts.clamp) {
      s = std::copysign(opts.clamp, s);
      ++res.clipped;
    }
  }
  return res;
}

std::string MetricsReport::to_csv(bool header) const {
  std::string out = header ? "taps,utterance,frames,rmse\n" : "";
  auto row = [&](const std::string& name, std::size_t frames_, double value) {
    out += std::to_string(taps) + ',' + name + ',' + std::to_string(frames_) + ',' +
           format_double(value) + '\n';
  };
  for (const auto& u : utterances) row(u.name, u.frames, u.rmse);
  row("ALL", frames, rmse);
  return out;
}

MetricsReport eval_rmse(const AcousticModel& model, std::span<const AlignedPair> pairs,
                        std::span<const std::string> names, std::size_t taps,
                        std::optional<std::vector<double>> lifter, const SubbandGate* gate) {
  require(!pairs.empty(), ErrorKind::EmptyInput, "evaluation set is empty");
  require(names.empty() || names.size() == pairs.size(), ErrorKind::LengthMismatch,
          "one name per evaluation pair is required");
  const std::vector<double> weights = lifter ? std::move(*lifter) : model.lifter.coeffs;
  require(weights.size() == model.cep_dim(), ErrorKind::ShapeMismatch,
          "lifter length does not match the model");

  MetricsReport report;
  report.taps = taps;
  double total = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto ev = evaluate_chain(model, weights, pairs[i], taps, gate);
    const std::size_t n = pairs[i].size();
    report.utterances.push_back(
        {names.empty() ? "utt" + std::to_string(i) : names[i], n, ev.rmse});
    total += ev.loss * static_cast<double>(n);
    report.frames += n;
  }
  report.rmse = std::sqrt(total / static_cast<double>(report.frames));
  return report;
}

std::vector<double> cumulative_power(const AcousticModel& model,
                                     std::span<const AlignedPair> pairs) {
  const auto& cfg = model.config();
  std::vector<double> curve(cfg.fft_len, 0.0);
  std::vector<double> cum(cfg.fft_len);
  std::size_t count = 0;
  for (const auto& pair : pairs) {
    if (pair.empty()) continue;
    const Matrix cep_d = model.forward(pair.src_cep, Mode::Infer);
    for (Eigen::Index t = 0; t < cep_d.cols(); ++t) {
      const auto f = design_filter(column(cep_d, t), model.lifter, cfg);
      double acc = 0.0;
      for (std::size_t n = 0; n < cfg.fft_len; ++n) {
        acc += f.taps[n] * f.taps[n];
        cum[n] = acc;
      }
      if (acc <= 0.0) continue;
      for (std::size_t n = 0; n < cfg.fft_len; ++n) curve[n] += cum[n] / acc;
      ++count;
    }
  }
  require(count > 0, ErrorKind::EmptyInput, "no frames with a nonzero filter");
  for (auto& v : curve) v /= static_cast<double>(count);
  return curve;
}

std::size_t taps_to_reach(std::span<const double> curve, double level) {
  for (std::size_t n = 0; n < curve.size(); ++n) {
    if (curve[n] >= level) return n + 1;
  }
  return curve.size();
}

std::string cumulative_power_csv(std::span<const double> curve) {
  std::string out = "tap,cumulative_power\n";
  for (std::size_t n = 0; n < curve.size(); ++n) {
    out += std::to_string(n) + ',' + format_double(curve[n]) + '\n';
  }
  return out;
}

std::vector<BenchRow> bench_filtering(const BenchOptions& opts, const AnalysisConfig& cfg) {
  cfg.validate();
  require(!opts.taps.empty(), ErrorKind::InvalidArgument, "no tap lengths to benchmark");
  require(opts.duration_s > 0.0 && opts.repeats > 0, ErrorKind::InvalidArgument,
          "benchmark duration and repeat count must be positive");
  for (auto l : opts.taps) {
    require(l > 0 && l <= cfg.fft_len, ErrorKind::InvalidArgument,
            "tap length " + std::to_string(l) + " is outside 1.." + std::to_string(cfg.fft_len));
  }

  Rng rng(opts.seed);
  Waveform wave{std::vector<double>(static_cast<std::size_t>(opts.duration_s * cfg.sample_rate)),
                cfg.sample_rate};
  for (auto& s : wave.samples) s = 0.1 * rng.normal();
  const std::size_t frames = frame_count(wave.size(), cfg.hop);
  std::vector<DifferentialFilter> full(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    full[t].frame_index = t;
    full[t].taps.resize(cfg.fft_len);
    for (std::size_t n = 0; n < cfg.fft_len; ++n) {
      full[t].taps[n] = rng.normal() * std::exp(-static_cast<double>(n) / 50.0);
    }
  }

  auto measure = [&](std::size_t taps) {
    std::vector<DifferentialFilter> filters;
    filters.reserve(frames);
    for (const auto& f : full) filters.push_back(truncate(f, taps));
    // One untimed pass first so page faults and clock ramp-up are not billed
    // to whichever length runs first.
    if (ola_filter(wave, filters, cfg, opts.mode).samples.empty()) {
      fail(ErrorKind::EmptyInput, "benchmark produced no output");
    }
    std::vector<double> times;
    for (std::size_t r = 0; r < opts.repeats; ++r) {
      const auto start = std::chrono::steady_clock::now();
      const auto out = ola_filter(wave, filters, cfg, opts.mode);
      const auto stop = std::chrono::steady_clock::now();
      if (out.samples.empty()) fail(ErrorKind::EmptyInput, "benchmark produced no output");
      times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
  };

  std::vector<BenchRow> rows;
  double reference = -1.0;
  for (auto l : opts.taps) {
    const double t = measure(l);
    if (l == cfg.fft_len && reference < 0.0) reference = t;
    rows.push_back({l, t, 1e9 * t / static_cast<double>(wave.size()), 0.0});
  }
  if (reference < 0.0) reference = measure(cfg.fft_len);
  for (auto& row : rows) row.speedup = reference / row.median_s;
  return rows;
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::string out = "taps,median_s,ns_per_sample,speedup\n";
  for (const auto& r : rows) {
    out += std::to_string(r.taps) + ',' + format_double(r.median_s) + ',' +
           format_double(r.ns_per_sample) + ',' + format_double(r.speedup) + '\n';
  }
  return out;
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::InvalidArgument,
          "linear fit needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (syy == 0.0) return 1.0;
  require(sxx > 0.0, ErrorKind::InvalidArgument, "linear fit needs distinct x values");
  return (sxy * sxy) / (sxx * syy);
}

}  // namespace sdvc
