#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sdvc/error.hpp"
#include "sdvc/filter_design.hpp"

using namespace sdvc;

namespace {

std::vector<double> random_cepstrum(std::mt19937_64& rng, std::size_t c) {
  auto cep = oracle::random_vector(rng, c, 0.5);
  for (std::size_t n = 1; n < c; ++n) cep[n] /= static_cast<double>(n);
  return cep;
}

}  // namespace

TEST_CASE("design_filter examples") {
  const auto cfg = AnalysisConfig::narrow_band();
  const auto umin = Lifter::minimum_phase(cfg.fft_len, cfg.cep_dim);

  const auto delta = design_filter(std::vector<double>(40, 0.0), umin, cfg);
  REQUIRE(delta.taps.size() == 512);
  CHECK(delta.taps[0] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t n = 1; n < 512; ++n) CHECK(std::abs(delta.taps[n]) < 1e-14);

  std::vector<double> gain(40, 0.0);
  gain[0] = 1.0;
  const auto scaled = design_filter(gain, umin, cfg, nullptr, 7);
  CHECK(scaled.frame_index == 7);
  CHECK(scaled.taps[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  for (std::size_t n = 1; n < 512; ++n) CHECK(std::abs(scaled.taps[n]) < 1e-13);
}

TEST_CASE("design_filter matches a naive-DFT pipeline and is causal") {
  std::mt19937_64 rng(40);
  AnalysisConfig cfg = AnalysisConfig::narrow_band();
  cfg.fft_len = 128;
  cfg.window_len = 128;
  cfg.hop = 64;
  cfg.cep_dim = 12;
  const auto umin = Lifter::minimum_phase(128, 12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto cep = random_cepstrum(rng, 12);
    const auto f = design_filter(cep, umin, cfg);

    std::vector<oracle::cplx> v(128, 0.0);
    for (std::size_t n = 0; n < 12; ++n) v[n] = umin.coeffs[n] * cep[n];
    auto s = oracle::naive_dft(v);
    for (auto& z : s) z = std::exp(z);
    const auto h = oracle::naive_dft(s, true);
    for (std::size_t n = 0; n < 128; ++n) CHECK(std::abs(f.taps[n] - h[n].real()) < 1e-8);
    CHECK(f.imag_residual < 1e-12);
    CHECK(energy_ratio(f.taps, 64) > 0.999);
  }
}

TEST_CASE("truncation") {
  std::mt19937_64 rng(2);
  const DifferentialFilter f{oracle::random_vector(rng, 512), 3, 0.0};
  CHECK(truncate(f, 512).taps == f.taps);
  const auto t32 = truncate(f, 32);
  CHECK(t32.taps.size() == 32);
  CHECK(t32.frame_index == 3);

  double head = 0.0, total = 0.0;
  for (std::size_t n = 0; n < 512; ++n) {
    total += f.taps[n] * f.taps[n];
    if (n < 32) head += f.taps[n] * f.taps[n];
  }
  CHECK(energy_ratio(f.taps, 32) == doctest::Approx(head / total).epsilon(1e-14));

  for (std::size_t l1 : {400u, 100u, 33u}) {
    for (std::size_t l2 : {1u, 32u}) {
      CHECK(truncate(truncate(f, l1), l2).taps == truncate(f, l2).taps);
    }
  }

  const DifferentialFilter delta{{1.0, 0.0, 0.0, 0.0}, 0, 0.0};
  CHECK(truncate(delta, 1).taps == std::vector<double>{1.0});

  CHECK_THROWS_AS(truncate(f, 0), Error);
  CHECK_THROWS_AS(truncate(f, 513), Error);

  const auto w = truncation_window(8, 3);
  CHECK(w == std::vector<double>{1, 1, 1, 0, 0, 0, 0, 0});
  CHECK(truncation_window(8, 5, 2) == std::vector<double>{1, 1, 1, 0, 0, 0, 1, 1});
  CHECK_THROWS_AS(truncation_window(8, 3, 3), Error);
}

TEST_CASE("two-sided filters truncate around lag zero") {
  // taps[m] holds lag m - 8.
  DifferentialFilter f{std::vector<double>(32), 3, 0.0, 8};
  for (std::size_t m = 0; m < 32; ++m) f.taps[m] = static_cast<double>(m) - 8.0;

  const auto t = truncate(f, 12);
  CHECK(t.lead == 3);
  CHECK(t.frame_index == 3);
  REQUIRE(t.taps.size() == 12);
  for (std::size_t m = 0; m < 12; ++m) CHECK(t.taps[m] == static_cast<double>(m) - 3.0);

  CHECK(truncate(f, 32).taps == f.taps);
  CHECK(truncate(f, 1).taps == std::vector<double>{0.0});
  CHECK(truncate(truncate(f, 16), 8).taps == truncate(f, 8).taps);

  // Too few causal taps remain to keep three quarters of the window.
  const DifferentialFilter late{std::vector<double>(8, 1.0), 0, 0.0, 7};
  CHECK_THROWS_AS(truncate(late, 8), Error);
}

TEST_CASE("truncated_spectrum places negative lags at the end of the buffer") {
  const auto cfg = AnalysisConfig::narrow_band();
  // A one-sample advance.
  const auto adv = truncated_spectrum(DifferentialFilter{{1.0, 0.0}, 0, 0.0, 1}, cfg);
  for (std::size_t k = 0; k < 512; ++k) {
    CHECK(std::abs(adv[k] - std::polar(1.0, 2.0 * std::numbers::pi * k / 512.0)) < 1e-12);
  }
}

TEST_CASE("gated design matches the circular response at every lag") {
  const auto cfg = AnalysisConfig::full_band();
  std::mt19937_64 rng(15);
  const auto cep = random_cepstrum(rng, cfg.cep_dim);
  const Lifter lifter = Lifter::minimum_phase(2048, cfg.cep_dim);
  const SubbandGate gate;
  const auto spec = subband_gate(reconstruct_spectrum(cep, lifter, cfg), gate, cfg);
  const auto circular = impulse_response(spec);
  const auto f = design_filter(cep, lifter, cfg, &gate);
  REQUIRE(f.lead == 512);
  for (std::size_t m = 0; m < 2048; ++m) {
    CHECK(f.taps[m] == circular.taps[(m + 2048 - 512) % 2048]);
  }
  const auto back = truncated_spectrum(f, cfg);
  for (std::size_t k = 0; k < 2048; ++k) CHECK(std::abs(back[k] - spec[k]) < 1e-9);
}

TEST_CASE("truncated_spectrum examples") {
  const auto cfg = AnalysisConfig::narrow_band();
  const auto ones = truncated_spectrum(DifferentialFilter{{1.0}, 0, 0.0}, cfg);
  for (const auto& b : ones) CHECK(std::abs(b - Complex(1.0)) < 1e-15);

  const auto shifted = truncated_spectrum(DifferentialFilter{{0.0, 1.0}, 0, 0.0}, cfg);
  for (std::size_t k = 0; k < 512; ++k) {
    CHECK(std::abs(shifted[k] - std::polar(1.0, -2.0 * std::numbers::pi * k / 512.0)) < 1e-12);
  }

  std::mt19937_64 rng(6);
  DifferentialFilter r{oracle::random_vector(rng, 32), 0, 0.0};
  std::vector<double> padded(r.taps);
  padded.resize(512, 0.0);
  const auto ref = oracle::naive_dft_real(padded);
  const auto got = truncated_spectrum(r, cfg);
  for (std::size_t k = 0; k < 512; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-10);
}

TEST_CASE("sub-band gate") {
  const auto cfg = AnalysisConfig::full_band();
  const double bin_hz = 48000.0 / 2048.0;
  std::mt19937_64 rng(14);
  Spectrum spec(2048);
  {
    const auto cep = random_cepstrum(rng, cfg.cep_dim);
    spec = reconstruct_spectrum(cep, Lifter::minimum_phase(2048, cfg.cep_dim), cfg);
  }

  SUBCASE("weights") {
    const SubbandGate gate;
    CHECK(gate.weight(8000.0) == 0.5);
    CHECK(gate.weight(0.0) > 1.0 - 1e-15);
    CHECK(gate.weight(20000.0) < 1e-15);
    const SubbandGate hard{8000.0, 0.0};
    CHECK(hard.weight(7999.0) == 1.0);
    CHECK(hard.weight(8000.0) == 0.5);
    CHECK(hard.weight(8001.0) == 0.0);
    const auto g = gate_weights(gate, cfg);
    for (std::size_t k = 1; k < 1024; ++k) CHECK(g[k] == g[2048 - k]);
  }

  SUBCASE("low band passes, high band becomes identity, crossover halves") {
    const SubbandGate gate{341 * bin_hz, 200.0};
    const auto out = subband_gate(spec, gate, cfg);
    for (std::size_t k = 0; k < 100; ++k) CHECK(std::abs(out[k] - spec[k]) < 1e-8 * std::abs(spec[k]));
    for (std::size_t k = 600; k <= 1024; ++k) CHECK(std::abs(out[k] - Complex(1.0)) < 1e-9);
    CHECK(std::abs(out[341] - (1.0 + 0.5 * (spec[341] - 1.0))) < 1e-14);
  }

  SUBCASE("g = 1 everywhere bypasses bit-exactly") {
    const SubbandGate open{1e9, 0.0};
    const auto out = subband_gate(spec, open, cfg);
    for (std::size_t k = 0; k < 2048; ++k) CHECK(out[k] == spec[k]);
  }

  SUBCASE("gated responses stay real") {
    for (double steep : {0.0, 50.0, 200.0, 1000.0}) {
      const auto out = subband_gate(spec, SubbandGate{8000.0, steep}, cfg);
      CHECK(impulse_response(out).imag_residual < 1e-9);
    }
  }

  SUBCASE("design_filter with a gate and a zero cepstrum is a delta") {
    const SubbandGate gate;
    const auto f = design_filter(std::vector<double>(cfg.cep_dim, 0.0),
                                 Lifter::minimum_phase(2048, cfg.cep_dim), cfg, &gate);
    REQUIRE(f.lead == 512);
    for (std::size_t n = 0; n < 2048; ++n) {
      CHECK(std::abs(f.taps[n] - (n == 512 ? 1.0 : 0.0)) < 1e-14);
    }
  }

  SUBCASE("validation") {
    const SubbandGate at_nyquist{24000.0, 200.0};
    const SubbandGate at_zero{0.0, 200.0};
    const SubbandGate negative{8000.0, -1.0};
    CHECK_THROWS_AS(at_nyquist.validate(48000), Error);
    CHECK_THROWS_AS(at_zero.validate(48000), Error);
    CHECK_THROWS_AS(negative.validate(48000), Error);
    CHECK_NOTHROW(SubbandGate().validate(48000));
  }
}
