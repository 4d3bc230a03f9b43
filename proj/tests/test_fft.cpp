#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "sdvc/fft.hpp"
#include "sdvc/simd/kernels.hpp"

using namespace sdvc;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ComplexVector random_complex(std::mt19937_64& rng, std::size_t n) {
  const auto re = oracle::random_vector(rng, n);
  const auto im = oracle::random_vector(rng, n);
  ComplexVector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

}  // namespace

TEST_CASE("dft examples") {
  ComplexVector delta(8, 0.0);
  delta[0] = 1.0;
  for (const auto& b : dft(std::span<const Complex>(delta))) CHECK(std::abs(b - Complex(1.0)) < 1e-15);

  const std::vector<double> ones(4, 1.0);
  const auto x = dft(std::span<const double>(ones));
  CHECK(std::abs(x[0] - Complex(4.0)) < 1e-15);
  for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(x[k]) < 1e-15);
}

TEST_CASE("fft agrees with the naive DFT for every power of two up to 4096") {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 4096; n *= 2) {
    CAPTURE(n);
    const auto x = random_complex(rng, n);
    const auto fast = dft(std::span<const Complex>(x));
    const auto slow = oracle::naive_dft(x);
    double scale = 0.0;
    for (const auto& v : slow) scale = std::max(scale, std::abs(v));
    CHECK(max_abs_diff(fast, slow) / scale < 1e-8);

    const auto back = idft(fast);
    CHECK(max_abs_diff(back, x) < 1e-10);
    const auto slow_inv = oracle::naive_dft(x, true);
    CHECK(max_abs_diff(idft(x), slow_inv) / (scale / static_cast<double>(n)) < 1e-8);
  }
}

TEST_CASE("round trip of a random length-512 vector") {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_vector(rng, 512);
  const auto back = idft(dft(std::span<const double>(x)));
  double err = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err = std::max(err, std::abs(back[i] - Complex(x[i])));
    norm = std::max(norm, std::abs(x[i]));
  }
  CHECK(err / norm < 1e-10);
}

TEST_CASE("Parseval, linearity and conjugate symmetry on random inputs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::size_t{1} << (2 + trial % 10);
    const auto x = oracle::random_vector(rng, n);
    const auto y = oracle::random_vector(rng, n);
    const auto fx = dft(std::span<const double>(x));
    const auto fy = dft(std::span<const double>(y));

    double time_energy = 0.0, freq_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      time_energy += x[i] * x[i];
      freq_energy += std::norm(fx[i]);
    }
    CHECK(std::abs(time_energy - freq_energy / static_cast<double>(n)) / time_energy < 1e-9);

    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = 2.0 * x[i] - 0.5 * y[i];
    const auto fm = dft(std::span<const double>(mix));
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fm[k] - (2.0 * fx[k] - 0.5 * fy[k])) < 1e-9);

    for (std::size_t k = 1; k < n / 2; ++k) CHECK(std::abs(fx[k] - std::conj(fx[n - k])) < 1e-10);
  }
}

TEST_CASE("plans reject lengths that are not powers of two") {
  CHECK_THROWS(FftPlan(12));
  CHECK_THROWS(FftPlan(0));
  CHECK(fft_plan(64).size() == 64);
  CHECK(&fft_plan(64) == &fft_plan(64));
}

TEST_CASE("fft results agree across kernel tables") {
  std::mt19937_64 rng(4);
  const auto x = random_complex(rng, 2048);
  const simd::Isa before = simd::kernels().isa;
  std::vector<ComplexVector> results;
  for (auto isa : simd::available_isas()) {
    simd::set_active_isa(isa);
    results.push_back(dft(std::span<const Complex>(x)));
  }
  simd::set_active_isa(before);
  for (const auto& r : results) CHECK(max_abs_diff(r, results.front()) < 1e-10);
}
