#include "sdvc/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "sdvc/config.hpp"
#include "sdvc/error.hpp"
#include "sdvc/simd/kernels.hpp"

namespace sdvc {

FftPlan::FftPlan(std::size_t n) : n_(n), bitrev_(n) {
  require(is_power_of_two(n), ErrorKind::InvalidArgument,
          "transform length must be a power of two, got " + std::to_string(n));
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  if (n > 1) {
    forward_twiddles_.reserve(n - 1);
    inverse_twiddles_.reserve(n - 1);
  }
  for (std::size_t half = 1; half < n; half *= 2) {
    for (std::size_t j = 0; j < half; ++j) {
      const double angle = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(half);
      forward_twiddles_.emplace_back(std::cos(angle), std::sin(angle));
      inverse_twiddles_.emplace_back(std::cos(angle), -std::sin(angle));
    }
  }
}

void FftPlan::run(std::span<Complex> data, const std::vector<Complex>& twiddles) const {
  require(data.size() == n_, ErrorKind::LengthMismatch,
          "transform of length " + std::to_string(n_) + " given " + std::to_string(data.size()) +
              " values");
  for (std::size_t i = 0; i < n_; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  const auto& k = simd::kernels();
  auto* raw = reinterpret_cast<double*>(data.data());
  const auto* tw = reinterpret_cast<const double*>(twiddles.data());
  for (std::size_t half = 1; half < n_; half *= 2) {
    k.fft_stage(raw, n_, half, tw + 2 * (half - 1));
  }
}

void FftPlan::forward(std::span<Complex> data) const { run(data, forward_twiddles_); }

void FftPlan::inverse(std::span<Complex> data) const {
  run(data, inverse_twiddles_);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

const FftPlan& fft_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  std::lock_guard lock(mutex);
  auto it = plans.find(n);
  if (it == plans.end()) it = plans.emplace(n, std::make_unique<FftPlan>(n)).first;
  return *it->second;
}

ComplexVector dft(std::span<const Complex> x) {
  ComplexVector out(x.begin(), x.end());
  fft_plan(out.size()).forward(out);
  return out;
}

ComplexVector dft(std::span<const double> x) {
  ComplexVector out(x.begin(), x.end());
  fft_plan(out.size()).forward(out);
  return out;
}

ComplexVector idft(std::span<const Complex> spectrum) {
  ComplexVector out(spectrum.begin(), spectrum.end());
  fft_plan(out.size()).inverse(out);
  return out;
}

}  // namespace sdvc
