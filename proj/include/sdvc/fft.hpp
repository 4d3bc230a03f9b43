#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sdvc {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Precomputed radix-2 transform of one power-of-two length.
///
/// forward:  X[k] = sum_n x[n] exp(-2 pi i k n / N)
/// inverse:  x[n] = (1/N) sum_k X[k] exp(+2 pi i k n / N)
///
/// Butterfly stages run through the active SIMD kernel table.
class FftPlan {
public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

private:
  void run(std::span<Complex> data, const std::vector<Complex>& twiddles) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  // Stage twiddles concatenated: stage with half-span h starts at offset h - 1.
  std::vector<Complex> forward_twiddles_;
  std::vector<Complex> inverse_twiddles_;
};

/// Shared plan for length n; plans live for the process lifetime.
const FftPlan& fft_plan(std::size_t n);

ComplexVector dft(std::span<const Complex> x);
ComplexVector dft(std::span<const double> x);
ComplexVector idft(std::span<const Complex> spectrum);

}  // namespace sdvc
