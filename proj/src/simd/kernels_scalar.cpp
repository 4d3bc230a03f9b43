#include "kernels_impl.hpp"

namespace sdvc::simd::detail {

void convolve_add_scalar(const double* x, std::size_t nx, const double* h, std::size_t nh,
                         double* y) {
  for (std::size_t i = 0; i < nx; ++i) {
    const double xi = x[i];
    double* yi = y + i;
    for (std::size_t k = 0; k < nh; ++k) yi[k] += xi * h[k];
  }
}

void complex_mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[2 * k], ai = a[2 * k + 1];
    const double br = b[2 * k], bi = b[2 * k + 1];
    out[2 * k] = ar * br - ai * bi;
    out[2 * k + 1] = ai * br + ar * bi;
  }
}

void complex_mul_conj_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[2 * k], ai = a[2 * k + 1];
    const double br = b[2 * k], bi = b[2 * k + 1];
    out[2 * k] = ar * br + ai * bi;
    out[2 * k + 1] = ai * br - ar * bi;
  }
}

void fft_stage_scalar(double* data, std::size_t n, std::size_t half, const double* twiddles) {
  const std::size_t span = 2 * half;
  for (std::size_t s = 0; s < n; s += span) {
    double* lo = data + 2 * s;
    double* hi = lo + 2 * half;
    for (std::size_t j = 0; j < half; ++j) {
      const double wr = twiddles[2 * j], wi = twiddles[2 * j + 1];
      const double vr = hi[2 * j], vi = hi[2 * j + 1];
      const double tr = vr * wr - vi * wi;
      const double ti = vi * wr + vr * wi;
      const double ur = lo[2 * j], ui = lo[2 * j + 1];
      lo[2 * j] = ur + tr;
      lo[2 * j + 1] = ui + ti;
      hi[2 * j] = ur - tr;
      hi[2 * j + 1] = ui - ti;
    }
  }
}

}  // namespace sdvc::simd::detail
