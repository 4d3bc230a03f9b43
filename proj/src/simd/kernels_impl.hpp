#pragma once

// Per-ISA entry points. Kept free of standard-library templates so the AVX2
// translation unit never emits inline functions the linker could pick for
// scalar callers.

#include <cstddef>

namespace sdvc::simd::detail {

void convolve_add_scalar(const double* x, std::size_t nx, const double* h, std::size_t nh,
                         double* y);
void complex_mul_scalar(const double* a, const double* b, double* out, std::size_t n);
void complex_mul_conj_scalar(const double* a, const double* b, double* out, std::size_t n);
void fft_stage_scalar(double* data, std::size_t n, std::size_t half, const double* twiddles);

#if SDVC_HAVE_AVX2
void convolve_add_avx2(const double* x, std::size_t nx, const double* h, std::size_t nh,
                       double* y);
void complex_mul_avx2(const double* a, const double* b, double* out, std::size_t n);
void complex_mul_conj_avx2(const double* a, const double* b, double* out, std::size_t n);
void fft_stage_avx2(double* data, std::size_t n, std::size_t half, const double* twiddles);
#endif

}  // namespace sdvc::simd::detail
