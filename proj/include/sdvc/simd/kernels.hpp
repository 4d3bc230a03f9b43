#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version compiled in its own translation unit. The
// active table is chosen once at startup from CPUID; SDVC_ISA=scalar|avx2 in
// the environment overrides the choice.
//
// Complex buffers are interleaved (re, im) doubles, i.e. the layout of
// std::complex<double>[n].

namespace sdvc::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct Kernels {
  Isa isa;

  // y[0, nx + nh - 1) += full linear convolution of x and h.
  void (*convolve_add)(const double* x, std::size_t nx, const double* h, std::size_t nh,
                       double* y);

  // out[k] = a[k] * b[k]
  void (*complex_mul)(const double* a, const double* b, double* out, std::size_t n);

  // out[k] = a[k] * conj(b[k])
  void (*complex_mul_conj)(const double* a, const double* b, double* out, std::size_t n);

  // One in-place radix-2 decimation-in-time stage over n complex values.
  // Butterflies span 2 * half entries; twiddles holds `half` complex factors.
  void (*fft_stage)(double* data, std::size_t n, std::size_t half, const double* twiddles);
};

/// Kernel table in use for this process.
const Kernels& kernels();

/// Table for a specific ISA, or nullptr when it is not compiled in or the
/// CPU does not support it.
const Kernels* kernels_for(Isa isa);

std::vector<Isa> available_isas();

/// Switch the process-wide table. Throws if `isa` is unavailable.
void set_active_isa(Isa isa);

}  // namespace sdvc::simd
