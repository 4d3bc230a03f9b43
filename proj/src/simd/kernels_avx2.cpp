#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "kernels_impl.hpp"

namespace sdvc::simd::detail {

namespace {

// Two complex products per register: [ar0 ai0 ar1 ai1] * [br0 bi0 br1 bi1].
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline __m256d cmul_conj(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmsubadd_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

}  // namespace

void convolve_add_avx2(const double* x, std::size_t nx, const double* h, std::size_t nh,
                       double* y) {
  // Taps padded with zeros on both sides: hp[m] = h[m - 3]. Four input
  // samples at a time, output offset j gets x0*hp[j+3] + x1*hp[j+2] +
  // x2*hp[j+1] + x3*hp[j] for every j in [0, nh + 3) with no edge cases.
  thread_local std::vector<double> hp;
  hp.assign(nh + 9, 0.0);  // slack for the masked tail
  std::copy(h, h + nh, hp.begin() + 3);
  const double* p = hp.data();
  // The last partial vector of outputs uses a lane mask so nothing past
  // y[i + nh + 2] is touched.
  const std::size_t full = (nh + 3) / 4 * 4;
  const std::size_t rest = nh + 3 - full;
  const __m256i mask = _mm256_setr_epi64x(rest > 0 ? -1 : 0, rest > 1 ? -1 : 0, rest > 2 ? -1 : 0, 0);

  std::size_t i = 0;
  for (; i + 4 <= nx; i += 4) {
    const double* xq = x + i;
    double* yi = y + i;
    const __m256d x0 = _mm256_set1_pd(xq[0]);
    const __m256d x1 = _mm256_set1_pd(xq[1]);
    const __m256d x2 = _mm256_set1_pd(xq[2]);
    const __m256d x3 = _mm256_set1_pd(xq[3]);

    // Two short chains instead of one long one; y feeds only the first.
    auto taps_at = [&](std::size_t j, __m256d acc) {
      __m256d alt = _mm256_mul_pd(x2, _mm256_loadu_pd(p + j + 1));
      acc = _mm256_fmadd_pd(x0, _mm256_loadu_pd(p + j + 3), acc);
      alt = _mm256_fmadd_pd(x3, _mm256_loadu_pd(p + j), alt);
      acc = _mm256_fmadd_pd(x1, _mm256_loadu_pd(p + j + 2), acc);
      return _mm256_add_pd(acc, alt);
    };
    for (std::size_t j = 0; j < full; j += 4) {
      _mm256_storeu_pd(yi + j, taps_at(j, _mm256_loadu_pd(yi + j)));
    }
    if (rest > 0) {
      _mm256_maskstore_pd(yi + full, mask, taps_at(full, _mm256_maskload_pd(yi + full, mask)));
    }
  }
  for (; i < nx; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    double* yi = y + i;
    std::size_t k = 0;
    for (; k + 4 <= nh; k += 4) {
      _mm256_storeu_pd(yi + k, _mm256_fmadd_pd(xi, _mm256_loadu_pd(h + k), _mm256_loadu_pd(yi + k)));
    }
    for (; k < nh; ++k) yi[k] += x[i] * h[k];
  }
}

void complex_mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(out + 2 * k, cmul(_mm256_loadu_pd(a + 2 * k), _mm256_loadu_pd(b + 2 * k)));
  }
  if (k < n) complex_mul_scalar(a + 2 * k, b + 2 * k, out + 2 * k, n - k);
}

void complex_mul_conj_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    _mm256_storeu_pd(out + 2 * k,
                     cmul_conj(_mm256_loadu_pd(a + 2 * k), _mm256_loadu_pd(b + 2 * k)));
  }
  if (k < n) complex_mul_conj_scalar(a + 2 * k, b + 2 * k, out + 2 * k, n - k);
}

void fft_stage_avx2(double* data, std::size_t n, std::size_t half, const double* twiddles) {
  if (half < 2) {
    fft_stage_scalar(data, n, half, twiddles);
    return;
  }
  const std::size_t span = 2 * half;
  for (std::size_t s = 0; s < n; s += span) {
    double* lo = data + 2 * s;
    double* hi = lo + 2 * half;
    for (std::size_t j = 0; j < half; j += 2) {
      const __m256d t = cmul(_mm256_loadu_pd(hi + 2 * j), _mm256_loadu_pd(twiddles + 2 * j));
      const __m256d u = _mm256_loadu_pd(lo + 2 * j);
      _mm256_storeu_pd(lo + 2 * j, _mm256_add_pd(u, t));
      _mm256_storeu_pd(hi + 2 * j, _mm256_sub_pd(u, t));
    }
  }
}

}  // namespace sdvc::simd::detail
