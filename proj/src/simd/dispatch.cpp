#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "sdvc/error.hpp"
#include "sdvc/simd/kernels.hpp"

namespace sdvc::simd {

namespace {

constexpr Kernels kScalar{
    Isa::Scalar,
    detail::convolve_add_scalar,
    detail::complex_mul_scalar,
    detail::complex_mul_conj_scalar,
    detail::fft_stage_scalar,
};

#if SDVC_HAVE_AVX2
constexpr Kernels kAvx2{
    Isa::Avx2,
    detail::convolve_add_avx2,
    detail::complex_mul_avx2,
    detail::complex_mul_conj_avx2,
    detail::fft_stage_avx2,
};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Kernels* initial_table() {
  const Kernels* best = &kScalar;
#if SDVC_HAVE_AVX2
  if (cpu_has_avx2()) best = &kAvx2;
#endif
  if (const char* forced = std::getenv("SDVC_ISA")) {
    const std::string name(forced);
    if (name == "scalar") return &kScalar;
    if (name == "avx2") {
      if (const Kernels* k = kernels_for(Isa::Avx2)) return k;
    }
  }
  return best;
}

std::atomic<const Kernels*>& active() {
  static std::atomic<const Kernels*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2:
#if SDVC_HAVE_AVX2
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
  if (kernels_for(Isa::Avx2) != nullptr) out.push_back(Isa::Avx2);
  return out;
}

const Kernels& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  const Kernels* k = kernels_for(isa);
  require(k != nullptr, ErrorKind::Unsupported,
          std::string("ISA not available: ") + std::string(to_string(isa)));
  active().store(k, std::memory_order_release);
}

}  // namespace sdvc::simd
