#include <cstdlib>
#include <string_view>

#include "pose_eval/kernels.hpp"

namespace pose_eval::kernels {

#if defined(POSE_EVAL_HAVE_AVX2)
const KernelSet& avx2_kernel_set() noexcept;
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(POSE_EVAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelSet& choose() noexcept {
  const char* env = std::getenv("POSE_EVAL_KERNELS");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return scalar_kernels();
  if (const auto* v = avx2_kernels()) return *v;
  return scalar_kernels();
}

}  // namespace

const KernelSet* avx2_kernels() noexcept {
#if defined(POSE_EVAL_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_kernel_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active() noexcept {
  static const KernelSet& set = choose();
  return set;
}

}  // namespace pose_eval::kernels
