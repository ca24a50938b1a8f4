#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops behind the distance and embedding metrics.
//
// Every kernel has a scalar reference implementation; vectorized variants are
// compiled per instruction set and picked once at startup from the CPU's
// capabilities. POSE_EVAL_KERNELS=scalar|avx2|auto overrides the choice.
// Vector variants only reorder the additions inside one call, so results agree
// with the scalar reference to a few ulps (see tests/unit/kernels_test.cpp).

namespace pose_eval::kernels {

enum class PointDistance { L2, L1, SquaredL2 };

/// Sum of per-point distances over points visible in both frames, plus how
/// many such points there were.
struct CostSum {
  double sum = 0.0;
  double pairs = 0.0;
};

// Frame layout: `dims` planes of `stride` doubles (x[0..stride), y[...], z[...]),
// and a validity plane of `stride` doubles holding 1.0 for visible points and
// 0.0 for masked points and for padding lanes. `stride` is a multiple of kLanes.
inline constexpr std::size_t kLanes = 4;

using FrameCostFn = CostSum (*)(const double* a, const double* a_valid, const double* b,
                                const double* b_valid, std::size_t stride, int dims,
                                PointDistance kind);

using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelSet {
  std::string_view name;
  FrameCostFn frame_cost;
  DotFn dot;
};

const KernelSet& scalar_kernels() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelSet* avx2_kernels() noexcept;

/// The kernel set used by the library (resolved once, thread-safe).
const KernelSet& active() noexcept;

inline std::size_t padded_stride(std::size_t points) noexcept {
  return (points + kLanes - 1) / kLanes * kLanes;
}

}  // namespace pose_eval::kernels
