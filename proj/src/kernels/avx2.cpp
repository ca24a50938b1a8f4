// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "pose_eval/kernels.hpp"

namespace pose_eval::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

template <int Dims, PointDistance Kind>
CostSum frame_cost_impl(const double* a, const double* a_valid, const double* b,
                        const double* b_valid, std::size_t stride) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d sum = zero;
  __m256d pairs = zero;
  for (std::size_t k = 0; k < stride; k += kLanes) {
    const __m256d va = _mm256_loadu_pd(a_valid + k);
    const __m256d vb = _mm256_loadu_pd(b_valid + k);
    const __m256d mask =
        _mm256_and_pd(_mm256_cmp_pd(va, zero, _CMP_NEQ_OQ), _mm256_cmp_pd(vb, zero, _CMP_NEQ_OQ));
    __m256d d = zero;
    for (int c = 0; c < Dims; ++c) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + c * stride + k),
                                         _mm256_loadu_pd(b + c * stride + k));
      if constexpr (Kind == PointDistance::L1) {
        d = _mm256_add_pd(d, _mm256_andnot_pd(sign, diff));
      } else {
        d = _mm256_fmadd_pd(diff, diff, d);
      }
    }
    if constexpr (Kind == PointDistance::L2) d = _mm256_sqrt_pd(d);
    // AND with the mask zeroes masked lanes even if their distance overflowed.
    sum = _mm256_add_pd(sum, _mm256_and_pd(d, mask));
    pairs = _mm256_add_pd(pairs, _mm256_and_pd(one, mask));
  }
  return {hsum(sum), hsum(pairs)};
}

template <int Dims>
CostSum dispatch_kind(const double* a, const double* a_valid, const double* b,
                      const double* b_valid, std::size_t stride, PointDistance kind) {
  switch (kind) {
    case PointDistance::L2:
      return frame_cost_impl<Dims, PointDistance::L2>(a, a_valid, b, b_valid, stride);
    case PointDistance::L1:
      return frame_cost_impl<Dims, PointDistance::L1>(a, a_valid, b, b_valid, stride);
    case PointDistance::SquaredL2:
      return frame_cost_impl<Dims, PointDistance::SquaredL2>(a, a_valid, b, b_valid, stride);
  }
  return {};
}

CostSum frame_cost_avx2(const double* a, const double* a_valid, const double* b,
                        const double* b_valid, std::size_t stride, int dims,
                        PointDistance kind) {
  if (dims == 3) return dispatch_kind<3>(a, a_valid, b, b_valid, stride, kind);
  return dispatch_kind<2>(a, a_valid, b, b_valid, stride, kind);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelSet& avx2_kernel_set() noexcept {
  static const KernelSet set{"avx2", &frame_cost_avx2, &dot_avx2};
  return set;
}

}  // namespace pose_eval::kernels
