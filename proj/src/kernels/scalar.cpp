#include <cmath>

#include "pose_eval/kernels.hpp"

namespace pose_eval::kernels {
namespace {

CostSum frame_cost_scalar(const double* a, const double* a_valid, const double* b,
                          const double* b_valid, std::size_t stride, int dims,
                          PointDistance kind) {
  CostSum out;
  for (std::size_t k = 0; k < stride; ++k) {
    if (a_valid[k] == 0.0 || b_valid[k] == 0.0) continue;
    double d = 0.0;
    if (kind == PointDistance::L1) {
      for (int c = 0; c < dims; ++c) d += std::fabs(a[c * stride + k] - b[c * stride + k]);
    } else {
      for (int c = 0; c < dims; ++c) {
        const double diff = a[c * stride + k] - b[c * stride + k];
        d += diff * diff;
      }
      if (kind == PointDistance::L2) d = std::sqrt(d);
    }
    out.sum += d;
    out.pairs += 1.0;
  }
  return out;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

const KernelSet& scalar_kernels() noexcept {
  static const KernelSet set{"scalar", &frame_cost_scalar, &dot_scalar};
  return set;
}

}  // namespace pose_eval::kernels
