// NEON kernel variants for aarch64, mirroring the scalar reference semantics
// the same way the AVX2 file does.
#if defined(__aarch64__)

#include <arm_neon.h>

#include "rtm/kernels.hpp"

namespace rtm::kernels {

namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t a01 = vdupq_n_f64(0.0);
    float64x2_t a23 = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        a01 = vaddq_f64(a01, vmulq_f64(vld1q_f64(x + j), vld1q_f64(y + j)));
        a23 = vaddq_f64(a23, vmulq_f64(vld1q_f64(x + j + 2), vld1q_f64(y + j + 2)));
    }
    double s = (vgetq_lane_f64(a01, 0) + vgetq_lane_f64(a01, 1)) +
               (vgetq_lane_f64(a23, 0) + vgetq_lane_f64(a23, 1));
    for (std::size_t j = n4; j < n; ++j) s += x[j] * y[j];
    return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    const std::size_t n2 = n & ~std::size_t{1};
    for (std::size_t j = 0; j < n2; j += 2) {
        float64x2_t vy = vld1q_f64(y + j);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + j)));
        vst1q_f64(y + j, vy);
    }
    for (std::size_t j = n2; j < n; ++j) y[j] += a * x[j];
}

void fma_panel_f32_neon(const float* a, const float* x, std::size_t nrows, float* acc) {
    static_assert(kRepBatch == 32);
    float32x4_t c[8];
    for (int k = 0; k < 8; ++k) c[k] = vld1q_f32(acc + 4 * k);
    for (std::size_t r = 0; r < nrows; ++r) {
        const float32x4_t va = vdupq_n_f32(a[r]);
        const float* xr = x + r * kRepBatch;
        for (int k = 0; k < 8; ++k) c[k] = vfmaq_f32(c[k], va, vld1q_f32(xr + 4 * k));
    }
    for (int k = 0; k < 8; ++k) vst1q_f32(acc + 4 * k, c[k]);
}

float dot_f32_neon(const float* x, const float* y, std::size_t n) {
    float32x4_t a03 = vdupq_n_f32(0.0f);
    float32x4_t a47 = vdupq_n_f32(0.0f);
    const std::size_t n8 = n & ~std::size_t{7};
    for (std::size_t j = 0; j < n8; j += 8) {
        a03 = vfmaq_f32(a03, vld1q_f32(x + j), vld1q_f32(y + j));
        a47 = vfmaq_f32(a47, vld1q_f32(x + j + 4), vld1q_f32(y + j + 4));
    }
    float s = ((vgetq_lane_f32(a03, 0) + vgetq_lane_f32(a03, 1)) +
               (vgetq_lane_f32(a03, 2) + vgetq_lane_f32(a03, 3))) +
              ((vgetq_lane_f32(a47, 0) + vgetq_lane_f32(a47, 1)) +
               (vgetq_lane_f32(a47, 2) + vgetq_lane_f32(a47, 3)));
    for (std::size_t j = n8; j < n; ++j) s = __builtin_fmaf(x[j], y[j], s);
    return s;
}

const Ops kNeonOps = {"neon", dot_neon, axpy_neon, fma_panel_f32_neon, dot_f32_neon};

} // namespace

const Ops& neon_ops() { return kNeonOps; }

} // namespace rtm::kernels

#endif
