#pragma once

#include <cstddef>

namespace rtm::kernels {

// Width of the float replicate panel used by the batched quadratic-form path.
inline constexpr std::size_t kRepBatch = 32;

// Scalar reference kernels and the SIMD variants share exact semantics:
//  - dot: four independent accumulators over lanes j mod 4, combined as
//    ((l0+l1)+(l2+l3)), then a sequential tail. No contraction.
//  - axpy: elementwise y[i] += a*x[i], no contraction.
//  - fma_panel_f32 / dot_f32: fused multiply-add per element in a fixed
//    order, so scalar (std::fmaf) and AVX2 (vfmadd) agree bit for bit.
struct Ops {
    const char* name;
    double (*dot)(const double* x, const double* y, std::size_t n);
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // acc[b] += sum_{r < nrows} a[r] * x[r*kRepBatch + b], b in [0, kRepBatch)
    void (*fma_panel_f32)(const float* a, const float* x, std::size_t nrows, float* acc);
    float (*dot_f32)(const float* x, const float* y, std::size_t n);
};

const Ops& scalar_ops();
const Ops& active_ops(); // dispatched once at first use

bool avx2_available();
// Test hook: when true, active_ops() returns the scalar set.
void force_scalar(bool on);

} // namespace rtm::kernels
