// AVX2/FMA kernel variants. Compiled with -mavx2 -mfma; only reached when
// active_ops() has confirmed CPU support at runtime.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "rtm/kernels.hpp"

namespace rtm::kernels {

namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        // mul+add (not FMA) to stay bit-identical with the scalar reference
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t j = n4; j < n; ++j) s += x[j] * y[j];
    return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        __m256d vy = _mm256_loadu_pd(y + j);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + j)));
        _mm256_storeu_pd(y + j, vy);
    }
    for (std::size_t j = n4; j < n; ++j) y[j] += a * x[j];
}

void fma_panel_f32_avx2(const float* a, const float* x, std::size_t nrows, float* acc) {
    static_assert(kRepBatch == 32);
    __m256 c0 = _mm256_loadu_ps(acc);
    __m256 c1 = _mm256_loadu_ps(acc + 8);
    __m256 c2 = _mm256_loadu_ps(acc + 16);
    __m256 c3 = _mm256_loadu_ps(acc + 24);
    for (std::size_t r = 0; r < nrows; ++r) {
        const __m256 va = _mm256_set1_ps(a[r]);
        const float* xr = x + r * kRepBatch;
        c0 = _mm256_fmadd_ps(va, _mm256_loadu_ps(xr), c0);
        c1 = _mm256_fmadd_ps(va, _mm256_loadu_ps(xr + 8), c1);
        c2 = _mm256_fmadd_ps(va, _mm256_loadu_ps(xr + 16), c2);
        c3 = _mm256_fmadd_ps(va, _mm256_loadu_ps(xr + 24), c3);
    }
    _mm256_storeu_ps(acc, c0);
    _mm256_storeu_ps(acc + 8, c1);
    _mm256_storeu_ps(acc + 16, c2);
    _mm256_storeu_ps(acc + 24, c3);
}

float dot_f32_avx2(const float* x, const float* y, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    const std::size_t n8 = n & ~std::size_t{7};
    for (std::size_t j = 0; j < n8; j += 8)
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + j), _mm256_loadu_ps(y + j), acc);
    alignas(32) float lane[8];
    _mm256_store_ps(lane, acc);
    float s = ((lane[0] + lane[1]) + (lane[2] + lane[3])) +
              ((lane[4] + lane[5]) + (lane[6] + lane[7]));
    for (std::size_t j = n8; j < n; ++j) s = __builtin_fmaf(x[j], y[j], s);
    return s;
}

const Ops kAvx2Ops = {"avx2", dot_avx2, axpy_avx2, fma_panel_f32_avx2, dot_f32_avx2};

} // namespace

const Ops& avx2_ops() { return kAvx2Ops; }

} // namespace rtm::kernels

#endif
