#include "rtm/kernels.hpp"

#include <atomic>
#include <cmath>

namespace rtm::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t j = 0; j < n4; j += 4) {
        acc[0] += x[j] * y[j];
        acc[1] += x[j + 1] * y[j + 1];
        acc[2] += x[j + 2] * y[j + 2];
        acc[3] += x[j + 3] * y[j + 3];
    }
    double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (std::size_t j = n4; j < n; ++j) s += x[j] * y[j];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

void fma_panel_f32_scalar(const float* a, const float* x, std::size_t nrows, float* acc) {
    for (std::size_t r = 0; r < nrows; ++r) {
        const float ar = a[r];
        const float* xr = x + r * kRepBatch;
        for (std::size_t b = 0; b < kRepBatch; ++b) acc[b] = std::fmaf(ar, xr[b], acc[b]);
    }
}

float dot_f32_scalar(const float* x, const float* y, std::size_t n) {
    float acc[8] = {};
    const std::size_t n8 = n & ~std::size_t{7};
    for (std::size_t j = 0; j < n8; j += 8)
        for (std::size_t l = 0; l < 8; ++l) acc[l] = std::fmaf(x[j + l], y[j + l], acc[l]);
    float s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (std::size_t j = n8; j < n; ++j) s = std::fmaf(x[j], y[j], s);
    return s;
}

const Ops kScalarOps = {"scalar", dot_scalar, axpy_scalar, fma_panel_f32_scalar, dot_f32_scalar};

std::atomic<bool> g_force_scalar{false};

} // namespace

const Ops& scalar_ops() { return kScalarOps; }

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops(); // kernels_avx2.cpp

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#else
bool avx2_available() { return false; }
#endif

#if defined(__aarch64__)
const Ops& neon_ops(); // kernels_neon.cpp
#endif

void force_scalar(bool on) { g_force_scalar.store(on); }

const Ops& active_ops() {
    if (!g_force_scalar.load()) {
#if defined(__x86_64__) || defined(_M_X64)
        if (avx2_available()) return avx2_ops();
#elif defined(__aarch64__)
        return neon_ops();
#endif
    }
    return kScalarOps;
}

} // namespace rtm::kernels
