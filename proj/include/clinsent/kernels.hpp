#pragma once

// Dense double-precision kernels behind the MLP and the nearest-neighbour search.
//
// Every backend produces bit-identical results to the scalar reference:
//   * elementwise kernels (axpy, adam_update) perform the same IEEE operations
//     per element in the same order;
//   * reductions (dot, squared_distance) use a fixed four-lane order. Lane l
//     accumulates elements i = 4b + l in increasing b, the lanes combine as
//     (l0 + l1) + (l2 + l3), and the n % 4 tail is added left to right.
// Backends are chosen once at startup (CPU feature probe, overridable with the
// CLIN_SENT_SIMD environment variable: scalar | avx2 | auto).

#include <cstddef>
#include <span>
#include <string_view>

namespace clinsent::simd {

struct AdamCoefficients {
    double learning_rate;
    double beta1;
    double beta2;
    double epsilon;
    double one_minus_beta1;
    double one_minus_beta2;
    double bias_correction1; // 1 - beta1^t
    double bias_correction2; // 1 - beta2^t
};

struct KernelTable {
    std::string_view name;
    /// y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*squared_distance)(const double* x, const double* y, std::size_t n);
    /// One bias-corrected Adam update of n parameters.
    void (*adam_update)(double* param, double* m, double* v, const double* grad, std::size_t n,
                        const AdamCoefficients& c);
};

enum class Backend { scalar, avx2 };

const KernelTable& scalar_kernels();

/// nullptr when the build target has no AVX2 variant.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// Kernels currently in use.
const KernelTable& active();

Backend active_backend();

/// Switch backends; throws clinsent::Error if the backend is unavailable on this CPU.
void select_backend(Backend b);

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    return active().squared_distance(x.data(), y.data(), x.size());
}

} // namespace clinsent::simd
