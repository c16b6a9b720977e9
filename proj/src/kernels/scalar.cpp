#include <cmath>

#include "clinsent/kernels.hpp"

namespace clinsent::simd {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t blocked = n - n % 4;
    for (std::size_t i = 0; i < blocked; i += 4)
        for (std::size_t l = 0; l < 4; ++l) lane[l] += x[i + l] * y[i + l];
    double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocked; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

double squared_distance_scalar(const double* x, const double* y, std::size_t n) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t blocked = n - n % 4;
    for (std::size_t i = 0; i < blocked; i += 4)
        for (std::size_t l = 0; l < 4; ++l) {
            const double d = x[i + l] - y[i + l];
            lane[l] += d * d;
        }
    double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocked; i < n; ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum;
}

void adam_update_scalar(double* param, double* m, double* v, const double* grad, std::size_t n,
                        const AdamCoefficients& c) {
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = c.beta1 * m[i] + c.one_minus_beta1 * g;
        v[i] = c.beta2 * v[i] + c.one_minus_beta2 * (g * g);
        const double m_hat = m[i] / c.bias_correction1;
        const double v_hat = v[i] / c.bias_correction2;
        param[i] -= (c.learning_rate * m_hat) / (std::sqrt(v_hat) + c.epsilon);
    }
}

constexpr KernelTable kScalar{
    "scalar", axpy_scalar, dot_scalar, squared_distance_scalar, adam_update_scalar,
};

} // namespace

const KernelTable& scalar_kernels() { return kScalar; }

} // namespace clinsent::simd
