#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "clinsent/kernels.hpp"
#include "clinsent/text.hpp"

using namespace clinsent;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

simd::AdamCoefficients coeffs(std::uint64_t t) {
    const double b1 = 0.9, b2 = 0.999;
    return {0.001, b1, b2, 1e-8, 1.0 - b1, 1.0 - b2, 1.0 - std::pow(b1, double(t)), 1.0 - std::pow(b2, double(t))};
}

// Lane l accumulates i = 4b + l, lanes combine as (l0 + l1) + (l2 + l3), then the tail.
double lane_dot(const std::vector<double>& x, const std::vector<double>& y) {
    double lane[4] = {0, 0, 0, 0};
    const std::size_t body = x.size() / 4 * 4;
    for (std::size_t i = 0; i < body; ++i) lane[i % 4] += x[i] * y[i];
    double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = body; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

} // namespace

TEST_CASE("scalar dot follows the four-lane summation order") {
    Rng rng(11);
    for (std::size_t n : {0, 1, 3, 4, 5, 8, 13, 300, 513}) {
        const auto x = random_vec(rng, n), y = random_vec(rng, n);
        CHECK(same_bits(simd::scalar_kernels().dot(x.data(), y.data(), n), lane_dot(x, y)));
    }
}

TEST_CASE("scalar kernels agree with textbook loops") {
    Rng rng(12);
    const std::size_t n = 37;
    const auto x = random_vec(rng, n), y = random_vec(rng, n);
    auto y2 = y;
    simd::scalar_kernels().axpy(0.5, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == y[i] + 0.5 * x[i]);

    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
    CHECK(simd::scalar_kernels().squared_distance(x.data(), y.data(), n) == doctest::Approx(sq).epsilon(1e-14));
}

TEST_CASE("avx2 kernels are bit-identical to scalar") {
    const simd::KernelTable* avx = simd::avx2_kernels();
    if (avx == nullptr || !simd::cpu_supports_avx2()) {
        MESSAGE("AVX2 not available; equivalence not exercised");
        return;
    }
    const auto& sc = simd::scalar_kernels();
    Rng rng(13);
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = rng.below(70);
        const auto x = random_vec(rng, n, 3.0), y = random_vec(rng, n, 3.0);
        const double a = rng.uniform(-2, 2);

        auto ys = y, ya = y;
        sc.axpy(a, x.data(), ys.data(), n);
        avx->axpy(a, x.data(), ya.data(), n);
        REQUIRE(same_bits(ys, ya));

        REQUIRE(same_bits(sc.dot(x.data(), y.data(), n), avx->dot(x.data(), y.data(), n)));
        REQUIRE(same_bits(sc.squared_distance(x.data(), y.data(), n), avx->squared_distance(x.data(), y.data(), n)));

        auto ps = x, pa = x, ms = random_vec(rng, n, 0.1), ma = ms, vs = random_vec(rng, n, 0.01), va = vs;
        for (auto& v : vs) v = std::fabs(v);
        va = vs;
        const auto c = coeffs(1 + rng.below(50));
        sc.adam_update(ps.data(), ms.data(), vs.data(), y.data(), n, c);
        avx->adam_update(pa.data(), ma.data(), va.data(), y.data(), n, c);
        REQUIRE(same_bits(ps, pa));
        REQUIRE(same_bits(ms, ma));
        REQUIRE(same_bits(vs, va));
    }
}

TEST_CASE("backend selection") {
    const auto before = simd::active_backend();
    simd::select_backend(simd::Backend::scalar);
    CHECK(simd::active().name == simd::scalar_kernels().name);
    if (simd::cpu_supports_avx2() && simd::avx2_kernels()) {
        simd::select_backend(simd::Backend::avx2);
        CHECK(simd::active_backend() == simd::Backend::avx2);
    }
    simd::select_backend(before);
}

TEST_CASE("adam element update matches the closed form") {
    const auto c = coeffs(3);
    double p = 0.2, m = 0.01, v = 0.0004;
    const double g = -0.3;
    const double m_new = 0.9 * m + 0.1 * g;
    const double v_new = 0.999 * v + 0.001 * g * g;
    const double expect = p - 0.001 * (m_new / c.bias_correction1) / (std::sqrt(v_new / c.bias_correction2) + 1e-8);
    simd::scalar_kernels().adam_update(&p, &m, &v, &g, 1, c);
    CHECK(m == doctest::Approx(m_new).epsilon(1e-15));
    CHECK(v == doctest::Approx(v_new).epsilon(1e-15));
    CHECK(p == doctest::Approx(expect).epsilon(1e-15));
}
