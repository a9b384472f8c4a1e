#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wosr/fft.hpp"

using namespace wosr;

namespace {

// Test-only oracle: direct O(N^2) DFT sum.
std::vector<cplx> direct_dft(const std::vector<cplx>& x) {
    const size_t n = x.size();
    std::vector<cplx> out(n);
    for (size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * double(m) * double(k) / double(n);
            acc += x[m] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> random_signal(size_t n, uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> x(n);
    for (auto& v : x) v = rng.cgauss();
    return x;
}

double max_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("fft of a unit impulse is flat") {
    // [TRIVIAL] flat spectrum of an impulse.
    std::vector<cplx> x(8, 0.0);
    x[0] = 1.0;
    auto X = fft(x);
    for (const auto& v : X) CHECK(std::abs(v - cplx(1.0)) < 1e-12);
}

TEST_CASE("fft of a pure tone concentrates at its bin") {
    // [TRIVIAL] DFT orthogonality: exp(j 2 pi k n / N) at k=3, N=16 -> N at bin 3.
    const size_t n = 16, k = 3;
    std::vector<cplx> x(n);
    for (size_t i = 0; i < n; ++i) {
        const double ang = 2.0 * std::numbers::pi * double(k) * double(i) / double(n);
        x[i] = cplx(std::cos(ang), std::sin(ang));
    }
    auto X = fft(x);
    CHECK(std::abs(X[k] - cplx(double(n))) < 1e-9);
    for (size_t i = 0; i < n; ++i)
        if (i != k) CHECK(std::abs(X[i]) < 1e-9);
}

TEST_CASE("fft matches the direct-sum oracle") {
    // [DERIVED] direct DFT oracle at N <= 64.
    for (size_t n : {2u, 8u, 32u, 64u}) {
        auto x = random_signal(n, 100 + n);
        CHECK(max_err(fft(x), direct_dft(x)) < 1e-9);
    }
}

TEST_CASE("Parseval holds against the oracle") {
    // [DERIVED] sum |x|^2 == (1/N) sum |X|^2 within 1e-6 relative.
    for (size_t n : {16u, 64u}) {
        auto x = random_signal(n, 7 * n);
        auto X = fft(x);
        double t = 0.0, f = 0.0;
        for (const auto& v : x) t += std::norm(v);
        for (const auto& v : X) f += std::norm(v);
        CHECK(f / double(n) == doctest::Approx(t).epsilon(1e-6));
    }
}

TEST_CASE("ifft inverts fft") {
    auto x = random_signal(256, 42);
    CHECK(max_err(ifft(fft(x)), x) < 1e-10);
}

TEST_CASE("fft rejects non-power-of-two lengths") {
    std::vector<cplx> x(12, 1.0);
    CHECK_THROWS_AS(fft(x), InvalidParams);
}

TEST_CASE("dft_any matches the oracle at awkward lengths") {
    // [DERIVED] Bluestein path against the direct sum (12 = non-pow2, 37 prime).
    for (size_t n : {3u, 12u, 37u, 60u}) {
        auto x = random_signal(n, 900 + n);
        auto X = dft_any(x);
        auto ref = direct_dft(x);
        CHECK(max_err(X, ref) < 1e-8 * double(n));
    }
    // And agrees with the radix-2 path on powers of two.
    auto x = random_signal(64, 5);
    CHECK(max_err(dft_any(x), fft(x)) < 1e-9);
}
