#include "wosr/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace wosr {

namespace {

void transform(std::vector<cplx>& x, bool inverse) {
    const size_t n = x.size();
    if (!is_pow2(n)) throw InvalidParams("fft: size must be a power of two");
    if (n == 1) return;

    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    // Twiddles for the largest stage; smaller stages stride through it.
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> w(n / 2);
    for (size_t k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = {std::cos(ang), std::sin(ang)};
    }

    for (size_t len = 2; len <= n; len <<= 1) {
        const size_t stride = n / len;
        for (size_t i = 0; i < n; i += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w[k * stride];
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
            }
        }
    }

    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv_n;
    }
}

}  // namespace

void fft_inplace(std::vector<cplx>& x) { transform(x, false); }
void ifft_inplace(std::vector<cplx>& x) { transform(x, true); }

std::vector<cplx> fft(std::vector<cplx> x) {
    fft_inplace(x);
    return x;
}

std::vector<cplx> ifft(std::vector<cplx> x) {
    ifft_inplace(x);
    return x;
}

std::vector<cplx> dft_any(const std::vector<cplx>& x) {
    const size_t n = x.size();
    if (n == 0) throw InvalidInput("dft: empty input");
    if (is_pow2(n)) return fft(x);

    // Bluestein: X[k] = conj(w[k]) * sum_m (x[m] conj(w[m])) w[k-m],
    // with w[m] = exp(j pi m^2 / n). Convolution done via pow2 FFT.
    // m^2 mod 2n keeps the angle reduction exact.
    std::vector<cplx> w(n);
    const uint64_t two_n = 2 * static_cast<uint64_t>(n);
    for (size_t m = 0; m < n; ++m) {
        uint64_t q = (static_cast<uint64_t>(m) * m) % two_n;
        double ang = std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
        w[m] = {std::cos(ang), std::sin(ang)};
    }

    size_t conv_n = 1;
    while (conv_n < 2 * n - 1) conv_n <<= 1;

    std::vector<cplx> a(conv_n, 0.0), b(conv_n, 0.0);
    for (size_t m = 0; m < n; ++m) {
        a[m] = x[m] * std::conj(w[m]);
        b[m] = w[m];
        if (m > 0) b[conv_n - m] = w[m];  // b must cover negative lags
    }
    fft_inplace(a);
    fft_inplace(b);
    for (size_t i = 0; i < conv_n; ++i) a[i] *= b[i];
    ifft_inplace(a);

    std::vector<cplx> out(n);
    for (size_t k = 0; k < n; ++k) out[k] = std::conj(w[k]) * a[k];
    return out;
}

}  // namespace wosr
