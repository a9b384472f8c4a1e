#pragma once

#include <cstddef>
#include <vector>

#include "wosr/common.hpp"

namespace wosr {

constexpr bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2 DFT, X[k] = sum_n x[n] e^{-j 2 pi n k / N}. N power of two.
void fft_inplace(std::vector<cplx>& x);

// Inverse with 1/N scaling, so ifft(fft(x)) == x.
void ifft_inplace(std::vector<cplx>& x);

std::vector<cplx> fft(std::vector<cplx> x);
std::vector<cplx> ifft(std::vector<cplx> x);

// DFT of arbitrary length: radix-2 when possible, Bluestein otherwise.
std::vector<cplx> dft_any(const std::vector<cplx>& x);

}  // namespace wosr
