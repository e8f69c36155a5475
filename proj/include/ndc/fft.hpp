#pragma once

#include <complex>
#include <vector>

namespace ndc {

/// Iterative radix-2 transform; length must be a power of two. The inverse
/// applies the 1/N scaling.
void fft_1d(std::vector<std::complex<double>>& a, bool inverse);

/// Row-column 2-D transform over a row-major w x h buffer (both powers of two).
void fft_2d(std::vector<std::complex<double>>& a, int w, int h, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace ndc
