#include "ndc/fft.hpp"

#include <cmath>

#include "ndc/error.hpp"

namespace ndc {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_1d(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw Error("BadParameter", "FFT length must be a power of 2");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / double(len);
    const std::complex<double> wn(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

void fft_2d(std::vector<std::complex<double>>& a, int w, int h, bool inverse) {
  std::vector<std::complex<double>> line;
  line.resize(std::size_t(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) line[std::size_t(x)] = a[std::size_t(y) * w + x];
    fft_1d(line, inverse);
    for (int x = 0; x < w; ++x) a[std::size_t(y) * w + x] = line[std::size_t(x)];
  }
  line.resize(std::size_t(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) line[std::size_t(y)] = a[std::size_t(y) * w + x];
    fft_1d(line, inverse);
    for (int y = 0; y < h; ++y) a[std::size_t(y) * w + x] = line[std::size_t(y)];
  }
}

}  // namespace ndc
