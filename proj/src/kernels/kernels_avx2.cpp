// AVX2 variants of the image-plane kernels. Compiled with -mavx2 in its own
// translation unit; only reached through the runtime dispatcher.
#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>

namespace ndc::kern::avx2 {

// mul+add on purpose (no FMA) so lanes round exactly like the scalar path.
void axpy(float* y, const float* x, float a, std::size_t n) {
  const std::size_t body = n & ~std::size_t(7);
  const __m256 va = _mm256_set1_ps(a);
  for (std::size_t i = 0; i < body; i += 8) {
    __m256 vy = _mm256_loadu_ps(y + i);
    __m256 vx = _mm256_loadu_ps(x + i);
    vy = _mm256_add_ps(vy, _mm256_mul_ps(va, vx));
    _mm256_storeu_ps(y + i, vy);
  }
  for (std::size_t i = body; i < n; ++i) y[i] += a * x[i];
}

namespace {

inline double hsum4(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

}  // namespace

double sum(const float* x, std::size_t n) {
  const std::size_t body = n & ~std::size_t(7);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
    acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
  }
  double acc = hsum4(_mm256_add_pd(acc0, acc1));
  for (std::size_t i = body; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq(const float* x, std::size_t n) {
  const std::size_t body = n & ~std::size_t(7);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(lo, lo));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(hi, hi));
  }
  double acc = hsum4(_mm256_add_pd(acc0, acc1));
  for (std::size_t i = body; i < n; ++i) acc += double(x[i]) * double(x[i]);
  return acc;
}

double dot(const float* a, const float* b, std::size_t n) {
  const std::size_t body = n & ~std::size_t(7);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 8) {
    __m256 va = _mm256_loadu_ps(a + i);
    __m256 vb = _mm256_loadu_ps(b + i);
    __m256d la = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
    __m256d lb = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
    __m256d ha = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
    __m256d hb = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(la, lb));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(ha, hb));
  }
  double acc = hsum4(_mm256_add_pd(acc0, acc1));
  for (std::size_t i = body; i < n; ++i) acc += double(a[i]) * double(b[i]);
  return acc;
}

void minmax(const float* x, std::size_t n, float& lo, float& hi) {
  if (n < 8) {
    lo = hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
    return;
  }
  __m256 vlo = _mm256_loadu_ps(x);
  __m256 vhi = vlo;
  const std::size_t body = n & ~std::size_t(7);
  for (std::size_t i = 8; i < body; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    vlo = _mm256_min_ps(vlo, v);
    vhi = _mm256_max_ps(vhi, v);
  }
  if (body < n) {
    // final (possibly overlapping) vector covers the tail
    __m256 v = _mm256_loadu_ps(x + n - 8);
    vlo = _mm256_min_ps(vlo, v);
    vhi = _mm256_max_ps(vhi, v);
  }
  alignas(32) float tmp[8];
  _mm256_store_ps(tmp, vlo);
  lo = tmp[0];
  for (int i = 1; i < 8; ++i) lo = std::min(lo, tmp[i]);
  _mm256_store_ps(tmp, vhi);
  hi = tmp[0];
  for (int i = 1; i < 8; ++i) hi = std::max(hi, tmp[i]);
}

std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t) {
  const std::size_t body = n & ~std::size_t(15);
  // unsigned < via sign-bit flip and signed compare
  const __m256i bias = _mm256_set1_epi16(short(0x8000));
  const __m256i vt = _mm256_xor_si256(_mm256_set1_epi16(short(t)), bias);
  std::size_t c = 0;
  for (std::size_t i = 0; i < body; i += 16) {
    __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    v = _mm256_xor_si256(v, bias);
    __m256i m = _mm256_cmpgt_epi16(vt, v);
    // each lane contributes two set bytes when true
    c += std::size_t(_mm_popcnt_u32(unsigned(_mm256_movemask_epi8(m)))) / 2;
  }
  for (std::size_t i = body; i < n; ++i) c += x[i] < t ? 1 : 0;
  return c;
}

}  // namespace ndc::kern::avx2

#endif  // x86
