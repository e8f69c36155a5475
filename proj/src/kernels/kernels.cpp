#include "ndc/kernels.hpp"

#include <algorithm>

namespace ndc::kern {

namespace scalar {

void axpy(float* y, const float* x, float a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum(const float* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq(const float* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += double(x[i]) * double(x[i]);
  return acc;
}

double dot(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += double(a[i]) * double(b[i]);
  return acc;
}

void minmax(const float* x, std::size_t n, float& lo, float& hi) {
  lo = x[0];
  hi = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
  }
}

std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] < t ? 1 : 0;
  return c;
}

}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
namespace avx2 {
void axpy(float* y, const float* x, float a, std::size_t n);
double sum(const float* x, std::size_t n);
double sumsq(const float* x, std::size_t n);
double dot(const float* a, const float* b, std::size_t n);
void minmax(const float* x, std::size_t n, float& lo, float& hi);
std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t);
}  // namespace avx2
#endif

namespace {

struct Ops {
  void (*axpy)(float*, const float*, float, std::size_t);
  double (*sum)(const float*, std::size_t);
  double (*sumsq)(const float*, std::size_t);
  double (*dot)(const float*, const float*, std::size_t);
  void (*minmax)(const float*, std::size_t, float&, float&);
  std::size_t (*count_lt)(const std::uint16_t*, std::size_t, std::uint16_t);
  const char* isa;
};

Ops select_ops() {
#if defined(__x86_64__) || defined(__i386__)
  if (__builtin_cpu_supports("avx2")) {
    return {avx2::axpy, avx2::sum,    avx2::sumsq,   avx2::dot,
            avx2::minmax, avx2::count_lt, "avx2"};
  }
#endif
  return {scalar::axpy, scalar::sum,    scalar::sumsq,   scalar::dot,
          scalar::minmax, scalar::count_lt, "scalar"};
}

const Ops& ops() {
  static const Ops o = select_ops();
  return o;
}

}  // namespace

void axpy(float* y, const float* x, float a, std::size_t n) { ops().axpy(y, x, a, n); }
double sum(const float* x, std::size_t n) { return ops().sum(x, n); }
double sumsq(const float* x, std::size_t n) { return ops().sumsq(x, n); }
double dot(const float* a, const float* b, std::size_t n) { return ops().dot(a, b, n); }
void minmax(const float* x, std::size_t n, float& lo, float& hi) { ops().minmax(x, n, lo, hi); }
std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t) {
  return ops().count_lt(x, n, t);
}
const char* active_isa() { return ops().isa; }

}  // namespace ndc::kern
