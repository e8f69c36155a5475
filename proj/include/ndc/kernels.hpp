#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel primitives behind the image-plane loops. Every kernel has a
// scalar reference implementation and may have SIMD variants; the dispatched
// entry points pick the best implementation for the host CPU at first use.
// SIMD variants are equivalence-tested against the scalar reference.
namespace ndc::kern {

// y[i] += a * x[i]
void axpy(float* y, const float* x, float a, std::size_t n);

// Reductions accumulate in double.
double sum(const float* x, std::size_t n);
double sumsq(const float* x, std::size_t n);
double dot(const float* a, const float* b, std::size_t n);

void minmax(const float* x, std::size_t n, float& lo, float& hi);

// Number of elements strictly below t.
std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t);

// Name of the instruction set the dispatcher selected ("avx2" or "scalar").
const char* active_isa();

// Scalar reference path, always available; the oracle for equivalence tests.
namespace scalar {
void axpy(float* y, const float* x, float a, std::size_t n);
double sum(const float* x, std::size_t n);
double sumsq(const float* x, std::size_t n);
double dot(const float* a, const float* b, std::size_t n);
void minmax(const float* x, std::size_t n, float& lo, float& hi);
std::size_t count_lt(const std::uint16_t* x, std::size_t n, std::uint16_t t);
}  // namespace scalar

}  // namespace ndc::kern
