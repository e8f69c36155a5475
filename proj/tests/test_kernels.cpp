#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "ndc/kernels.hpp"

using namespace ndc;

namespace {

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uni(-100.0f, 100.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = uni(rng);
  return v;
}

// sizes straddling the vector width, including ragged tails
const std::size_t kSizes[] = {1, 2, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1000, 4097};

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  INFO("active isa: ", kern::active_isa());
  for (std::size_t n : kSizes) {
    const auto a = random_floats(n, 11 * n + 1);
    const auto b = random_floats(n, 13 * n + 7);

    CHECK(kern::sum(a.data(), n) ==
          doctest::Approx(kern::scalar::sum(a.data(), n)).epsilon(1e-12));
    CHECK(kern::sumsq(a.data(), n) ==
          doctest::Approx(kern::scalar::sumsq(a.data(), n)).epsilon(1e-12));
    CHECK(kern::dot(a.data(), b.data(), n) ==
          doctest::Approx(kern::scalar::dot(a.data(), b.data(), n)).epsilon(1e-12));

    float lo1, hi1, lo2, hi2;
    kern::minmax(a.data(), n, lo1, hi1);
    kern::scalar::minmax(a.data(), n, lo2, hi2);
    CHECK(lo1 == lo2);
    CHECK(hi1 == hi2);

    // axpy avoids FMA so lanes round exactly like the scalar loop
    std::vector<float> y1 = b, y2 = b;
    kern::axpy(y1.data(), a.data(), 2.5f, n);
    kern::scalar::axpy(y2.data(), a.data(), 2.5f, n);
    CHECK(y1 == y2);
  }
}

TEST_CASE("count_lt agrees with scalar on u16 data") {
  std::mt19937_64 rng(99);
  for (std::size_t n : kSizes) {
    std::vector<std::uint16_t> v(n);
    std::uniform_int_distribution<int> pix(0, 65535);
    for (auto& x : v) x = std::uint16_t(pix(rng));
    for (std::uint16_t t : {std::uint16_t(0), std::uint16_t(8), std::uint16_t(2048),
                            std::uint16_t(40000), std::uint16_t(65535)}) {
      CHECK(kern::count_lt(v.data(), n, t) == kern::scalar::count_lt(v.data(), n, t));
    }
  }
}

TEST_CASE("scalar reference kernels compute what they claim") {
  const std::vector<float> v = {1.0f, 2.0f, 3.0f, 4.0f};
  CHECK(kern::scalar::sum(v.data(), 4) == doctest::Approx(10.0));
  CHECK(kern::scalar::sumsq(v.data(), 4) == doctest::Approx(30.0));
  CHECK(kern::scalar::dot(v.data(), v.data(), 4) == doctest::Approx(30.0));
  float lo, hi;
  kern::scalar::minmax(v.data(), 4, lo, hi);
  CHECK(lo == 1.0f);
  CHECK(hi == 4.0f);
  const std::vector<std::uint16_t> u = {0, 7, 8, 255};
  CHECK(kern::scalar::count_lt(u.data(), 4, 8) == 2);
}
