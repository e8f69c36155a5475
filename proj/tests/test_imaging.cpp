#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "ndc/fft.hpp"
#include "ndc/imaging.hpp"

using namespace ndc;
using testutil::const_image;
using testutil::image_from;
using testutil::random_image;

TEST_CASE("pgm ascii parse") {
  const std::string text = "P2\n2 2\n255\n0 8 128 255\n";
  const GrayImage img = load_pgm({text.begin(), text.end()});
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.bit_depth == 8);
  CHECK(img.pixels == std::vector<std::uint16_t>{0, 8, 128, 255});
}

TEST_CASE("pgm binary equals ascii and round-trips bit-exactly") {
  const GrayImage img = random_image(13, 7, 5);
  const auto p5 = encode_pgm(img, true);
  const auto p2 = encode_pgm(img, false);
  CHECK(load_pgm(p5).pixels == img.pixels);
  CHECK(load_pgm(p2).pixels == img.pixels);
  CHECK(encode_pgm(load_pgm(p5), true) == p5);

  GrayImage deep = random_image(9, 4, 6, 16);
  const auto p5_16 = encode_pgm(deep, true);
  const GrayImage back = load_pgm(p5_16);
  CHECK(back.bit_depth == 16);
  CHECK(back.pixels == deep.pixels);
  CHECK(encode_pgm(back, true) == p5_16);
}

TEST_CASE("pgm error paths") {
  auto expect_code = [](const std::string& text, const std::string& code) {
    try {
      load_pgm({text.begin(), text.end()});
      FAIL_CHECK("expected error ", code);
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect_code("P3\n1 1\n255\n0\n", "MalformedHeader");
  expect_code("P2\n2 2\n300\n0 0 0 0\n", "UnsupportedMaxval");
  expect_code("P2\n2 2\n255\n0 0 0\n", "TruncatedPayload");
  expect_code("P5\n4 4\n255\nxx", "TruncatedPayload");
}

TEST_CASE("minmax normalize") {
  const Grid g = minmax_normalize(image_from({10, 20, 30}, 3, 1));
  CHECK(g.v[0] == doctest::Approx(0.0));
  CHECK(g.v[1] == doctest::Approx(0.5));
  CHECK(g.v[2] == doctest::Approx(1.0));

  const Grid c = minmax_normalize(const_image(4, 4, 5));
  for (float v : c.v) CHECK(v == 0.0f);

  const Grid e = minmax_normalize(image_from({0, 255}, 2, 1));
  CHECK(e.v[0] == 0.0f);
  CHECK(e.v[1] == 1.0f);
}

TEST_CASE("minmax normalize attains both endpoints on non-constant input") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Grid g = minmax_normalize(random_image(17, 9, seed));
    float lo = 1e9f, hi = -1e9f;
    for (float v : g.v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
    CHECK(lo == 0.0f);
    CHECK(hi == 1.0f);
  }
}

TEST_CASE("zscore normalize") {
  const auto z = zscore_normalize({1.0, 2.0, 3.0});
  CHECK(z[0] == doctest::Approx(-1.2247448713915889));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.2247448713915889));

  const auto c = zscore_normalize({4.0, 4.0});
  CHECK(c == std::vector<double>{0.0, 0.0});

  CHECK_THROWS_AS(zscore_normalize({}), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  std::vector<double> vals(37);
  for (auto& v : vals) v = uni(rng);
  const auto zz = zscore_normalize(vals);
  double mean = 0.0, var = 0.0;
  for (double v : zz) mean += v;
  mean /= double(zz.size());
  for (double v : zz) var += v * v;
  var /= double(zz.size());
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lost mask threshold semantics") {
  const GrayImage img = image_from({0, 7, 8, 255}, 4, 1);
  const BinaryMask m = lost_mask(img, 8);
  CHECK(m.bits == std::vector<std::uint8_t>{1, 1, 0, 0});
  CHECK(lost_mask(img, 0).count() == 0);
  CHECK(lost_mask(const_image(3, 3, 0)).count() == 9);
  CHECK(default_lost_thresh(8) == 8);
  CHECK(default_lost_thresh(16) == 2048);
}

TEST_CASE("lost mask monotone in the threshold") {
  const GrayImage img = random_image(20, 20, 77);
  const BinaryMask a = lost_mask(img, 30);
  const BinaryMask b = lost_mask(img, 100);
  for (std::size_t i = 0; i < a.bits.size(); ++i)
    if (a.bits[i]) CHECK(b.bits[i]);
}

TEST_CASE("histogram basics and conservation") {
  const Histogram h0 = histogram(const_image(2, 2, 0), 256);
  CHECK(h0.bins[0] == 4.0);
  for (std::size_t i = 1; i < 256; ++i) CHECK(h0.bins[i] == 0.0);

  const Histogram he = histogram(image_from({0, 255}, 2, 1), 256);
  CHECK(he.bins[0] == 1.0);
  CHECK(he.bins[255] == 1.0);

  const GrayImage rnd = random_image(31, 17, 123);
  CHECK(histogram(rnd, 256).total() == double(rnd.pixels.size()));
  CHECK(histogram(rnd, 7).total() == double(rnd.pixels.size()));

  double acc = 0.0;
  for (double p : histogram(rnd, 256).normalized()) acc += p;
  CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("convolve2d identity, constant laplacian, sobel ramp") {
  const GrayImage img = random_image(9, 9, 4);
  Grid ident = Grid::zeros(3, 3);
  ident.at(1, 1) = 1.0f;
  const Grid out = convolve2d(to_grid(img), ident);
  CHECK(out.v == to_grid(img).v);

  const Grid lap = convolve2d(to_grid(const_image(8, 8, 42)), laplacian_kernel());
  for (float v : lap.v) CHECK(v == doctest::Approx(0.0));

  Grid ramp = Grid::zeros(9, 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) ramp.at(x, y) = float(x);
  const Grid gx = convolve2d(ramp, sobel_x_kernel());
  CHECK(gx.at(4, 4) == doctest::Approx(8.0));

  Grid even = Grid::zeros(2, 2);
  CHECK_THROWS_AS(convolve2d(ramp, even), Error);
}

TEST_CASE("convolve2d is linear") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<float> uni(-1.0f, 1.0f);
  Grid u = Grid::zeros(12, 10), v = Grid::zeros(12, 10);
  for (auto& x : u.v) x = uni(rng);
  for (auto& x : v.v) x = uni(rng);
  Grid k = Grid::zeros(5, 3);
  for (auto& x : k.v) x = uni(rng);

  const double a = 2.25, b = -0.75;
  Grid combo = Grid::zeros(12, 10);
  for (std::size_t i = 0; i < combo.v.size(); ++i)
    combo.v[i] = float(a) * u.v[i] + float(b) * v.v[i];
  const Grid lhs = convolve2d(combo, k);
  const Grid cu = convolve2d(u, k);
  const Grid cv = convolve2d(v, k);
  for (std::size_t i = 0; i < lhs.v.size(); ++i)
    CHECK(double(lhs.v[i]) ==
          doctest::Approx(a * double(cu.v[i]) + b * double(cv.v[i])).epsilon(1e-4));
}

namespace {

// reference single-tile CLAHE, straight from the written definition
std::vector<int> clahe_reference_map(const GrayImage& img, double clip_limit) {
  std::vector<double> hist(256, 0.0);
  for (auto p : img.pixels) hist[p] += 1.0;
  const double npix = double(img.pixels.size());
  const double clip = std::max(1.0, clip_limit * npix / 256.0);
  double excess = 0.0;
  for (double& b : hist)
    if (b > clip) {
      excess += b - clip;
      b = clip;
    }
  for (double& b : hist) b += excess / 256.0;
  double cdf = 0.0, cdf_min = -1.0, total = 0.0;
  std::vector<double> cum(256);
  for (int i = 0; i < 256; ++i) {
    cdf += hist[i];
    cum[i] = cdf;
    if (cdf_min < 0 && hist[i] > 0) cdf_min = cdf;
  }
  total = cdf;
  std::vector<int> map(256);
  for (int i = 0; i < 256; ++i)
    map[i] = int(std::floor(std::clamp((cum[i] - cdf_min) / (total - cdf_min), 0.0, 1.0) * 255.0 +
                            0.5));
  return map;
}

}  // namespace

TEST_CASE("clahe constant image unchanged, range bounded") {
  const GrayImage c = const_image(16, 16, 77);
  CHECK(clahe(c).pixels == c.pixels);

  const GrayImage rnd = random_image(40, 28, 9);
  const GrayImage out = clahe(rnd, 2.0, 8);
  for (auto p : out.pixels) CHECK(p <= 255);
}

TEST_CASE("clahe two-level image matches the reference mapping") {
  GrayImage img = const_image(16, 16, 100);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      if ((x + y) % 2) img.at(x, y) = 150;

  // high clip: no clipping happens, the two levels land on the extremes
  {
    const GrayImage out = clahe(img, 64.0, 1);
    const auto map = clahe_reference_map(img, 64.0);
    CHECK(map[100] == 0);
    CHECK(map[150] == 255);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      CHECK(out.pixels[i] == map[img.pixels[i]]);
  }
  // default clip: still must match the reference oracle and stay monotone
  {
    const GrayImage out = clahe(img, 2.0, 1);
    const auto map = clahe_reference_map(img, 2.0);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      CHECK(out.pixels[i] == map[img.pixels[i]]);
    CHECK(map[100] <= map[150]);
    CHECK(map[100] <= 100);
    CHECK(map[150] >= 150);
  }
}

TEST_CASE("downsample area average") {
  CHECK(downsample(const_image(4, 4, 9), 2, 2).pixels == std::vector<std::uint16_t>(4, 9));
  CHECK(downsample(image_from({0, 0, 255, 255}, 2, 2), 1, 1).pixels[0] == 128);
  CHECK_THROWS_AS(downsample(const_image(4, 4, 9), 8, 4), Error);

  const GrayImage rnd = random_image(32, 24, 15);
  const GrayImage ds = downsample(rnd, 8, 6);
  double src_mean = 0.0, dst_mean = 0.0;
  for (auto p : rnd.pixels) src_mean += p;
  for (auto p : ds.pixels) dst_mean += p;
  src_mean /= double(rnd.pixels.size());
  dst_mean /= double(ds.pixels.size());
  CHECK(std::fabs(src_mean - dst_mean) <= 0.5);
}

TEST_CASE("roi clipping") {
  const Roi r{-3, 2, 10, 10};
  const Roi c = r.clipped_to(8, 8);
  CHECK(c.x == 0);
  CHECK(c.y == 2);
  CHECK(c.w == 7);
  CHECK(c.h == 6);
}

TEST_CASE("fft matches the naive dft and round-trips") {
  using cd = std::complex<double>;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (std::size_t n : {1u, 2u, 8u, 16u, 64u}) {
    std::vector<cd> a(n);
    for (auto& x : a) x = cd(uni(rng), uni(rng));
    auto fast = a;
    fft_1d(fast, false);
    const auto slow = testutil::dft_ref(a, false);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(fast[i].real() == doctest::Approx(slow[i].real()).epsilon(1e-9));
      CHECK(fast[i].imag() == doctest::Approx(slow[i].imag()).epsilon(1e-9));
    }
    fft_1d(fast, true);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(fast[i].real() == doctest::Approx(a[i].real()).epsilon(1e-9));
  }
}
