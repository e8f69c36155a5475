#pragma once

// Test-side reference utilities. These deliberately avoid the library's own
// numeric paths so they can serve as independent oracles.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ndc/imaging.hpp"

namespace testutil {

inline double normal_cdf_ref(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// inverse normal CDF by bisection on the reference CDF
inline double normal_quantile_ref(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf_ref(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// chi-square(1) survival via the closed identity, independent of the
// incomplete-gamma evaluation under test
inline double chi2_sf_dof1_ref(double x) { return std::erfc(std::sqrt(x / 2.0)); }

// generic chi-square survival by adaptive Simpson integration of the density
inline double chi2_density(double x, double k) {
  if (x <= 0.0) return 0.0;
  return std::exp((k / 2.0 - 1.0) * std::log(x) - x / 2.0 - (k / 2.0) * std::log(2.0) -
                  std::lgamma(k / 2.0));
}

inline double simpson(double a, double b, int steps, double k) {
  const double h = (b - a) / steps;
  double acc = chi2_density(a, k) + chi2_density(b, k);
  for (int i = 1; i < steps; ++i)
    acc += chi2_density(a + i * h, k) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double chi2_sf_ref(double x, double dof) {
  // integrate [x, x + tail] with a generous tail in units of the std dev
  const double tail = std::max(40.0, 12.0 * std::sqrt(2.0 * dof));
  return simpson(x, x + tail, 40000, dof);
}

// Weibull and Gumbel samplers by inverse transform
inline std::vector<double> sample_weibull(double k, double lambda, std::size_t n,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(1e-12, 1.0 - 1e-12);
  std::vector<double> out(n);
  for (auto& x : out) x = lambda * std::pow(-std::log(1.0 - uni(rng)), 1.0 / k);
  return out;
}

inline std::vector<double> sample_gumbel(double mu, double beta, std::size_t n,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(1e-12, 1.0 - 1e-12);
  std::vector<double> out(n);
  for (auto& x : out) x = mu - beta * std::log(-std::log(uni(rng)));
  return out;
}

inline std::vector<double> sample_normal(double mu, double sigma, std::size_t n,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mu, sigma);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

// naive O(n^2) DFT, the oracle for the fast transform
inline std::vector<std::complex<double>> dft_ref(const std::vector<std::complex<double>>& a,
                                                 bool inverse) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = (inverse ? 2.0 : -2.0) * M_PI * double(k) * double(t) / double(n);
      acc += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = inverse ? acc / double(n) : acc;
  }
  return out;
}

// image builders
inline ndc::GrayImage const_image(int w, int h, std::uint16_t v, int depth = 8) {
  return ndc::GrayImage::filled(w, h, depth, v);
}

inline ndc::GrayImage image_from(const std::vector<std::uint16_t>& px, int w, int h,
                                 int depth = 8) {
  ndc::GrayImage img;
  img.width = w;
  img.height = h;
  img.bit_depth = depth;
  img.pixels = px;
  return img;
}

inline ndc::GrayImage random_image(int w, int h, std::uint64_t seed, int depth = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pix(0, (1 << depth) - 1);
  ndc::GrayImage img = ndc::GrayImage::filled(w, h, depth, 0);
  for (auto& p : img.pixels) p = std::uint16_t(pix(rng));
  return img;
}

// background at `level` with `count` distinct pixels forced to zero
inline ndc::GrayImage scatter_image(int w, int h, std::size_t count, std::uint64_t seed,
                                    std::uint16_t level = 128) {
  std::mt19937_64 rng(seed);
  ndc::GrayImage img = ndc::GrayImage::filled(w, h, 8, level);
  std::vector<std::size_t> idx(std::size_t(w) * h);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < count && i < idx.size(); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
    img.pixels[idx[i]] = 0;
  }
  return img;
}

// compact square blob of `count` zeros at a random interior position
inline ndc::GrayImage blob_image(int w, int h, std::size_t count, std::uint64_t seed,
                                 std::uint16_t level = 128) {
  std::mt19937_64 rng(seed);
  ndc::GrayImage img = ndc::GrayImage::filled(w, h, 8, level);
  const int side = std::max(1, int(std::lround(std::sqrt(double(count)))));
  std::uniform_int_distribution<int> px(0, std::max(0, w - side));
  std::uniform_int_distribution<int> py(0, std::max(0, h - side));
  const int x0 = px(rng), y0 = py(rng);
  std::size_t placed = 0;
  for (int y = y0; y < h && placed < count; ++y)
    for (int x = x0; x < std::min(w, x0 + side) && placed < count; ++x) {
      img.at(x, y) = 0;
      ++placed;
    }
  return img;
}

inline double mean_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / double(v.size());
}

}  // namespace testutil
