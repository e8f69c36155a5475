#include "ndc/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ndc/kernels.hpp"

namespace ndc {

GrayImage GrayImage::filled(int w, int h, int depth, std::uint16_t value) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.bit_depth = depth;
  img.pixels.assign(std::size_t(w) * h, value);
  return img;
}

void GrayImage::validate() const {
  if (width <= 0 || height <= 0) throw Error("BadDimensions", "non-positive image size");
  if (bit_depth != 8 && bit_depth != 16) throw Error("BadDimensions", "bit depth must be 8 or 16");
  if (pixels.size() != std::size_t(width) * height)
    throw Error("BadDimensions", "pixel buffer does not match width*height");
  const int maxv = max_value();
  for (std::uint16_t p : pixels)
    if (int(p) > maxv) throw Error("PixelOutOfRange", "pixel exceeds declared bit depth");
}

std::size_t BinaryMask::count() const {
  std::size_t c = 0;
  for (std::uint8_t b : bits) c += b;
  return c;
}

BinaryMask BinaryMask::zeros(int w, int h) {
  BinaryMask m;
  m.width = w;
  m.height = h;
  m.bits.assign(std::size_t(w) * h, 0);
  return m;
}

double Histogram::total() const {
  double t = 0.0;
  for (double b : bins) t += b;
  return t;
}

std::vector<double> Histogram::normalized() const {
  std::vector<double> p(bins.size(), 0.0);
  const double t = total();
  if (t <= 0.0) return p;
  for (std::size_t i = 0; i < bins.size(); ++i) p[i] = bins[i] / t;
  return p;
}

Roi Roi::clipped_to(int img_w, int img_h) const {
  Roi r = *this;
  r.x = std::clamp(r.x, 0, img_w);
  r.y = std::clamp(r.y, 0, img_h);
  r.w = std::clamp(x + w, r.x, img_w) - r.x;
  r.h = std::clamp(y + h, r.y, img_h) - r.y;
  return r;
}

Grid Grid::zeros(int w, int h) {
  Grid g;
  g.width = w;
  g.height = h;
  g.v.assign(std::size_t(w) * h, 0.0f);
  return g;
}

Grid to_grid(const GrayImage& img) {
  Grid g = Grid::zeros(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) g.v[i] = float(img.pixels[i]);
  return g;
}

GrayImage crop(const GrayImage& img, const Roi& roi) {
  const Roi r = roi.clipped_to(img.width, img.height);
  if (r.w <= 0 || r.h <= 0) throw Error("EmptyRoi", "roi does not intersect the image");
  GrayImage out;
  out.width = r.w;
  out.height = r.h;
  out.bit_depth = img.bit_depth;
  out.pixels.resize(std::size_t(r.w) * r.h);
  for (int y = 0; y < r.h; ++y)
    std::copy_n(&img.pixels[std::size_t(r.y + y) * img.width + r.x], r.w,
                &out.pixels[std::size_t(y) * r.w]);
  return out;
}

Grid minmax_normalize(const GrayImage& img) {
  Grid g = to_grid(img);
  float lo, hi;
  kern::minmax(g.v.data(), g.v.size(), lo, hi);
  if (hi <= lo) {
    std::fill(g.v.begin(), g.v.end(), 0.0f);
    return g;
  }
  const float scale = 1.0f / (hi - lo);
  for (float& x : g.v) x = (x - lo) * scale;
  return g;
}

std::vector<double> zscore_normalize(const std::vector<double>& values) {
  if (values.empty()) throw Error("EmptyInput", "z-score of an empty sequence");
  const double n = double(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  std::vector<double> out(values.size(), 0.0);
  if (var <= 0.0) return out;
  const double inv = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) * inv;
  return out;
}

int default_lost_thresh(int bit_depth) { return bit_depth <= 8 ? 8 : 8 << (bit_depth - 8); }

BinaryMask lost_mask(const GrayImage& img, int thresh) {
  if (thresh < 0) thresh = default_lost_thresh(img.bit_depth);
  BinaryMask m = BinaryMask::zeros(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    m.bits[i] = img.pixels[i] < thresh ? 1 : 0;
  return m;
}

Histogram histogram(const GrayImage& img, int n_bins) {
  if (n_bins < 2) throw Error("BadBinCount", "histogram needs at least 2 bins");
  Histogram h;
  h.lo = 0.0;
  h.hi = double(img.levels());
  h.bins.assign(std::size_t(n_bins), 0.0);
  const std::uint64_t levels = std::uint64_t(img.levels());
  for (std::uint16_t p : img.pixels) {
    const std::size_t idx = std::size_t(std::uint64_t(p) * std::uint64_t(n_bins) / levels);
    h.bins[idx] += 1.0;
  }
  return h;
}

Grid convolve2d(const Grid& in, const Grid& kernel) {
  if (kernel.width % 2 == 0 || kernel.height % 2 == 0)
    throw Error("EvenKernel", "kernel dimensions must be odd");
  const int kw = kernel.width, kh = kernel.height;
  const int rx = kw / 2, ry = kh / 2;
  const int w = in.width, h = in.height;

  // replicate-padded copy; every tap then reads a contiguous row segment
  const int pw = w + 2 * rx;
  std::vector<float> pad(std::size_t(pw) * (h + 2 * ry));
  for (int y = -ry; y < h + ry; ++y) {
    const int sy = std::clamp(y, 0, h - 1);
    float* row = &pad[std::size_t(y + ry) * pw];
    for (int x = 0; x < rx; ++x) row[x] = in.at(0, sy);
    std::copy_n(&in.v[std::size_t(sy) * w], w, row + rx);
    for (int x = 0; x < rx; ++x) row[rx + w + x] = in.at(w - 1, sy);
  }

  Grid out = Grid::zeros(w, h);
  for (int y = 0; y < h; ++y) {
    float* orow = &out.v[std::size_t(y) * w];
    for (int ky = 0; ky < kh; ++ky) {
      const float* prow = &pad[std::size_t(y + ky) * pw];
      for (int kx = 0; kx < kw; ++kx) {
        const float c = kernel.v[std::size_t(ky) * kw + kx];
        if (c != 0.0f) kern::axpy(orow, prow + kx, c, std::size_t(w));
      }
    }
  }
  return out;
}

GrayImage downsample(const GrayImage& img, int w, int h) {
  if (w > img.width || h > img.height)
    throw Error("UpsampleRequested", "target exceeds source dimensions");
  if (w <= 0 || h <= 0) throw Error("BadDimensions", "non-positive target size");
  GrayImage out;
  out.width = w;
  out.height = h;
  out.bit_depth = img.bit_depth;
  out.pixels.resize(std::size_t(w) * h);
  const double sx = double(img.width) / w;
  const double sy = double(img.height) / h;
  for (int oy = 0; oy < h; ++oy) {
    const double y0 = oy * sy, y1 = (oy + 1) * sy;
    for (int ox = 0; ox < w; ++ox) {
      const double x0 = ox * sx, x1 = (ox + 1) * sx;
      double acc = 0.0, area = 0.0;
      for (int y = int(std::floor(y0)); y < int(std::ceil(y1)); ++y) {
        const double wy = std::min(y1, double(y + 1)) - std::max(y0, double(y));
        if (wy <= 0) continue;
        for (int x = int(std::floor(x0)); x < int(std::ceil(x1)); ++x) {
          const double wx = std::min(x1, double(x + 1)) - std::max(x0, double(x));
          if (wx <= 0) continue;
          acc += wx * wy * img.at(std::min(x, img.width - 1), std::min(y, img.height - 1));
          area += wx * wy;
        }
      }
      const double mean = area > 0 ? acc / area : 0.0;
      out.at(ox, oy) = std::uint16_t(std::min(double(img.max_value()), std::floor(mean + 0.5)));
    }
  }
  return out;
}

Grid sobel_x_kernel() {
  Grid k = Grid::zeros(3, 3);
  const float v[9] = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
  std::copy_n(v, 9, k.v.begin());
  return k;
}

Grid sobel_y_kernel() {
  Grid k = Grid::zeros(3, 3);
  const float v[9] = {-1, -2, -1, 0, 0, 0, 1, 2, 1};
  std::copy_n(v, 9, k.v.begin());
  return k;
}

Grid laplacian_kernel() {
  Grid k = Grid::zeros(3, 3);
  const float v[9] = {0, 1, 0, 1, -4, 1, 0, 1, 0};
  std::copy_n(v, 9, k.v.begin());
  return k;
}

Grid gaussian_kernel(int size, double sigma) {
  Grid k = Grid::zeros(size, size);
  const int r = size / 2;
  double total = 0.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double dx = x - r, dy = y - r;
      const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k.at(x, y) = float(g);
      total += g;
    }
  for (float& v : k.v) v = float(v / total);
  return k;
}

}  // namespace ndc
