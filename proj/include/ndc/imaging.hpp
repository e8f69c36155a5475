#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ndc/error.hpp"

namespace ndc {

/// Single-channel image with an explicit bit depth (8 or 16), row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> pixels;

  int levels() const { return 1 << bit_depth; }
  int max_value() const { return (1 << bit_depth) - 1; }
  std::size_t size() const { return pixels.size(); }
  std::uint16_t at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }

  static GrayImage filled(int w, int h, int depth, std::uint16_t value);
  void validate() const;  // throws on dimension/range violations
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  bool at(int x, int y) const { return bits[std::size_t(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[std::size_t(y) * width + x] = v ? 1 : 0; }
  std::size_t count() const;

  static BinaryMask zeros(int w, int h);
};

/// Binned intensity counts. Bin values are reals so bin-wise medians of
/// histogram collections stay representable.
struct Histogram {
  std::vector<double> bins;
  double lo = 0.0;
  double hi = 256.0;  // domain [lo, hi)

  double total() const;
  std::vector<double> normalized() const;  // sums to 1; all-zero input -> zeros
  double bin_center(std::size_t i) const {
    return lo + (hi - lo) * (double(i) + 0.5) / double(bins.size());
  }
};

struct Roi {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  Roi clipped_to(int img_w, int img_h) const;
};

/// Real-valued image plane used for filtering and normalized intensities.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<float> v;

  float at(int x, int y) const { return v[std::size_t(y) * width + x]; }
  float& at(int x, int y) { return v[std::size_t(y) * width + x]; }

  static Grid zeros(int w, int h);
};

// ---------- PGM I/O (P2 ASCII and P5 binary, maxval 255 or 65535) ----------

GrayImage load_pgm(const std::vector<std::uint8_t>& bytes);
GrayImage load_pgm_file(const std::string& path);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img, bool binary = true);
void write_pgm_file(const GrayImage& img, const std::string& path, bool binary = true);

// ---------- basic operations ----------

Grid to_grid(const GrayImage& img);
GrayImage crop(const GrayImage& img, const Roi& roi);

/// (u - min) / (max - min); a constant image maps to all zeros.
Grid minmax_normalize(const GrayImage& img);

/// Population z-score; constant input maps to all zeros. Throws EmptyInput.
std::vector<double> zscore_normalize(const std::vector<double>& values);

int default_lost_thresh(int bit_depth);  // 8 at depth 8, scaled by 2^(depth-8)

/// Mask of pixels strictly below thresh. thresh < 0 selects the default.
BinaryMask lost_mask(const GrayImage& img, int thresh = -1);

/// Equal-width bins over [0, 2^depth); counts sum to the pixel count.
Histogram histogram(const GrayImage& img, int n_bins = 256);

/// Applies the kernel as written (no flip), replicate border. Throws EvenKernel.
Grid convolve2d(const Grid& in, const Grid& kernel);

/// Contrast-limited adaptive histogram equalization with bilinear blending
/// between tile mappings. Constant tiles keep their intensity.
GrayImage clahe(const GrayImage& img, double clip_limit = 2.0, int tiles = 8);

/// Area-average resampling, round half up. Throws UpsampleRequested.
GrayImage downsample(const GrayImage& img, int w, int h);

// ---------- stock kernels ----------

Grid sobel_x_kernel();
Grid sobel_y_kernel();
Grid laplacian_kernel();  // 3x3 [[0,1,0],[1,-4,1],[0,1,0]]
Grid gaussian_kernel(int size, double sigma);

}  // namespace ndc
