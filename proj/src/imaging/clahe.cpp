#include <algorithm>
#include <cmath>
#include <vector>

#include "ndc/imaging.hpp"

namespace ndc {

namespace {

constexpr int kClaheBins = 256;

// Per-tile intensity mapping: clipped-histogram equalization over 256 bins.
// A constant tile gets the identity so flat regions are left alone.
struct TileMap {
  bool identity = false;
  std::vector<float> map;  // bin -> output intensity
};

TileMap build_tile_map(const GrayImage& img, int x0, int y0, int x1, int y1, double clip_limit) {
  TileMap tm;
  const int levels = img.levels();
  const int maxv = img.max_value();

  std::uint16_t lo = img.at(x0, y0), hi = lo;
  std::vector<double> hist(kClaheBins, 0.0);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const std::uint16_t p = img.at(x, y);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      hist[std::size_t(std::uint64_t(p) * kClaheBins / std::uint64_t(levels))] += 1.0;
    }
  if (lo == hi) {
    tm.identity = true;
    return tm;
  }

  const double npix = double(x1 - x0) * double(y1 - y0);
  const double clip = std::max(1.0, clip_limit * npix / kClaheBins);
  double excess = 0.0;
  for (double& b : hist)
    if (b > clip) {
      excess += b - clip;
      b = clip;
    }
  const double redist = excess / kClaheBins;
  for (double& b : hist) b += redist;

  // cdf-based mapping stretched so the lowest occupied bin maps to 0
  double cdf = 0.0, cdf_min = -1.0;
  std::vector<double> cum(kClaheBins, 0.0);
  for (int i = 0; i < kClaheBins; ++i) {
    cdf += hist[i];
    cum[i] = cdf;
    if (cdf_min < 0.0 && hist[i] > 0.0) cdf_min = cdf;
  }
  tm.map.resize(kClaheBins);
  const double denom = cdf - cdf_min;
  for (int i = 0; i < kClaheBins; ++i) {
    const double m = denom > 0.0 ? (cum[i] - cdf_min) / denom : 0.0;
    tm.map[i] = float(std::clamp(m, 0.0, 1.0) * maxv);
  }
  return tm;
}

float apply_map(const TileMap& tm, std::uint16_t p, int levels) {
  if (tm.identity) return float(p);
  return tm.map[std::size_t(std::uint64_t(p) * kClaheBins / std::uint64_t(levels))];
}

}  // namespace

GrayImage clahe(const GrayImage& img, double clip_limit, int tiles) {
  if (clip_limit <= 0.0) throw Error("BadParameter", "clip_limit must be positive");
  if (tiles < 1) throw Error("BadParameter", "tiles must be >= 1");
  const int tx = std::min(tiles, img.width);
  const int ty = std::min(tiles, img.height);
  const int levels = img.levels();

  std::vector<TileMap> maps(std::size_t(tx) * ty);
  std::vector<double> cx(tx), cy(ty);  // tile centers
  std::vector<int> bx(tx + 1), by(ty + 1);
  for (int i = 0; i <= tx; ++i) bx[i] = int(std::int64_t(i) * img.width / tx);
  for (int i = 0; i <= ty; ++i) by[i] = int(std::int64_t(i) * img.height / ty);
  for (int j = 0; j < ty; ++j)
    for (int i = 0; i < tx; ++i)
      maps[std::size_t(j) * tx + i] =
          build_tile_map(img, bx[i], by[j], bx[i + 1], by[j + 1], clip_limit);
  for (int i = 0; i < tx; ++i) cx[i] = 0.5 * (bx[i] + bx[i + 1]) - 0.5;
  for (int j = 0; j < ty; ++j) cy[j] = 0.5 * (by[j] + by[j + 1]) - 0.5;

  GrayImage out = img;
  for (int y = 0; y < img.height; ++y) {
    // surrounding tile rows
    int j0 = 0;
    while (j0 + 1 < ty && cy[j0 + 1] <= y) ++j0;
    int j1 = std::min(j0 + 1, ty - 1);
    if (y < cy[j0]) j1 = j0;
    const double fy = cy[j1] > cy[j0] ? std::clamp((y - cy[j0]) / (cy[j1] - cy[j0]), 0.0, 1.0) : 0.0;
    for (int x = 0; x < img.width; ++x) {
      int i0 = 0;
      while (i0 + 1 < tx && cx[i0 + 1] <= x) ++i0;
      int i1 = std::min(i0 + 1, tx - 1);
      if (x < cx[i0]) i1 = i0;
      const double fx =
          cx[i1] > cx[i0] ? std::clamp((x - cx[i0]) / (cx[i1] - cx[i0]), 0.0, 1.0) : 0.0;

      const std::uint16_t p = img.at(x, y);
      const double v00 = apply_map(maps[std::size_t(j0) * tx + i0], p, levels);
      const double v10 = apply_map(maps[std::size_t(j0) * tx + i1], p, levels);
      const double v01 = apply_map(maps[std::size_t(j1) * tx + i0], p, levels);
      const double v11 = apply_map(maps[std::size_t(j1) * tx + i1], p, levels);
      const double v = (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
      out.at(x, y) = std::uint16_t(
          std::clamp<long>(long(std::floor(v + 0.5)), 0L, long(img.max_value())));
    }
  }
  return out;
}

}  // namespace ndc
