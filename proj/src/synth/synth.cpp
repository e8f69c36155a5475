#include "ndc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ndc/rng.hpp"

namespace ndc::synth {

void SynthConfig::validate() const {
  if (width <= 0 || height <= 0) throw Error("BadParameter", "non-positive image size");
  if (noise_density < 0.0 || noise_density > 1.0)
    throw Error("BadParameter", "density must be in [0,1]");
  if (blob_radius_px < 1.0) throw Error("BadParameter", "blob radius must be >= 1");
  if (blob_fill < 0.0 || blob_fill > 1.0) throw Error("BadParameter", "blob_fill must be in [0,1]");
}

namespace {

GrayImage textured_background(const SynthConfig& cfg, std::mt19937_64& rng) {
  GrayImage img = GrayImage::filled(cfg.width, cfg.height, 8, 0);
  std::normal_distribution<double> noise(0.0, cfg.texture_sigma);
  for (auto& p : img.pixels) {
    const double v = double(cfg.background_level) + noise(rng);
    p = std::uint16_t(std::clamp(long(std::lround(v)), 0L, 255L));
  }
  return img;
}

void sprinkle_lost(GrayImage& img, std::size_t count, std::mt19937_64& rng) {
  const std::size_t n = img.pixels.size();
  count = std::min(count, n);
  if (count == 0) return;
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = std::uint32_t(i);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
    img.pixels[idx[i]] = 0;
  }
}

void stamp_blob(GrayImage& img, const SynthConfig& cfg, std::mt19937_64& rng) {
  const int r = int(std::lround(cfg.blob_radius_px));
  const int reach = r + 1;  // walk confined to a (2r+3)^2 box
  std::uniform_int_distribution<int> px(std::min(reach, img.width - 1 - reach) < reach
                                            ? 0
                                            : reach,
                                        std::max(reach, img.width - 1 - reach));
  std::uniform_int_distribution<int> py(std::min(reach, img.height - 1 - reach) < reach
                                            ? 0
                                            : reach,
                                        std::max(reach, img.height - 1 - reach));
  const int cx = std::clamp(px(rng), 0, img.width - 1);
  const int cy = std::clamp(py(rng), 0, img.height - 1);

  const std::size_t target = std::size_t(std::ceil(M_PI * cfg.blob_radius_px * cfg.blob_radius_px));
  std::vector<std::pair<int, int>> cells;
  std::vector<std::uint8_t> seen(std::size_t(2 * reach + 1) * (2 * reach + 1), 0);
  auto visit = [&](int x, int y) {
    const int lx = x - cx + reach, ly = y - cy + reach;
    std::uint8_t& s = seen[std::size_t(ly) * (2 * reach + 1) + lx];
    if (!s) {
      s = 1;
      cells.emplace_back(x, y);
    }
  };
  int x = cx, y = cy;
  visit(x, y);
  std::uniform_int_distribution<int> dir(0, 3);
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  std::size_t guard = 0;
  while (cells.size() < target && guard++ < 200 * target) {
    const int d = dir(rng);
    x = std::clamp(x + dx[d], cx - reach, cx + reach);
    y = std::clamp(y + dy[d], cy - reach, cy + reach);
    visit(x, y);
  }

  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (const auto& [bx, by] : cells) {
    if (bx < 0 || by < 0 || bx >= img.width || by >= img.height) continue;
    if (uni(rng) <= cfg.blob_fill) img.at(bx, by) = 0;
  }
}

}  // namespace

GrayImage gen_noise_image(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  GrayImage img = textured_background(cfg, rng);
  const std::size_t lost = std::size_t(cfg.noise_density * double(img.pixels.size()));
  sprinkle_lost(img, lost, rng);
  return img;
}

GrayImage gen_defect_image(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  GrayImage img = textured_background(cfg, rng);
  for (int b = 0; b < cfg.defect_blob_count; ++b) stamp_blob(img, cfg, rng);
  const std::size_t residual = std::size_t(cfg.noise_density / 4.0 * double(img.pixels.size()));
  sprinkle_lost(img, residual, rng);
  return img;
}

std::vector<LabeledImage> gen_dataset(int n_per_class, const SynthConfig& cfg,
                                      std::uint64_t seed) {
  if (n_per_class < 1) throw Error("BadParameter", "n_per_class must be >= 1");
  std::vector<LabeledImage> out;
  out.reserve(std::size_t(n_per_class) * 2);
  for (int i = 0; i < n_per_class; ++i) {
    SynthConfig c = cfg;
    c.seed = derive_seed(seed, std::uint64_t(2 * i));
    out.push_back({gen_noise_image(c), 0});
  }
  for (int i = 0; i < n_per_class; ++i) {
    SynthConfig c = cfg;
    c.seed = derive_seed(seed, std::uint64_t(2 * i + 1));
    out.push_back({gen_defect_image(c), 1});
  }
  return out;
}

}  // namespace ndc::synth
