// Extractors driven by the lost-pixel mask: counts, spatial layout,
// connectivity, and the row/column/diagonal clustering signals.
#include <algorithm>
#include <cmath>
#include <random>

#include "ndc/features.hpp"
#include "ndc/rng.hpp"

namespace ndc::features {

namespace {

std::vector<std::pair<int, int>> mask_coords(const BinaryMask& m) {
  std::vector<std::pair<int, int>> pts;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(x, y)) pts.emplace_back(x, y);
  return pts;
}

double image_diagonal(int w, int h) { return std::sqrt(double(w) * w + double(h) * h); }

}  // namespace

PixelLossFeatures f_pixel_loss(const GrayImage& img, const ReferenceModels* ref,
                               const ExtractorConfig& cfg) {
  PixelLossFeatures f;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  const double mn = double(img.pixels.size());
  const double a0 = double(mask.count());
  f.a0_ratio = a0 / mn;
  f.hard_class = a0 >= cfg.loss_count_lambda ? 1.0 : 0.0;

  if (ref != nullptr) {
    const bool populated = ref->loss_mu_defect != 0 || ref->loss_var_defect != 0 ||
                           ref->loss_mu_noise != 0 || ref->loss_var_noise != 0;
    if (populated) {
      const double center_d = ref->loss_mu_defect + ref->loss_var_defect;
      const double center_n = ref->loss_mu_noise + ref->loss_var_noise;
      const double vd = std::max(ref->loss_var_defect, 1e-9);
      const double vn = std::max(ref->loss_var_noise, 1e-9);
      const double ll_d = -(a0 - center_d) * (a0 - center_d) / (2.0 * vd);
      const double ll_n = -(a0 - center_n) * (a0 - center_n) / (2.0 * vn);
      f.loglik_ratio = std::clamp(ll_d - ll_n, -1e30, 1e30);
    }
  }
  return f;
}

UniformityFeatures f_uniformity(const GrayImage& img, const ExtractorConfig& cfg) {
  UniformityFeatures f;  // inconclusive defaults (1,1,1)
  const int g = cfg.patch_grid;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);

  // black-pixel count per patch (integer grid split)
  const int n_patches = g * g;
  std::vector<double> counts(std::size_t(n_patches), 0.0);
  for (int y = 0; y < img.height; ++y) {
    const int py = int(std::int64_t(y) * g / img.height);
    for (int x = 0; x < img.width; ++x) {
      const int px = int(std::int64_t(x) * g / img.width);
      if (mask.at(x, y)) counts[std::size_t(py) * g + px] += 1.0;
    }
  }

  // qualifying patches define the expected count; the statistic runs over all
  double total = 0.0;
  for (double c : counts)
    if (c >= double(cfg.patch_min_black)) total += c;
  if (total <= 0.0) return f;

  const double e = total / double(n_patches);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - e) * (c - e) / e;
  f.chi2_p = stats::chi_square_pvalue(chi2, double(n_patches) - 1.0);

  f.mc_p = stats::monte_carlo_poisson_pvalue(counts, 500, derive_seed(cfg.seed, 101));

  std::vector<double> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const double med = 0.5 * (sorted[(sorted.size() - 1) / 2] + sorted[sorted.size() / 2]);
  stats::ContingencyTable t;
  for (double c : counts) {
    const bool black = c >= double(cfg.patch_min_black);
    const bool defect_like = c > med;
    if (black && defect_like)
      ++t.a;
    else if (black)
      ++t.b;
    else if (defect_like)
      ++t.c;
    else
      ++t.d;
  }
  f.fisher_p = stats::fisher_exact_pvalue(t);
  return f;
}

ProximityFeatures f_proximity(const GrayImage& img, const ExtractorConfig& cfg) {
  ProximityFeatures f;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  const auto pts = mask_coords(mask);
  const std::size_t b = pts.size();
  if (b < 2) {
    f.mean_d_euclid = f.mean_d_manhattan = f.mean_d_chebyshev = 0.0;
    f.uniform_p = 1.0;
    return f;
  }

  std::mt19937_64 rng(derive_seed(cfg.seed, 201));
  const double diag = image_diagonal(img.width, img.height);

  auto mean_distances = [&](const std::vector<std::pair<int, int>>& p, std::mt19937_64& r,
                            double* manhattan, double* chebyshev) {
    const std::size_t n = p.size();
    const std::size_t total_pairs = n * (n - 1) / 2;
    double de = 0.0, dm = 0.0, dc = 0.0;
    std::size_t used = 0;
    if (total_pairs <= std::size_t(cfg.proximity_max_pairs)) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double dx = double(p[i].first - p[j].first);
          const double dy = double(p[i].second - p[j].second);
          de += std::sqrt(dx * dx + dy * dy);
          dm += std::fabs(dx) + std::fabs(dy);
          dc += std::max(std::fabs(dx), std::fabs(dy));
          ++used;
        }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      while (used < std::size_t(cfg.proximity_max_pairs)) {
        const std::size_t i = pick(r), j = pick(r);
        if (i == j) continue;
        const double dx = double(p[i].first - p[j].first);
        const double dy = double(p[i].second - p[j].second);
        de += std::sqrt(dx * dx + dy * dy);
        dm += std::fabs(dx) + std::fabs(dy);
        dc += std::max(std::fabs(dx), std::fabs(dy));
        ++used;
      }
    }
    if (manhattan) *manhattan = dm / double(used);
    if (chebyshev) *chebyshev = dc / double(used);
    return de / double(used);
  };

  double manhattan = 0.0, chebyshev = 0.0;
  const double observed = mean_distances(pts, rng, &manhattan, &chebyshev);
  f.mean_d_euclid = observed / diag;
  f.mean_d_manhattan = manhattan / diag;
  f.mean_d_chebyshev = chebyshev / diag;

  // reference distribution from uniform placements of the same count
  const std::size_t mn = img.pixels.size();
  std::vector<std::uint32_t> idx(mn);
  int hits = 0;
  for (int s = 0; s < cfg.proximity_sims; ++s) {
    for (std::size_t i = 0; i < mn; ++i) idx[i] = std::uint32_t(i);
    std::vector<std::pair<int, int>> sim(b);
    for (std::size_t i = 0; i < b; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, mn - 1);
      std::swap(idx[i], idx[pick(rng)]);
      sim[i] = {int(idx[i] % std::size_t(img.width)), int(idx[i] / std::size_t(img.width))};
    }
    if (mean_distances(sim, rng, nullptr, nullptr) >= observed) ++hits;
  }
  f.uniform_p = double(hits) / double(cfg.proximity_sims);
  return f;
}

namespace {

struct Components {
  long n_components = 0;  // area >= a_min
  long n_isolated = 0;
};

Components analyze_components(const BinaryMask& mask, bool eight, int a_min) {
  Components res;
  const int w = mask.width, h = mask.height;
  const int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int nn = eight ? 8 : 4;

  std::vector<std::int32_t> label(std::size_t(w) * h, -1);
  std::vector<std::size_t> stack;
  long next = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t at = std::size_t(y) * w + x;
      if (!mask.bits[at]) continue;

      bool isolated = true;
      for (int k = 0; k < nn; ++k) {
        const int xx = x + dx8[k], yy = y + dy8[k];
        if (xx >= 0 && yy >= 0 && xx < w && yy < h && mask.at(xx, yy)) {
          isolated = false;
          break;
        }
      }
      if (isolated) ++res.n_isolated;

      if (label[at] >= 0) continue;
      long area = 0;
      stack.assign(1, at);
      label[at] = std::int32_t(next);
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        ++area;
        const int cx = int(cur % std::size_t(w)), cy = int(cur / std::size_t(w));
        for (int k = 0; k < nn; ++k) {
          const int xx = cx + dx8[k], yy = cy + dy8[k];
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const std::size_t nat = std::size_t(yy) * w + xx;
          if (mask.bits[nat] && label[nat] < 0) {
            label[nat] = std::int32_t(next);
            stack.push_back(nat);
          }
        }
      }
      ++next;
      if (area >= a_min) ++res.n_components;
    }
  return res;
}

}  // namespace

ConnectivityFeatures f_connectivity(const GrayImage& img, const ExtractorConfig& cfg) {
  ConnectivityFeatures f;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  if (mask.count() == 0) return f;
  const double mn = double(img.pixels.size());

  const Components c4 = analyze_components(mask, false, cfg.conn_a_min);
  const Components c8 = analyze_components(mask, true, cfg.conn_a_min);
  f.r_isolated_4 =
      c4.n_components > 0 ? double(c4.n_isolated) / double(c4.n_components) / mn : 0.0;
  f.r_isolated_8 =
      c8.n_components > 0 ? double(c8.n_isolated) / double(c8.n_components) / mn : 0.0;
  f.n_components_ratio = double(c8.n_components) / mn;
  return f;
}

CentroidFeatures f_centroid(const GrayImage& img, const ExtractorConfig& cfg) {
  CentroidFeatures f;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  const auto pts = mask_coords(mask);
  if (pts.empty()) return f;  // (0.5, 0.5, 0)

  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double cx = sx / double(pts.size());
  const double cy = sy / double(pts.size());
  f.cx_norm = (cx + 0.5) / double(img.width);
  f.cy_norm = (cy + 0.5) / double(img.height);

  double spread = 0.0;
  for (const auto& [x, y] : pts)
    spread += std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy));
  spread /= double(pts.size());
  f.spread_norm = spread / image_diagonal(img.width, img.height);
  return f;
}

namespace {

// zero-padded total variation so the signal's position does not matter
double padded_tv(const std::vector<double>& sig) {
  if (sig.empty()) return 0.0;
  double tv = std::fabs(sig.front());
  for (std::size_t i = 0; i + 1 < sig.size(); ++i) tv += std::fabs(sig[i + 1] - sig[i]);
  tv += std::fabs(sig.back());
  return tv;
}

double signal_integral(const std::vector<double>& sig) {
  double s = 0.0;
  for (double v : sig) s += v;
  return sig.empty() ? 0.0 : s / double(sig.size());
}

}  // namespace

TvFeatures f_tv(const GrayImage& img, const ExtractorConfig& cfg) {
  TvFeatures f;
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  const double b = double(mask.count());
  if (b <= 0.0) return f;
  const int w = img.width, h = img.height;

  std::vector<double> rows(std::size_t(h), 0.0), cols(std::size_t(w), 0.0);
  std::vector<double> diag_main(std::size_t(w + h - 1), 0.0), diag_anti(std::size_t(w + h - 1), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (mask.at(x, y)) {
        rows[std::size_t(y)] += 1.0;
        cols[std::size_t(x)] += 1.0;
        diag_main[std::size_t(x - y + h - 1)] += 1.0;
        diag_anti[std::size_t(x + y)] += 1.0;
      }

  f.tv_row = padded_tv(rows) / b;
  f.tv_col = padded_tv(cols) / b;
  f.tv_diag = 0.5 * (padded_tv(diag_main) + padded_tv(diag_anti)) / b;
  f.int_row = signal_integral(rows);
  f.int_col = signal_integral(cols);
  f.int_diag = 0.5 * (signal_integral(diag_main) + signal_integral(diag_anti));

  f.tv_combined = std::sqrt(f.tv_row * f.tv_row + f.tv_col * f.tv_col + f.tv_diag * f.tv_diag);
  f.int_combined =
      std::sqrt(f.int_row * f.int_row + f.int_col * f.int_col + f.int_diag * f.int_diag);
  f.d_combined = cfg.tv_alpha * f.tv_combined + cfg.tv_beta * f.int_combined;
  return f;
}

double f_pointloss_spread(const GrayImage& img, const ExtractorConfig& cfg) {
  const BinaryMask mask = lost_mask(img, cfg.lost_thresh);
  const auto pts = mask_coords(mask);
  if (pts.empty()) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= double(pts.size());
  my /= double(pts.size());
  double vx = 0.0, vy = 0.0;
  for (const auto& [x, y] : pts) {
    vx += (x - mx) * (x - mx);
    vy += (y - my) * (y - my);
  }
  vx /= double(pts.size());
  vy /= double(pts.size());
  return std::sqrt(vx + vy) / image_diagonal(img.width, img.height);
}

}  // namespace ndc::features
