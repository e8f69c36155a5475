// Filter-bank and texture-matrix extractors: SSIM, Gabor, homomorphic,
// HOG vector field, LBP, and the co-occurrence family.
#include <algorithm>
#include <cmath>
#include <complex>

#include "ndc/features.hpp"
#include "ndc/fft.hpp"
#include "ndc/kernels.hpp"

namespace ndc::features {

// ---------- SSIM ----------

namespace {

Grid grid_mul(const Grid& a, const Grid& b) {
  Grid out = Grid::zeros(a.width, a.height);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

}  // namespace

double ssim_mean(const Grid& a, const Grid& b, double intensity_range) {
  const double c1 = (0.01 * intensity_range) * (0.01 * intensity_range);
  const double c2 = (0.03 * intensity_range) * (0.03 * intensity_range);
  const Grid w = gaussian_kernel(11, 1.5);

  const Grid mu_a = convolve2d(a, w);
  const Grid mu_b = convolve2d(b, w);
  const Grid saa = convolve2d(grid_mul(a, a), w);
  const Grid sbb = convolve2d(grid_mul(b, b), w);
  const Grid sab = convolve2d(grid_mul(a, b), w);

  double acc = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    const double ma = mu_a.v[i], mb = mu_b.v[i];
    const double va = double(saa.v[i]) - ma * ma;
    const double vb = double(sbb.v[i]) - mb * mb;
    const double cov = double(sab.v[i]) - ma * mb;
    // alpha = beta = gamma = 1 with C3 = C2/2 collapses to the two-factor form
    acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
           ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / double(a.v.size());
}

double f_ssim_neighbors(const GrayImage& parent, const Roi& roi) {
  const Roi r = roi.clipped_to(parent.width, parent.height);
  if (r.w <= 0 || r.h <= 0) return 0.0;
  const double range = double(parent.max_value());

  double best = 0.0;
  bool any = false;
  auto compare = [&](const Roi& nb, const Roi& sub) {
    const Grid a = to_grid(crop(parent, sub));
    const Grid b = to_grid(crop(parent, nb));
    best = std::max(best, ssim_mean(a, b, range));
    any = true;
  };

  // left
  {
    const int x0 = std::max(0, r.x - r.w);
    const int wn = r.x - x0;
    if (wn * 2 >= r.w) compare({x0, r.y, wn, r.h}, {r.x, r.y, wn, r.h});
  }
  // right
  {
    const int x1 = std::min(parent.width, r.x + 2 * r.w);
    const int wn = x1 - (r.x + r.w);
    if (wn * 2 >= r.w) compare({r.x + r.w, r.y, wn, r.h}, {r.x + r.w - wn, r.y, wn, r.h});
  }
  // top
  {
    const int y0 = std::max(0, r.y - r.h);
    const int hn = r.y - y0;
    if (hn * 2 >= r.h) compare({r.x, y0, r.w, hn}, {r.x, r.y, r.w, hn});
  }
  // bottom
  {
    const int y1 = std::min(parent.height, r.y + 2 * r.h);
    const int hn = y1 - (r.y + r.h);
    if (hn * 2 >= r.h) compare({r.x, r.y + r.h, r.w, hn}, {r.x, r.y + r.h - hn, r.w, hn});
  }
  return any ? best : 0.0;
}

// ---------- Gabor ----------

Grid gabor_kernel(double theta, double lambda, double sigma, double gamma, double psi) {
  const int half = int(std::ceil(2.0 * sigma));
  const int size = 2 * half + 1;
  Grid k = Grid::zeros(size, size);
  const double ct = std::cos(theta), st = std::sin(theta);
  double mean = 0.0;
  for (int y = -half; y <= half; ++y)
    for (int x = -half; x <= half; ++x) {
      const double xr = x * ct + y * st;
      const double yr = -x * st + y * ct;
      const double env = std::exp(-(xr * xr + gamma * gamma * yr * yr) / (2.0 * sigma * sigma));
      const double v = env * std::cos(2.0 * M_PI * xr / lambda + psi);
      k.at(x + half, y + half) = float(v);
      mean += v;
    }
  mean /= double(size) * size;
  for (float& v : k.v) v = float(v - mean);  // zero response on flat regions
  return k;
}

GaborFeatures f_gabor(const GrayImage& img, const ExtractorConfig& cfg) {
  GaborFeatures f;
  const Grid g = to_grid(img);
  Grid acc = Grid::zeros(img.width, img.height);
  for (int k = 0; k < 4; ++k) {
    const double theta = k * M_PI / 4.0;
    const Grid kernel =
        gabor_kernel(theta, cfg.gabor_lambda, cfg.gabor_sigma, cfg.gabor_gamma, cfg.gabor_psi);
    const Grid resp = convolve2d(g, kernel);
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += resp.v[i];
  }
  const double n = double(acc.v.size());
  const double l2 = double(img.max_value()) * double(img.max_value());
  const double mean = kern::sum(acc.v.data(), acc.v.size()) / n;
  const double msq = kern::sumsq(acc.v.data(), acc.v.size()) / n;
  f.energy = msq / l2;
  f.variance = std::max(0.0, msq - mean * mean) / l2;
  return f;
}

// ---------- homomorphic ----------

double f_homomorphic(const GrayImage& img) {
  const int w = img.width, h = img.height;
  const int pw = int(next_pow2(std::size_t(w)));
  const int ph = int(next_pow2(std::size_t(h)));

  std::vector<std::complex<double>> buf(std::size_t(pw) * ph);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) {
      const int sx = std::min(x, w - 1), sy = std::min(y, h - 1);  // replicate pad
      buf[std::size_t(y) * pw + x] = std::log1p(double(img.at(sx, sy)));
    }
  fft_2d(buf, pw, ph, false);

  const double gamma_l = 0.5, gamma_h = 1.5;
  const double d0 = std::max(1.0, 0.1 * double(std::min(w, h)));
  for (int v = 0; v < ph; ++v)
    for (int u = 0; u < pw; ++u) {
      const double du = double(std::min(u, pw - u));
      const double dv = double(std::min(v, ph - v));
      const double d2 = du * du + dv * dv;
      const double filt = gamma_l + (gamma_h - gamma_l) * (1.0 - std::exp(-d2 / (2.0 * d0 * d0)));
      buf[std::size_t(v) * pw + u] *= filt;
    }
  fft_2d(buf, pw, ph, true);

  std::vector<double> vals(std::size_t(w) * h);
  double lo = 1e300, hi = -1e300;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double e = std::expm1(buf[std::size_t(y) * pw + x].real());
      vals[std::size_t(y) * w + x] = e;
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }

  std::vector<double> hist(256, 0.0);
  if (hi > lo) {
    for (double v : vals) {
      const int bin = std::min(255, int((v - lo) / (hi - lo) * 256.0));
      hist[std::size_t(bin)] += 1.0;
    }
  } else {
    hist[0] = double(vals.size());
  }
  double entropy = 0.0;
  const double n = double(vals.size());
  for (double c : hist)
    if (c > 0.0) {
      const double p = c / n;
      entropy -= p * std::log2(p);
    }
  return entropy;
}

// ---------- HOG vector field ----------

FieldNorms field_div_curl_norms(const Grid& fx, const Grid& fy) {
  FieldNorms n;
  const Grid dxx = convolve2d(fx, sobel_x_kernel());
  const Grid dxy = convolve2d(fx, sobel_y_kernel());
  const Grid dyx = convolve2d(fy, sobel_x_kernel());
  const Grid dyy = convolve2d(fy, sobel_y_kernel());
  const double cells = double(fx.v.size());
  double div1 = 0.0, div2 = 0.0, curl1 = 0.0, curl2 = 0.0;
  for (std::size_t i = 0; i < fx.v.size(); ++i) {
    const double div = double(dxx.v[i]) + double(dyy.v[i]);
    const double curl = double(dyx.v[i]) - double(dxy.v[i]);
    div1 += std::fabs(div);
    div2 += div * div;
    curl1 += std::fabs(curl);
    curl2 += curl * curl;
  }
  n.div_l1 = div1 / cells;
  n.div_l2 = std::sqrt(div2) / cells;
  n.curl_l1 = curl1 / cells;
  n.curl_l2 = std::sqrt(curl2) / cells;
  return n;
}

HogFieldFeatures f_hog_field(const GrayImage& img, const ExtractorConfig& cfg) {
  HogFieldFeatures f;
  const int cell = cfg.hog_cell;
  const int ncx = img.width / cell, ncy = img.height / cell;
  if (ncx < 1 || ncy < 1) return f;

  const Grid g = to_grid(img);
  const Grid gx = convolve2d(g, sobel_x_kernel());
  const Grid gy = convolve2d(g, sobel_y_kernel());

  Grid fx = Grid::zeros(ncx, ncy), fy = Grid::zeros(ncx, ncy);
  std::vector<double> angles;
  std::vector<double> hist(std::size_t(cfg.hog_bins));
  for (int cy = 0; cy < ncy; ++cy)
    for (int cx = 0; cx < ncx; ++cx) {
      std::fill(hist.begin(), hist.end(), 0.0);
      double mag_sum = 0.0;
      for (int y = cy * cell; y < (cy + 1) * cell; ++y)
        for (int x = cx * cell; x < (cx + 1) * cell; ++x) {
          const double dx = gx.at(x, y), dy = gy.at(x, y);
          const double mag = std::sqrt(dx * dx + dy * dy);
          if (mag <= 0.0) continue;
          double theta = std::atan2(dy, dx);  // unsigned orientation in [0, pi)
          if (theta < 0.0) theta += M_PI;
          if (theta >= M_PI) theta -= M_PI;
          const int bin =
              std::min(cfg.hog_bins - 1, int(theta / M_PI * double(cfg.hog_bins)));
          hist[std::size_t(bin)] += mag;
          mag_sum += mag;
        }
      if (mag_sum <= 0.0) continue;  // flat cell contributes a zero vector
      std::size_t dominant = 0;
      for (std::size_t b = 1; b < hist.size(); ++b)
        if (hist[b] > hist[dominant]) dominant = b;
      const double theta = (double(dominant) + 0.5) * M_PI / double(cfg.hog_bins);
      const double mag = mag_sum / double(cell * cell);
      fx.at(cx, cy) = float(mag * std::cos(theta));
      fy.at(cx, cy) = float(mag * std::sin(theta));
      angles.push_back(theta);
    }

  if (!angles.empty()) {
    // circular variance of axial data, angles doubled
    double sc = 0.0, ss = 0.0;
    for (double a : angles) {
      sc += std::cos(2.0 * a);
      ss += std::sin(2.0 * a);
    }
    f.orient_variance = 1.0 - std::sqrt(sc * sc + ss * ss) / double(angles.size());
  }

  // sharpen orientation discontinuities before differentiating
  const Grid lfx = convolve2d(fx, laplacian_kernel());
  const Grid lfy = convolve2d(fy, laplacian_kernel());
  const FieldNorms n = field_div_curl_norms(lfx, lfy);
  f.div_l1 = n.div_l1;
  f.div_l2 = n.div_l2;
  f.curl_l1 = n.curl_l1;
  f.curl_l2 = n.curl_l2;
  return f;
}

// ---------- LBP ----------

double f_lbp(const GrayImage& img, const ExtractorConfig& cfg) {
  if (img.width < 3 || img.height < 3) return 0.0;
  const GrayImage eq = clahe(img, cfg.clahe_clip, cfg.clahe_tiles);

  std::vector<double> hist(256, 0.0);
  const int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  const int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};
  double total = 0.0;
  for (int y = 1; y < eq.height - 1; ++y)
    for (int x = 1; x < eq.width - 1; ++x) {
      const std::uint16_t c = eq.at(x, y);
      unsigned code = 0;
      for (int n = 0; n < 8; ++n)
        if (eq.at(x + dx[n], y + dy[n]) >= c) code |= 1u << n;
      hist[code] += 1.0;
      total += 1.0;
    }
  double entropy = 0.0;
  for (double c : hist)
    if (c > 0.0) {
      const double p = c / total;
      entropy -= p * std::log2(p);
    }
  return entropy;
}

// ---------- co-occurrence family ----------

CoocMetrics cooc_metrics(const std::vector<double>& p, int n) {
  CoocMetrics m;
  std::vector<double> px(std::size_t(n), 0.0), py(std::size_t(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      px[std::size_t(i)] += p[std::size_t(i) * n + j];
      py[std::size_t(j)] += p[std::size_t(i) * n + j];
    }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += i * px[std::size_t(i)];
    my += i * py[std::size_t(i)];
  }
  double vx = 0.0, vy = 0.0;
  for (int i = 0; i < n; ++i) {
    vx += (i - mx) * (i - mx) * px[std::size_t(i)];
    vy += (i - my) * (i - my) * py[std::size_t(i)];
  }

  double corr = 0.0, energy = 0.0, entropy = 0.0, homog = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = p[std::size_t(i) * n + j];
      if (v <= 0.0) continue;
      corr += (i - mx) * (j - my) * v;
      energy += v * v;
      entropy -= v * std::log2(v);
      homog += v / (1.0 + std::fabs(double(i - j)));
      var += (i - mx) * (i - mx) * v;
    }
  m.correlation = vx > 1e-12 && vy > 1e-12 ? corr / std::sqrt(vx * vy) : 0.0;
  m.energy = energy;
  m.entropy = entropy;
  m.homogeneity = homog;
  m.variance = var;
  return m;
}

std::vector<double> cooccurrence_matrix(const std::vector<int>& q, int w, int h, int levels,
                                        const std::vector<std::pair<int, int>>& offsets) {
  std::vector<double> m(std::size_t(levels) * levels, 0.0);
  double total = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (const auto& [dx, dy] : offsets) {
        const int xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
        const int a = q[std::size_t(y) * w + x];
        const int b = q[std::size_t(yy) * w + xx];
        m[std::size_t(a) * levels + b] += 1.0;
        total += 1.0;
      }
  if (total <= 0.0) {
    m[0] = 1.0;  // degenerate image: all mass in one cell
    return m;
  }
  // symmetrize, then normalize to sum 1
  std::vector<double> sym(std::size_t(levels) * levels);
  for (int i = 0; i < levels; ++i)
    for (int j = 0; j < levels; ++j)
      sym[std::size_t(i) * levels + j] =
          0.5 * (m[std::size_t(i) * levels + j] + m[std::size_t(j) * levels + i]) / total;
  return sym;
}

namespace {

std::vector<int> quantize_intensities(const GrayImage& img, int levels) {
  std::vector<int> q(img.pixels.size());
  const std::uint64_t range = std::uint64_t(img.levels());
  for (std::size_t i = 0; i < q.size(); ++i)
    q[i] = int(std::uint64_t(img.pixels[i]) * std::uint64_t(levels) / range);
  return q;
}

std::vector<int> quantize_grid(const Grid& g, int levels) {
  float lo, hi;
  kern::minmax(g.v.data(), g.v.size(), lo, hi);
  std::vector<int> q(g.v.size(), 0);
  if (hi > lo) {
    const double scale = double(levels) / (double(hi) - double(lo));
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] = std::min(levels - 1, int((double(g.v[i]) - double(lo)) * scale));
  }
  return q;
}

}  // namespace

std::array<double, 30> f_cooccurrence(const GrayImage& img, const ExtractorConfig& cfg) {
  std::array<double, 30> out{};
  const int w = img.width, h = img.height;
  const int levels = cfg.cooc_levels;

  using Offs = std::vector<std::pair<int, int>>;
  const Offs four_dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  const Offs ortho = {{1, 0}, {0, 1}};
  const Offs radial = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 0}, {0, 2}};
  const Offs east = {{1, 0}};

  const std::vector<int> q = quantize_intensities(img, levels);
  const Grid g = to_grid(img);

  auto emit = [&out](int slot, const CoocMetrics& m) {
    out[std::size_t(slot) * 5 + 0] = m.correlation;
    out[std::size_t(slot) * 5 + 1] = m.energy;
    out[std::size_t(slot) * 5 + 2] = m.entropy;
    out[std::size_t(slot) * 5 + 3] = m.homogeneity;
    out[std::size_t(slot) * 5 + 4] = m.variance;
  };

  emit(0, cooc_metrics(cooccurrence_matrix(q, w, h, levels, four_dirs), levels));
  emit(1, cooc_metrics(cooccurrence_matrix(q, w, h, levels, ortho), levels));
  emit(2, cooc_metrics(cooccurrence_matrix(q, w, h, levels, radial), levels));

  const std::vector<int> ql = quantize_grid(convolve2d(g, laplacian_kernel()), levels);
  emit(3, cooc_metrics(cooccurrence_matrix(ql, w, h, levels, east), levels));

  // joint magnitude x angle histogram of the gradient field, 16 x 16
  {
    const int n = 16;
    const Grid gx = convolve2d(g, sobel_x_kernel());
    const Grid gy = convolve2d(g, sobel_y_kernel());
    std::vector<double> mag(gx.v.size());
    double maxmag = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
      mag[i] = std::sqrt(double(gx.v[i]) * gx.v[i] + double(gy.v[i]) * gy.v[i]);
      maxmag = std::max(maxmag, mag[i]);
    }
    std::vector<double> joint(std::size_t(n) * n, 0.0);
    for (std::size_t i = 0; i < mag.size(); ++i) {
      const int mbin =
          maxmag > 0.0 ? std::min(n - 1, int(mag[i] / maxmag * double(n))) : 0;
      double ang = std::atan2(double(gy.v[i]), double(gx.v[i]));
      if (ang < 0.0) ang += 2.0 * M_PI;
      const int abin = std::min(n - 1, int(ang / (2.0 * M_PI) * double(n)));
      joint[std::size_t(mbin) * n + abin] += 1.0;
    }
    double total = 0.0;
    for (double v : joint) total += v;
    std::vector<double> sym(std::size_t(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        sym[std::size_t(i) * n + j] =
            0.5 * (joint[std::size_t(i) * n + j] + joint[std::size_t(j) * n + i]) / total;
    emit(4, cooc_metrics(sym, n));

    // co-occurrence of quantized gradient magnitudes
    std::vector<int> qm(mag.size(), 0);
    if (maxmag > 0.0)
      for (std::size_t i = 0; i < mag.size(); ++i)
        qm[i] = std::min(n - 1, int(mag[i] / maxmag * double(n)));
    emit(5, cooc_metrics(cooccurrence_matrix(qm, w, h, n, east), n));
  }
  return out;
}

}  // namespace ndc::features
