#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "ndc/stats.hpp"

using namespace ndc;
using namespace ndc::stats;

TEST_CASE("summary stats closed forms") {
  const SummaryStats s = summary_stats({1, 2, 3, 4});
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.median == doctest::Approx(2.5));
  CHECK(s.variance == doctest::Approx(1.25));

  const SummaryStats q = summary_stats({1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(q.q1 == doctest::Approx(2.25));
  CHECK(q.q3 == doctest::Approx(6.75));
  CHECK(q.iqr == doctest::Approx(4.5));

  const SummaryStats c = summary_stats({7, 7, 7});
  CHECK(c.variance == 0.0);
  CHECK(c.cv == 0.0);
  CHECK(c.iqr == 0.0);
  CHECK(c.kurtosis == 0.0);

  CHECK(summary_stats({3, 1, 1, 2, 2}).mode == 1.0);  // tie breaks low
  CHECK_THROWS_AS(summary_stats({}), Error);
}

TEST_CASE("chi-square uniformity against the oracle") {
  const Chi2Result flat = chi_square_uniformity({5, 5, 5, 5});
  CHECK(flat.chi2 == doctest::Approx(0.0));
  CHECK(flat.p == doctest::Approx(1.0));

  const Chi2Result r = chi_square_uniformity({10, 0});
  CHECK(r.chi2 == doctest::Approx(10.0));
  CHECK(r.p == doctest::Approx(testutil::chi2_sf_dof1_ref(10.0)).epsilon(1e-6));
  CHECK(r.p == doctest::Approx(0.00157).epsilon(2e-3));

  // numeric-integration oracle at a larger dof
  CHECK(chi_square_pvalue(21.0, 15.0) ==
        doctest::Approx(testutil::chi2_sf_ref(21.0, 15.0)).epsilon(1e-6));

  // survival decreasing in the statistic
  double prev = 1.1;
  for (double x : {0.5, 1.0, 3.0, 9.0, 20.0}) {
    const double p = chi_square_pvalue(x, 4.0);
    CHECK(p < prev);
    prev = p;
  }
  CHECK_THROWS_AS(chi_square_uniformity({0, 0, 0}), Error);
}

TEST_CASE("monte carlo poisson p-value") {
  CHECK(monte_carlo_poisson_pvalue({4, 4, 4, 4}, 200, 5) == doctest::Approx(1.0));
  CHECK(monte_carlo_poisson_pvalue({3, 7, 2, 9, 4}, 500, 42) ==
        monte_carlo_poisson_pvalue({3, 7, 2, 9, 4}, 500, 42));

  std::vector<double> concentrated(16, 0.0);
  concentrated[3] = 64.0;
  CHECK(monte_carlo_poisson_pvalue(concentrated, 100000, 7) < 0.01);
  CHECK_THROWS_AS(monte_carlo_poisson_pvalue({0, 0}, 500, 1), Error);
}

namespace {

double log_choose_ref(long n, long k) {
  return std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
         std::lgamma(double(n - k) + 1);
}

}  // namespace

TEST_CASE("fisher exact enumviaation oracle") {
  // margins (2,2)/(2,2): three tables, extreme ones have probability 1/6
  CHECK(fisher_exact_pvalue({2, 0, 0, 2}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(fisher_exact_pvalue({1, 1, 1, 1}) == doctest::Approx(1.0));
  CHECK(fisher_exact_pvalue({3, 1, 2, 4}) ==
        doctest::Approx(fisher_exact_pvalue({2, 4, 3, 1})).epsilon(1e-12));
  CHECK(fisher_exact_pvalue({0, 0, 3, 4}) == doctest::Approx(1.0));  // degenerate margin

  // total probability over all tables with fixed margins is 1
  const long r1 = 7, r2 = 5, c1 = 6, n = r1 + r2;
  double total = 0.0;
  for (long a = std::max(0L, c1 - r2); a <= std::min(r1, c1); ++a)
    total += std::exp(log_choose_ref(r1, a) + log_choose_ref(r2, c1 - a) - log_choose_ref(n, c1));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ks normal test") {
  // exact normal quantiles: d stays tiny
  std::vector<double> sample(1000);
  for (std::size_t i = 0; i < sample.size(); ++i)
    sample[i] = testutil::normal_quantile_ref((double(i) + 0.5) / 1000.0);
  const KsResult good = ks_normal_test(sample);
  CHECK(good.d < 0.01);
  CHECK(good.p_std > 0.99);

  // uniform data against a normal reference: decisive rejection
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> flat(1000);
  for (auto& v : flat) v = uni(rng);
  CHECK(ks_normal_test(flat).p_std < 0.01);

  // the erf form rises with d: it is reported, not a p-value
  CHECK(kolmogorov_p(0.0, 100) == 1.0);
  std::vector<double> tiny(sample.begin(), sample.begin() + 7);
  CHECK_THROWS_AS(ks_normal_test(tiny), Error);
}

TEST_CASE("welch t test") {
  const std::vector<double> xs = {1, 2, 3, 4, 5};
  const WelchResult same = welch_t_test(xs, xs);
  CHECK(same.t == doctest::Approx(0.0));
  CHECK(same.p_paper == doctest::Approx(0.5));

  // exact two-point samples: population std 1, means 0 and 3
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(-1.0);
    x.push_back(1.0);
    y.push_back(2.0);
    y.push_back(4.0);
  }
  const WelchResult r = welch_t_test(x, y);
  CHECK(r.t == doctest::Approx(3.0 / std::sqrt(0.02)).epsilon(1e-12));
  CHECK(r.p_paper == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.dof == doctest::Approx(198.0));

  // scale invariance and symmetry
  std::vector<double> xs2 = x, ys2 = y;
  for (auto& v : xs2) v *= 3.7;
  for (auto& v : ys2) v *= 3.7;
  CHECK(welch_t_test(xs2, ys2).t == doctest::Approx(r.t).epsilon(1e-9));
  CHECK(welch_t_test(y, x).t == doctest::Approx(r.t).epsilon(1e-12));

  // Welch-Satterthwaite for unequal sizes
  std::vector<double> small = {0.0, 1.0, 2.0};
  const WelchResult w = welch_t_test(x, small);
  CHECK(w.dof > 0.0);
  CHECK(w.dof < 198.0);
}

TEST_CASE("hampel filter") {
  const std::vector<double> flat(9, 3.0);
  CHECK(hampel_filter(flat) == flat);

  CHECK(hampel_filter({1, 1, 100, 1, 1}) == std::vector<double>{1, 1, 1, 1, 1});

  const std::vector<double> gentle = {1.0, 1.1, 0.9, 1.05, 0.95, 1.02};
  CHECK(hampel_filter(gentle) == gentle);

  const std::vector<double> shorty = {5.0, -2.0, 9.0};
  CHECK(hampel_filter(shorty, 5, 3.0) == shorty);
}

TEST_CASE("histogram bhattacharyya") {
  CHECK(hist_bhattacharyya({2, 3, 1}, {2, 3, 1}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hist_bhattacharyya({1, 0, 2, 0}, {0, 3, 0, 4}) == doctest::Approx(1.0));
  // paper formula evaluated by hand: sqrt(1 - sqrt(1*0.5) / sqrt(0.5*0.5*4))
  CHECK(hist_bhattacharyya({1, 0}, {0.5, 0.5}) ==
        doctest::Approx(std::sqrt(1.0 - std::sqrt(0.5))).epsilon(1e-12));
  CHECK(hist_bhattacharyya({1, 0}, {0.5, 0.5}) ==
        doctest::Approx(hist_bhattacharyya({0.5, 0.5}, {1, 0})).epsilon(1e-12));
  CHECK_THROWS_AS(hist_bhattacharyya({1, 2}, {1, 2, 3}), Error);
}

TEST_CASE("histogram correlation and intersection") {
  CHECK(hist_correlation({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(hist_correlation({1, 0}, {0, 1}) == doctest::Approx(-1.0));
  CHECK(hist_correlation({2, 2, 2}, {1, 5, 9}) == 0.0);  // zero-variance sentinel

  CHECK(hist_intersection({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(hist_intersection({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(hist_intersection({1, 3}, {3, 1}) ==
        doctest::Approx(hist_intersection({3, 1}, {1, 3})).epsilon(1e-12));
}

TEST_CASE("gaussian bhattacharyya") {
  CHECK(gaussian_bhattacharyya_1d(2.0, 1.0, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(gaussian_bhattacharyya_1d(0.0, 1.0, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(gaussian_bhattacharyya_1d(0.0, 1.0, 2.0, 3.0) ==
        doctest::Approx(gaussian_bhattacharyya_1d(2.0, 3.0, 0.0, 1.0)).epsilon(1e-12));

  // multivariate form agrees with the 1-d closed form
  CHECK(gaussian_bhattacharyya({0.0}, {1.0}, {2.0}, {1.0}, 1) == doctest::Approx(0.5));
  const double d2 = gaussian_bhattacharyya({0.0, 0.0}, {1.0, 0.0, 0.0, 1.0}, {1.0, 1.0},
                                           {1.0, 0.0, 0.0, 1.0}, 2);
  CHECK(d2 == doctest::Approx(0.25));  // (1/8) * 2 for unit covariances
}

TEST_CASE("gmm em: K=1 closed form and 2-component recovery") {
  std::vector<double> xs = {1, 2, 3, 4, 5, 6};
  const EmResult one = gmm_fit_em(xs, 1, {});
  CHECK(one.model.means[0] == doctest::Approx(3.5));
  CHECK(one.model.variances[0] == doctest::Approx(35.0 / 12.0).epsilon(1e-6));
  CHECK(one.model.weights[0] == doctest::Approx(1.0));

  auto a = testutil::sample_normal(0.0, 1.0, 2500, 11);
  auto b = testutil::sample_normal(10.0, 1.0, 2500, 12);
  a.insert(a.end(), b.begin(), b.end());
  EmConfig cfg;
  cfg.seed = 5;
  const EmResult r = gmm_fit_em(a, 2, cfg);
  std::vector<double> means = r.model.means;
  std::sort(means.begin(), means.end());
  CHECK(means[0] == doctest::Approx(0.0).epsilon(0.2));
  CHECK(means[1] == doctest::Approx(10.0).epsilon(0.02));

  for (std::size_t i = 1; i < r.loglik_path.size(); ++i)
    CHECK(r.loglik_path[i] >= r.loglik_path[i - 1] - 1e-9);

  double wsum = 0.0;
  for (double w : r.model.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(gmm_fit_em({1.0}, 2, {}), Error);
}

TEST_CASE("weibull fit recovers exponential data") {
  const auto xs = testutil::sample_weibull(1.0, 1.0, 10000, 31);
  const FittedPdf f = weibull_fit(xs);
  CHECK(f.p1 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(f.p2 == doctest::Approx(1.0).epsilon(0.05));
  CHECK(f.shift == 0.0);

  // zeros force the +1 shift
  std::vector<double> with_zero = xs;
  with_zero[0] = 0.0;
  CHECK(weibull_fit(with_zero).shift == 1.0);
  CHECK_THROWS_AS(weibull_fit({1, 2, 3}), Error);  // too few
}

TEST_CASE("gumbel moment fit") {
  const auto xs = testutil::sample_gumbel(3.0, 2.0, 10000, 17);
  const FittedPdf f = gumbel_fit(xs);
  CHECK(f.p1 == doctest::Approx(3.0).epsilon(0.05));
  CHECK(f.p2 == doctest::Approx(2.0).epsilon(0.05));

  std::vector<double> nearly(100, 5.0);
  for (std::size_t i = 0; i < nearly.size(); ++i) nearly[i] += (i % 2 ? 1e-4 : -1e-4);
  CHECK(gumbel_fit(nearly).p2 == doctest::Approx(1e-4 * std::sqrt(6.0) / M_PI).epsilon(1e-6));
}

TEST_CASE("pdf loglik closed forms") {
  FittedPdf normal;
  normal.family = PdfFamily::gmm;
  normal.gmm = {1, {1.0}, {0.0}, {1.0}};
  CHECK(pdf_loglik(normal, 0.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-9));

  FittedPdf wb;
  wb.family = PdfFamily::weibull;
  wb.p1 = 1.0;
  wb.p2 = 1.0;
  CHECK(pdf_loglik(wb, 1.0) == doctest::Approx(-1.0));
  CHECK(pdf_loglik(wb, -5.0) == kNegInfLoglik);

  FittedPdf gb;
  gb.family = PdfFamily::gumbel;
  gb.p1 = 0.0;
  gb.p2 = 1.0;
  CHECK(pdf_loglik(gb, 0.0) == doctest::Approx(-1.0));
}

TEST_CASE("chi-square calibration on uniform multinomials") {
  std::mt19937_64 rng(2024);
  const int cells = 16, trials = 64, sims = 1000;
  int rejections = 0;
  std::uniform_int_distribution<int> cell(0, cells - 1);
  for (int s = 0; s < sims; ++s) {
    std::vector<double> counts(cells, 0.0);
    for (int t = 0; t < trials; ++t) counts[std::size_t(cell(rng))] += 1.0;
    if (chi_square_uniformity(counts).p < 0.05) ++rejections;
  }
  const double rate = double(rejections) / double(sims);
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.09);
}
