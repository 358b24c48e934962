#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "fcdc/analog_kernel.hpp"
#include "support.hpp"

namespace k = fcdc::kernel;
using fcdc::DomainError;

namespace {

// Direct causal GQA attention with exact arithmetic, written independently
// of the library.
k::Matrix naive_attention(const k::AttentionProblem& p) {
  const std::size_t t = p.x.rows, d = p.d_head, group = p.n_heads / p.n_kv_heads;
  auto mm = [](const k::Matrix& a, const k::Matrix& b) {
    k::Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
      for (std::size_t j = 0; j < b.cols; ++j) {
        double s = 0;
        for (std::size_t l = 0; l < a.cols; ++l) s += a(i, l) * b(l, j);
        c(i, j) = s;
      }
    return c;
  };
  const auto q = mm(p.x, p.wq), kk = mm(p.x, p.wk), v = mm(p.x, p.wv);
  k::Matrix heads(t, p.n_heads * d);
  for (std::size_t h = 0; h < p.n_heads; ++h) {
    const std::size_t g = h / group;
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> w(i + 1);
      double mx = -INFINITY;
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0;
        for (std::size_t c = 0; c < d; ++c) s += q(i, h * d + c) * kk(j, g * d + c);
        w[j] = s / std::sqrt(static_cast<double>(d));
        mx = std::max(mx, w[j]);
      }
      double z = 0;
      for (double& x : w) z += (x = std::exp(x - mx));
      for (std::size_t c = 0; c < d; ++c) {
        double acc = 0;
        for (std::size_t j = 0; j <= i; ++j) acc += w[j] / z * v(j, g * d + c);
        heads(i, h * d + c) = acc;
      }
    }
  }
  return mm(heads, p.wo);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(argmax_i (s_i + sigma z_i) = i) by Simpson integration over the winner's value.
std::vector<double> noisy_argmax_distribution(const std::vector<double>& s, double sigma) {
  const double lo = *std::min_element(s.begin(), s.end()) - 10 * sigma;
  const double hi = *std::max_element(s.begin(), s.end()) + 10 * sigma;
  const int n = 20000;
  const double h = (hi - lo) / n;
  std::vector<double> p(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int m = 0; m <= n; ++m) {
      const double x = lo + m * h;
      double f = normal_pdf((x - s[i]) / sigma) / sigma;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != i) f *= normal_cdf((x - s[j]) / sigma);
      const double wgt = (m == 0 || m == n) ? 1 : (m % 2 ? 4 : 2);
      p[i] += wgt * f;
    }
    p[i] *= h / 3;
  }
  return p;
}

double max_abs(std::span<const double> x) {
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Quantize, SixteenBitTransparency) {
  const auto m = k::random_matrix(8, 64, 5, 9, 3.0);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto q = k::quantize(m.row(r), 16);
    const double fs = max_abs(m.row(r));
    for (std::size_t c = 0; c < m.cols; ++c) EXPECT_LE(std::abs(q[c] - m(r, c)), std::ldexp(fs, -15));
  }
}

TEST(Quantize, EdgeCases) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(k::quantize(zeros, 8), zeros);
  const std::vector<double> ends{-1.0, 1.0};
  const auto q = k::quantize(ends, 4);
  EXPECT_EQ(q, ends);
  const std::vector<double> mid{0.5, 1.0};
  EXPECT_DOUBLE_EQ(k::quantize(mid, 4)[0], 4.0 / 7.0);
  const std::vector<double> big{3.0, -0.2};
  const auto fixed = k::quantize(big, 4, false);
  EXPECT_DOUBLE_EQ(fixed[0], 1.0);
  EXPECT_DOUBLE_EQ(fixed[1], -1.0 / 7.0);
  EXPECT_THROW(k::quantize(ends, 0), DomainError);
}

TEST(QuantNoiseConfig, Validation) {
  EXPECT_THROW((k::QuantNoiseConfig{-0.1, 8, 8, 0, true}.validate()), DomainError);
  EXPECT_THROW((k::QuantNoiseConfig{0.01, 0, 8, 0, true}.validate()), DomainError);
  EXPECT_THROW((k::QuantNoiseConfig{0.01, 8, 17, 0, true}.validate()), DomainError);
  EXPECT_NO_THROW((k::QuantNoiseConfig{0.0, 16, 1, 0, true}.validate()));
}

TEST(FcdcMatmul, ZeroNoiseSixteenBitIsTransparent) {
  const auto a = k::random_matrix(32, 48, 1, 1), b = k::random_matrix(48, 24, 1, 2);
  const auto y = k::fcdc_matmul(a, b, {0.0, 16, 16, 0, true});
  EXPECT_LT(k::relative_error(y, k::matmul(a, b)), 1e-4);
}

TEST(FcdcMatmul, Deterministic) {
  const auto a = k::random_matrix(16, 16, 3, 1), b = k::random_matrix(16, 16, 3, 2);
  const k::QuantNoiseConfig cfg{0.015, 8, 8, 42, true};
  EXPECT_EQ(k::fcdc_matmul(a, b, cfg, 5), k::fcdc_matmul(a, b, cfg, 5));
  EXPECT_NE(k::fcdc_matmul(a, b, cfg, 5), k::fcdc_matmul(a, b, cfg, 6));
  EXPECT_THROW(k::fcdc_matmul(a, k::random_matrix(8, 8, 1, 1), cfg), DomainError);
}

TEST(FcdcMatmul, NoiseIsUnbiased) {
  const auto a = k::random_matrix(3, 4, 8, 1), b = k::random_matrix(4, 3, 8, 2);
  const auto exact = k::matmul(a, b);
  const int n = 10000;
  std::vector<double> s(exact.data.size(), 0.0), s2(exact.data.size(), 0.0);
  for (int seed = 0; seed < n; ++seed) {
    const auto y = k::fcdc_matmul(a, b, {0.015, 16, 16, static_cast<std::uint64_t>(seed), true});
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      s[i] += y.data[i];
      s2[i] += y.data[i] * y.data[i];
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mean = s[i] / n;
    const double se = std::sqrt((s2[i] / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - exact.data[i]), 3 * se) << "element " << i;
  }
}

TEST(FcdcMatmul, ErrorScalesWithNfSquared) {
  const std::array<double, 3> nfs{0.005, 0.015, 0.03};
  const auto pts = k::error_vs_nf(nfs, 64, 20, 7, 8);
  double mx = 0, my = 0;
  for (const auto& p : pts) {
    mx += p.nf * p.nf / 3;
    my += p.mean_squared_error / 3;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& p : pts) {
    const double dx = p.nf * p.nf - mx, dy = p.mean_squared_error - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  EXPECT_GT(sxy * sxy / (sxx * syy), 0.99);
  EXPECT_GT(sxy / sxx, 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i].relative_frobenius, pts[i - 1].relative_frobenius);
}

TEST(Attention, ReferenceModeMatchesNaiveOracle) {
  const auto p = k::AttentionProblem::random(12, 32, 4, 2, 8, 3);
  const auto y = k::fcdc_attention(p, k::AttentionMode::reference_C0, {});
  EXPECT_LT(k::relative_error(y, naive_attention(p)), 1e-12);
}

TEST(Attention, ModesInjectNoiseWhereDeclared) {
  const auto p = k::AttentionProblem::random(12, 32, 4, 2, 8, 4);
  const k::QuantNoiseConfig cfg{0.015, 8, 8, 1, true};
  const auto ref = k::fcdc_attention(p, k::AttentionMode::reference_C0, cfg);
  for (auto m : {k::AttentionMode::projections_only_C1, k::AttentionMode::matmul_only_C5,
                 k::AttentionMode::end_to_end_C4}) {
    EXPECT_GT(k::relative_error(k::fcdc_attention(p, m, cfg), ref), 0.0) << k::to_string(m);
  }
  EXPECT_TRUE(k::noisy_projections(k::AttentionMode::end_to_end_C4));
  EXPECT_FALSE(k::noisy_projections(k::AttentionMode::matmul_only_C5));
  EXPECT_TRUE(k::noisy_attention_matmuls(k::AttentionMode::matmul_only_C5));
  EXPECT_FALSE(k::noisy_attention_matmuls(k::AttentionMode::projections_only_C1));
}

TEST(Attention, EndToEndErrorDominatesMatmulOnly) {
  double c4 = 0, c5 = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p = k::AttentionProblem::random(16, 32, 4, 2, 8, 1000 + seed);
    const k::QuantNoiseConfig cfg{0.015, 8, 8, seed, true};
    const auto ref = k::fcdc_attention(p, k::AttentionMode::reference_C0, cfg);
    const double e5 = k::relative_error(k::fcdc_attention(p, k::AttentionMode::matmul_only_C5, cfg), ref);
    const double e4 = k::relative_error(k::fcdc_attention(p, k::AttentionMode::end_to_end_C4, cfg), ref);
    EXPECT_GE(e5, 0.0);
    c4 += e4;
    c5 += e5;
  }
  EXPECT_GE(c4, c5);
  EXPECT_GT(c5, 0.0);
}

TEST(Attention, HeadPermutationEquivariance) {
  const auto p = k::AttentionProblem::random(10, 32, 4, 4, 8, 9);
  const auto q = k::split_heads(k::matmul(p.x, p.wq), 4, 8);
  const auto kk = k::split_heads(k::matmul(p.x, p.wk), 4, 8);
  const auto v = k::split_heads(k::matmul(p.x, p.wv), 4, 8);
  const std::array<std::size_t, 4> perm{2, 0, 3, 1};
  std::vector<k::HeadStreams> streams, pstreams;
  std::vector<k::Matrix> pq, pk, pv;
  for (std::size_t h = 0; h < 4; ++h) {
    streams.push_back(k::default_head_streams(h));
    pstreams.push_back(k::default_head_streams(perm[h]));
    pq.push_back(q[perm[h]]);
    pk.push_back(kk[perm[h]]);
    pv.push_back(v[perm[h]]);
  }
  const k::QuantNoiseConfig cfg{0.015, 8, 8, 3, true};
  const auto out = k::attention_heads(q, kk, v, true, cfg, streams);
  const auto pout = k::attention_heads(pq, pk, pv, true, cfg, pstreams);
  for (std::size_t h = 0; h < 4; ++h) EXPECT_EQ(pout[h], out[perm[h]]);
}

TEST(Attention, ShapeValidation) {
  auto p = k::AttentionProblem::random(4, 16, 4, 2, 4, 1);
  p.n_kv_heads = 3;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(Softmax, SumsToOneAndStable) {
  const std::vector<double> s{1000.0, 999.0, -1000.0};
  const auto p = k::softmax(s);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-15);
  EXPECT_NEAR(p[0] / p[1], std::exp(1.0), 1e-12);
}

TEST(MottWta, NoiselessSingleWinnerIsArgmax) {
  const std::vector<double> s{0.1, 2.0, -1.0, 1.9};
  const auto w = k::mott_wta_softmax(s, {0.0, 1, 1, 0});
  EXPECT_EQ(w, (std::vector<double>{0, 1, 0, 0}));
}

TEST(MottWta, ValidSparseDistribution) {
  const k::WtaConfig cfg{0.5, 8, 4, 7};
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto s = k::random_matrix(1, 64, 7, 0x300 + r);
    const auto w = k::mott_wta_softmax(s.data, cfg, r);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    EXPECT_LE(std::count_if(w.begin(), w.end(), [](double x) { return x > 0; }), 8);
    for (double x : w) EXPECT_GE(x, 0.0);
  }
}

TEST(MottWta, TotalVariationDecreasesWithSupport) {
  double prev = INFINITY;
  for (int keff : {1, 8, 64}) {
    const double tv = k::wta_mean_tv(64, 1000, {0.5, keff, 4, 7});
    EXPECT_LT(tv, prev) << "K_eff=" << keff;
    prev = tv;
  }
  EXPECT_NEAR(prev, 0.0, 1e-12);
}

TEST(MottWta, WinnerFrequencyMatchesNoisyArgmax) {
  const std::vector<std::vector<double>> cases{{0.3, -0.2}, {0.0, 0.5, 0.1}, {1.0, 0.2, 0.7, -0.4}};
  for (double sigma : {0.5, 1.0}) {
    for (const auto& s : cases) {
      const auto exact = noisy_argmax_distribution(s, sigma);
      EXPECT_NEAR(std::accumulate(exact.begin(), exact.end(), 0.0), 1.0, 1e-9);
      const auto f = k::wta_winner_frequencies(s, {sigma, 1, 100000, 11});
      EXPECT_LT(k::total_variation(f, exact), 0.01);
    }
  }
}

TEST(MottWta, EnergyReduction) {
  EXPECT_EQ(k::wta_energy_reduction(1024, {0.5, 8, 4, 0}), 32.0);
  EXPECT_EQ(k::wta_energy_reduction(8192, {0.5, 8, 4, 0}), 256.0);
  EXPECT_EQ(k::wta_energy_reduction(32, {0.5, 8, 4, 0}), 1.0);
  EXPECT_THROW(k::wta_energy_reduction(0, {}), DomainError);
  EXPECT_THROW(k::wta_energy_reduction(8, {0.5, 0, 4, 0}), DomainError);
}
