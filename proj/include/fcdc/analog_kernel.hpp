#pragma once

// Numeric emulation of the noisy, quantized charge-domain compute path.
//
// fcdc_matmul quantizes both operands (DAC), multiplies exactly, adds
// output-referred Gaussian noise sigma = nf * (row full scale) and
// quantizes the result (ADC). Noise draws are keyed by (seed, stream,
// element index) so results do not depend on evaluation order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "fcdc/errors.hpp"
#include "fcdc/rng.hpp"

namespace fcdc::kernel {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
  }

  bool operator==(const Matrix&) const = default;
};

/// Standard-normal matrix from a counter stream.
inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                            std::uint64_t stream, double scale = 1.0) {
  Matrix m(rows, cols);
  const CounterRng rng(seed, stream);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = scale * rng.normal(i);
  return m;
}

inline double frobenius(const Matrix& m) {
  return std::sqrt(std::inner_product(m.data.begin(), m.data.end(), m.data.begin(), 0.0));
}

/// ||a - b||_F / ||b||_F
inline double relative_error(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw DomainError("relative_error: shape mismatch");
  double num = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    num += d * d;
  }
  const double den = frobenius(b);
  return den > 0 ? std::sqrt(num) / den : std::sqrt(num);
}

struct QuantNoiseConfig {
  double nf = 0.015;
  int dac_bits = 8;
  int adc_bits = 8;
  std::uint64_t seed = 0;
  bool rescale = true;  // per-row absolute-max scaling

  void validate() const {
    if (nf < 0) throw DomainError("quant/noise config: nf must be >= 0");
    if (dac_bits < 1 || dac_bits > 16 || adc_bits < 1 || adc_bits > 16) {
      throw DomainError("quant/noise config: bits must lie in [1, 16]");
    }
  }
};

/// Uniform symmetric quantizer. With `rescale` the step is max|x| / (2^(b-1) - 1);
/// otherwise the full scale is fixed at 1 and values are clipped to it.
/// One bit degenerates to sign * scale.
inline std::vector<double> quantize(std::span<const double> x, int bits, bool rescale = true) {
  if (bits < 1) throw DomainError("quantize: bits must be >= 1");
  const double levels = std::max(1.0, std::ldexp(1.0, bits - 1) - 1.0);
  double full_scale = 1.0;
  if (rescale) {
    full_scale = 0.0;
    for (double v : x) full_scale = std::max(full_scale, std::abs(v));
  }
  std::vector<double> out(x.size(), 0.0);
  if (full_scale == 0.0) return out;
  const double step = full_scale / levels;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = std::clamp(std::nearbyint(x[i] / step), -levels, levels);
    out[i] = q * step;
  }
  return out;
}

inline Matrix quantize_rows(const Matrix& m, int bits, bool rescale = true) {
  Matrix out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto q = quantize(m.row(r), bits, rescale);
    std::copy(q.begin(), q.end(), out.row(r).begin());
  }
  return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DomainError("matmul: inner dimensions disagree");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

/// A (input rows, DAC) times B (stored columns) through one noisy tile path.
/// Both operands are quantized along their reduction axis: rows of A and
/// columns of B.
inline Matrix fcdc_matmul(const Matrix& a, const Matrix& b, const QuantNoiseConfig& cfg,
                          std::uint64_t stream = 0) {
  cfg.validate();
  if (a.cols != b.rows) throw DomainError("fcdc_matmul: inner dimensions disagree");
  const Matrix aq = quantize_rows(a, cfg.dac_bits, cfg.rescale);
  const Matrix bq = quantize_rows(b.transposed(), cfg.dac_bits, cfg.rescale).transposed();
  Matrix y = matmul(aq, bq);
  if (cfg.nf > 0) {
    const CounterRng rng(cfg.seed, stream);
    for (std::size_t r = 0; r < y.rows; ++r) {
      auto row = y.row(r);
      double fs = 0.0;
      for (double v : row) fs = std::max(fs, std::abs(v));
      const double sigma = cfg.nf * fs;
      for (std::size_t c = 0; c < y.cols; ++c) row[c] += sigma * rng.normal(r * y.cols + c);
    }
  }
  return quantize_rows(y, cfg.adc_bits, cfg.rescale);
}

enum class AttentionMode {
  reference_C0,         // exact
  projections_only_C1,  // noisy Wq, Wk, Wv, Wo
  matmul_only_C5,       // noisy Q.K^T and A.V
  end_to_end_C4,        // both
};

inline std::string_view to_string(AttentionMode m) {
  switch (m) {
    case AttentionMode::reference_C0: return "C0";
    case AttentionMode::projections_only_C1: return "C1";
    case AttentionMode::matmul_only_C5: return "C5";
    case AttentionMode::end_to_end_C4: return "C4";
  }
  return "?";
}

inline bool noisy_projections(AttentionMode m) {
  return m == AttentionMode::projections_only_C1 || m == AttentionMode::end_to_end_C4;
}

inline bool noisy_attention_matmuls(AttentionMode m) {
  return m == AttentionMode::matmul_only_C5 || m == AttentionMode::end_to_end_C4;
}

/// Counter streams used by one head's two attention multiplies.
struct HeadStreams {
  std::uint64_t qk = 0;
  std::uint64_t av = 0;
};

inline HeadStreams default_head_streams(std::size_t head) {
  return {100 + 2 * head, 101 + 2 * head};
}

inline constexpr std::uint64_t kStreamWq = 1;
inline constexpr std::uint64_t kStreamWk = 2;
inline constexpr std::uint64_t kStreamWv = 3;
inline constexpr std::uint64_t kStreamWo = 4;

inline std::vector<double> softmax(std::span<const double> s) {
  std::vector<double> p(s.size(), 0.0);
  if (s.empty()) return p;
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += (p[i] = std::exp(s[i] - mx));
  for (double& v : p) v /= z;
  return p;
}

/// Causal attention for each query head. Query head h reads KV head
/// h / (n_q / n_kv). Returns one T x d_head output per query head.
inline std::vector<Matrix> attention_heads(const std::vector<Matrix>& q, const std::vector<Matrix>& k,
                                           const std::vector<Matrix>& v, bool noisy,
                                           const QuantNoiseConfig& cfg,
                                           std::span<const HeadStreams> streams) {
  if (q.empty() || k.empty() || k.size() != v.size() || q.size() % k.size() != 0) {
    throw DomainError("attention: query heads must be a positive multiple of KV heads");
  }
  if (streams.size() != q.size()) throw DomainError("attention: one stream pair per query head");
  const std::size_t group = q.size() / k.size();
  std::vector<Matrix> out;
  out.reserve(q.size());
  for (std::size_t h = 0; h < q.size(); ++h) {
    const Matrix& qh = q[h];
    const Matrix& kh = k[h / group];
    const Matrix& vh = v[h / group];
    if (qh.cols != kh.cols || qh.rows != kh.rows || vh.rows != kh.rows) {
      throw DomainError("attention: head shapes disagree");
    }
    const std::size_t t = qh.rows;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(qh.cols));
    const Matrix kt = kh.transposed();
    Matrix s = noisy ? fcdc_matmul(qh, kt, cfg, streams[h].qk) : matmul(qh, kt);
    Matrix a(t, t);
    for (std::size_t i = 0; i < t; ++i) {
      std::vector<double> row(i + 1);
      for (std::size_t j = 0; j <= i; ++j) row[j] = s(i, j) * inv_sqrt_d;
      const auto p = softmax(row);
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = p[j];
    }
    out.push_back(noisy ? fcdc_matmul(a, vh, cfg, streams[h].av) : matmul(a, vh));
  }
  return out;
}

/// One GQA attention layer: x (T x d_model), Wq (d_model x H d), Wk and Wv
/// (d_model x H_kv d), Wo (H d x d_model).
struct AttentionProblem {
  Matrix x, wq, wk, wv, wo;
  std::size_t n_heads = 4;
  std::size_t n_kv_heads = 2;
  std::size_t d_head = 16;

  void validate() const {
    if (n_heads == 0 || n_kv_heads == 0 || d_head == 0 || n_heads % n_kv_heads != 0) {
      throw DomainError("attention problem: query heads must be a multiple of KV heads");
    }
    const std::size_t dm = x.cols;
    if (wq.rows != dm || wk.rows != dm || wv.rows != dm || wo.cols != dm) {
      throw DomainError("attention problem: model width mismatch");
    }
    if (wq.cols != n_heads * d_head || wo.rows != n_heads * d_head ||
        wk.cols != n_kv_heads * d_head || wv.cols != n_kv_heads * d_head) {
      throw DomainError("attention problem: head dimensions mismatch");
    }
  }

  /// Random problem with 1/sqrt(fan-in) scaled weights.
  static AttentionProblem random(std::size_t tokens, std::size_t d_model, std::size_t n_heads,
                                 std::size_t n_kv_heads, std::size_t d_head, std::uint64_t seed) {
    AttentionProblem p;
    p.n_heads = n_heads;
    p.n_kv_heads = n_kv_heads;
    p.d_head = d_head;
    const double w = 1.0 / std::sqrt(static_cast<double>(d_model));
    p.x = random_matrix(tokens, d_model, seed, 0x100);
    p.wq = random_matrix(d_model, n_heads * d_head, seed, 0x101, w);
    p.wk = random_matrix(d_model, n_kv_heads * d_head, seed, 0x102, w);
    p.wv = random_matrix(d_model, n_kv_heads * d_head, seed, 0x103, w);
    p.wo = random_matrix(n_heads * d_head, d_model, seed, 0x104,
                         1.0 / std::sqrt(static_cast<double>(n_heads * d_head)));
    p.validate();
    return p;
  }
};

inline std::vector<Matrix> split_heads(const Matrix& m, std::size_t heads, std::size_t d_head) {
  std::vector<Matrix> out(heads, Matrix(m.rows, d_head));
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t c = 0; c < d_head; ++c) out[h](r, c) = m(r, h * d_head + c);
    }
  }
  return out;
}

inline Matrix concat_heads(const std::vector<Matrix>& heads) {
  if (heads.empty()) return {};
  const std::size_t d = heads.front().cols;
  Matrix out(heads.front().rows, d * heads.size());
  for (std::size_t h = 0; h < heads.size(); ++h) {
    for (std::size_t r = 0; r < out.rows; ++r) {
      for (std::size_t c = 0; c < d; ++c) out(r, h * d + c) = heads[h](r, c);
    }
  }
  return out;
}

/// Attention layer output (T x d_model). Softmax is always exact.
inline Matrix fcdc_attention(const AttentionProblem& p, AttentionMode mode, const QuantNoiseConfig& cfg) {
  p.validate();
  const bool proj = noisy_projections(mode);
  auto project = [&](const Matrix& a, const Matrix& w, std::uint64_t stream) {
    return proj ? fcdc_matmul(a, w, cfg, stream) : matmul(a, w);
  };
  const auto q = split_heads(project(p.x, p.wq, kStreamWq), p.n_heads, p.d_head);
  const auto k = split_heads(project(p.x, p.wk, kStreamWk), p.n_kv_heads, p.d_head);
  const auto v = split_heads(project(p.x, p.wv, kStreamWv), p.n_kv_heads, p.d_head);
  std::vector<HeadStreams> streams;
  for (std::size_t h = 0; h < p.n_heads; ++h) streams.push_back(default_head_streams(h));
  const auto heads = attention_heads(q, k, v, noisy_attention_matmuls(mode), cfg, streams);
  return project(concat_heads(heads), p.wo, kStreamWo);
}

struct WtaConfig {
  double sigma = 0.5;
  int k_eff = 8;
  int k_ens = 4;
  std::uint64_t seed = 0;

  void validate() const {
    if (k_eff < 1 || k_ens < 1 || sigma < 0) {
      throw DomainError("WTA config: need K_eff >= 1, K_ens >= 1, sigma >= 0");
    }
  }
};

inline constexpr std::uint64_t kWtaStreamBase = 0x5754410000000000ull;

/// Winner counts of K_ens independent noisy argmax events
/// argmax(s + sigma N(0, 1)). `row` selects an independent noise stream.
inline std::vector<std::uint64_t> wta_winner_counts(std::span<const double> scores, const WtaConfig& cfg,
                                                    std::uint64_t row = 0) {
  cfg.validate();
  if (scores.empty()) throw DomainError("mott_wta: empty score vector");
  const CounterRng rng(cfg.seed, kWtaStreamBase + row);
  const std::size_t t = scores.size();
  std::vector<std::uint64_t> counts(t, 0);
  for (std::uint64_t e = 0; e < static_cast<std::uint64_t>(cfg.k_ens); ++e) {
    std::size_t best = 0;
    double best_v = -INFINITY;
    for (std::size_t i = 0; i < t; ++i) {
      const double v = cfg.sigma > 0 ? scores[i] + cfg.sigma * rng.normal(e * t + i) : scores[i];
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    ++counts[best];
  }
  return counts;
}

inline std::vector<double> wta_winner_frequencies(std::span<const double> scores, const WtaConfig& cfg,
                                                  std::uint64_t row = 0) {
  const auto counts = wta_winner_counts(scores, cfg, row);
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(counts[i]) / cfg.k_ens;
  return f;
}

/// Sparse attention weights: the top-K_eff indices by winner count (ties by
/// raw score, then lower index) carry the exact softmax of their raw scores.
inline std::vector<double> mott_wta_softmax(std::span<const double> scores, const WtaConfig& cfg,
                                            std::uint64_t row = 0) {
  const auto counts = wta_winner_counts(scores, cfg, row);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg.k_eff), scores.size());
  std::vector<double> support(k);
  for (std::size_t i = 0; i < k; ++i) support[i] = scores[order[i]];
  const auto p = softmax(support);
  std::vector<double> out(scores.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = p[i];
  return out;
}

/// Non-MAC work saved against a dense T-wide softmax.
inline double wta_energy_reduction(std::uint64_t context_tokens, const WtaConfig& cfg) {
  cfg.validate();
  if (context_tokens < 1) throw DomainError("wta_energy_reduction: T must be >= 1");
  return static_cast<double>(context_tokens) / (static_cast<double>(cfg.k_eff) * cfg.k_ens);
}

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DomainError("total_variation: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

struct NoiseErrorPoint {
  double nf;
  double mean_squared_error;  // vs exact product, normalised by mean squared exact entry
  double relative_frobenius;
};

/// Error of fcdc_matmul on random n x n operands, averaged over `trials` seeds.
inline std::vector<NoiseErrorPoint> error_vs_nf(std::span<const double> nfs, std::size_t n,
                                                int trials, std::uint64_t seed, int bits = 8) {
  std::vector<NoiseErrorPoint> out;
  for (double nf : nfs) {
    double mse = 0.0, rel = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto a = random_matrix(n, n, seed + t, 0x200);
      const auto b = random_matrix(n, n, seed + t, 0x201);
      const auto exact = matmul(a, b);
      const QuantNoiseConfig cfg{nf, bits, bits, seed + t, true};
      const auto y = fcdc_matmul(a, b, cfg, 0x202);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < y.data.size(); ++i) {
        const double d = y.data[i] - exact.data[i];
        num += d * d;
        den += exact.data[i] * exact.data[i];
      }
      mse += num / den;
      rel += relative_error(y, exact);
    }
    out.push_back({nf, mse / trials, rel / trials});
  }
  return out;
}

struct WtaTvPoint {
  int k_eff;
  int k_ens;
  double mean_tv;
};

/// Mean TV distance of mott_wta_softmax to the exact softmax over `rows`
/// random unit-scale score rows of width `t`.
inline double wta_mean_tv(std::size_t t, std::size_t rows, const WtaConfig& cfg) {
  double tv = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto s = random_matrix(1, t, cfg.seed, 0x300 + r);
    const auto w = mott_wta_softmax(s.data, cfg, r);
    tv += total_variation(w, softmax(s.data));
  }
  return tv / static_cast<double>(rows);
}

}  // namespace fcdc::kernel
