#pragma once

// Column-referred noise accounting for one tile read: kT/C, sense-amp
// flicker, capacitance mismatch, NC input-referred propagation, and the
// Monte-Carlo re-estimation of a tile operating point's noise fraction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fcdc/constants.hpp"
#include "fcdc/errors.hpp"
#include "fcdc/rng.hpp"

namespace fcdc::noise {

struct NoiseComponents {
  double v_ktc = 0.0;
  double v_flicker = 0.0;
  double mismatch_fraction = 0.0;
  // Reset, comparator offset and drift terms that do not average over rows.
  double correlated_floor = 0.0;
};

/// sqrt(kT/C) sampled per cell, averaged over `rows` independent rows.
inline double ktc_noise(double capacitance_F, double temperature_K, int rows) {
  if (!(capacitance_F > 0) || rows < 1) throw DomainError("ktc_noise: need C > 0 and rows >= 1");
  if (temperature_K < 0) throw DomainError("ktc_noise: negative temperature");
  return std::sqrt(constants::kBoltzmann * temperature_K / capacitance_F) /
         std::sqrt(static_cast<double>(rows));
}

/// 1/f noise with density `amplitude` V/rtHz at 1 Hz integrated over [f_lo, f_hi].
inline double flicker_noise(double amplitude, double f_lo, double f_hi) {
  if (!(f_lo > 0) || !(f_hi > f_lo)) throw DomainError("flicker_noise: need f_hi > f_lo > 0");
  return amplitude * std::sqrt(std::log(f_hi / f_lo));
}

enum class MismatchCorrelation { independent, correlated };

/// Column-level mismatch. Only independent post-calibration errors average.
inline double mismatch_effective(double sigma_c_over_c, int rows, MismatchCorrelation corr) {
  if (sigma_c_over_c < 0 || sigma_c_over_c > 0.5) {
    throw DomainError("mismatch_effective: sigma_C/C outside [0, 0.5]");
  }
  if (rows < 1) throw DomainError("mismatch_effective: rows must be >= 1");
  if (corr == MismatchCorrelation::correlated) return sigma_c_over_c;
  return sigma_c_over_c / std::sqrt(static_cast<double>(rows));
}

/// Read-path noise terms around an NC gain stage. Everything except the
/// sense amplifier sits upstream of the gain and is not reduced by it.
struct NcPropagation {
  double sigma_cell = 0.0;
  double sigma_read_fet = 0.0;
  double sigma_sense = 0.0;
  double sigma_nc_jitter = 0.0;
  double gain = 1.0;
  double gain_rel_sigma = 0.0;  // sigma_Av / A_v
  double signal = 0.0;
};

/// Conservative input-referred sigma.
inline double nc_input_referred(const NcPropagation& p) {
  if (!(p.gain > 0)) throw DomainError("nc_input_referred: gain must be positive");
  const double sense = p.sigma_sense / p.gain;
  const double gain_var = p.gain_rel_sigma * p.signal;
  return std::sqrt(p.sigma_cell * p.sigma_cell + p.sigma_read_fet * p.sigma_read_fet +
                   sense * sense + gain_var * gain_var + p.sigma_nc_jitter * p.sigma_nc_jitter);
}

enum class OperatingLabel { aggressive, nominal, conservative };

inline std::string_view to_string(OperatingLabel l) {
  switch (l) {
    case OperatingLabel::aggressive: return "aggressive";
    case OperatingLabel::nominal: return "nominal";
    case OperatingLabel::conservative: return "conservative";
  }
  return "?";
}

inline OperatingLabel operating_label_from(std::string_view s) {
  if (s == "aggressive") return OperatingLabel::aggressive;
  if (s == "nominal") return OperatingLabel::nominal;
  if (s == "conservative") return OperatingLabel::conservative;
  throw ConfigError("unknown operating point label '" + std::string(s) + "'");
}

/// Tile geometry with its calibrated noise fraction nf = sigma / Q_FS.
/// The nf values are published calibration anchors, not derived here.
struct TileOperatingPoint {
  OperatingLabel label = OperatingLabel::nominal;
  int rows = 256;
  double read_voltage_V = 0.1;
  double integration_cap_F = 400e-15;
  double nf = 0.015;

  void validate() const {
    if (rows < 1) throw DomainError("operating point: rows must be >= 1");
    if (!(read_voltage_V > 0) || !(integration_cap_F > 0)) {
      throw DomainError("operating point: read voltage and C_int must be positive");
    }
    if (!(nf > 0 && nf < 0.1)) throw DomainError("operating point: nf outside (0, 0.1)");
  }
};

/// Column full-scale charge N_rows * C0 * V_read.
inline double full_scale_charge(const TileOperatingPoint& op, double cell_capacitance_F) {
  return op.rows * cell_capacitance_F * op.read_voltage_V;
}

struct MonteCarloResult {
  double configured_nf = 0.0;
  double estimated_nf = 0.0;
  double standard_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string warning;
};

inline constexpr std::uint64_t kMinMonteCarloSamples = 10'000;

/// Sample noisy column reads of `op` and re-estimate nf from the residuals.
///
/// Each read draws a stored column charge uniformly in [0, Q_FS) and adds
/// Gaussian noise with sigma = nf * Q_FS. Sample i always uses counter i of
/// the seed's stream, and partial sums are reduced in fixed-size blocks, so
/// the estimate is bit-identical for any `threads`.
inline MonteCarloResult monte_carlo_nf(const TileOperatingPoint& op, double nf,
                                       double cell_capacitance_F, std::uint64_t n_samples,
                                       std::uint64_t seed, unsigned threads = 1) {
  if (n_samples == 0) throw DomainError("monte_carlo_nf: need at least one sample");
  if (nf < 0) throw DomainError("monte_carlo_nf: negative nf");
  const double q_fs = full_scale_charge(op, cell_capacitance_F);
  const double sigma = nf * q_fs;
  const CounterRng rng(seed, /*stream=*/0x6e66);

  constexpr std::uint64_t kBlock = 4096;
  const std::uint64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  struct Moments {
    double s2 = 0.0;  // sum r^2 (normalised to Q_FS)
    double s4 = 0.0;  // sum r^4
  };
  std::vector<Moments> blocks(n_blocks);

  auto run_block = [&](std::uint64_t b) {
    Moments m;
    const std::uint64_t end = std::min(n_samples, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      const auto [u, _] = rng.uniform2(2 * i);
      const double z = rng.normal(2 * i + 1);
      const double stored = u * q_fs;
      const double read = stored + sigma * z;
      const double r = (read - stored) / q_fs;
      m.s2 += r * r;
      m.s4 += r * r * r * r;
    }
    blocks[b] = m;
  };

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_blocks)));
  if (threads == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t b = t; b < n_blocks; b += threads) run_block(b);
      });
    }
  }

  Moments total;
  for (const auto& m : blocks) {
    total.s2 += m.s2;
    total.s4 += m.s4;
  }
  const double n = static_cast<double>(n_samples);
  const double m2 = total.s2 / n;
  const double var_r2 = std::max(0.0, total.s4 / n - m2 * m2);

  MonteCarloResult out;
  out.configured_nf = nf;
  out.n_samples = n_samples;
  out.seed = seed;
  out.estimated_nf = std::sqrt(m2);
  // delta method: se(sqrt(m2)) = se(m2) / (2 sqrt(m2))
  out.standard_error = m2 > 0 ? std::sqrt(var_r2 / n) / (2.0 * out.estimated_nf) : 0.0;
  if (n_samples < kMinMonteCarloSamples) {
    out.warning = "fewer than 1e4 samples: estimate precision not guaranteed";
  }
  return out;
}

inline MonteCarloResult monte_carlo_nf(const TileOperatingPoint& op, double cell_capacitance_F,
                                       std::uint64_t n_samples, std::uint64_t seed,
                                       unsigned threads = 1) {
  return monte_carlo_nf(op, op.nf, cell_capacitance_F, n_samples, seed, threads);
}

}  // namespace fcdc::noise
