#pragma once

// Tile and per-token energy accounting.
//
// The per-tile split (array / DAC / ADC) is anchored on the analytic tile
// model's published values at 16,384 active MACs and V_rd = 0.158 V. These
// anchors are kept separate from the closed-form cell read energy in
// device_model.hpp; the two are not reconciled.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcdc/errors.hpp"

namespace fcdc::tile {

enum class DacVariant { vdac, pwm };

inline std::string_view to_string(DacVariant v) { return v == DacVariant::vdac ? "V-DAC" : "PWM"; }

inline DacVariant dac_variant_from(std::string_view s) {
  if (s == "V-DAC" || s == "vdac") return DacVariant::vdac;
  if (s == "PWM" || s == "pwm") return DacVariant::pwm;
  throw ConfigError("unknown DAC variant '" + std::string(s) + "'");
}

/// Reference point of the anchored tile model.
namespace anchor {
inline constexpr std::uint64_t kMacsPerRead = 16384;
inline constexpr double kReadVoltage = 0.158;
inline constexpr double kArrayJ = 9.92e-15;
// 18.75 fJ/MAC x 16,384; the table rounds this to 3.07e-10 J/tile.
inline constexpr double kVdacJ = 3.072e-10;
inline constexpr double kAdcJ = 7.68e-12;
inline constexpr double kPwmPerMacJ = 7.8e-16;
// PWM row drivers take whatever remains of 0.78 fJ/MAC after array and ADC.
inline constexpr double kPwmDacJ = kPwmPerMacJ * kMacsPerRead - kArrayJ - kAdcJ;
// Validated V_read window for the quadratic scaling.
inline constexpr double kMinReadVoltage = 0.05;
inline constexpr double kMaxReadVoltage = 0.2;
}  // namespace anchor

struct TileEnergyConfig {
  int rows = 256;
  int active_cols = 64;  // d_head per head slice
  int columns = 256;
  DacVariant dac_variant = DacVariant::vdac;
  int dac_bits = 4;
  int adc_bits = 4;
  int adcs_per_tile = 128;  // one per two columns
  double read_voltage_V = anchor::kReadVoltage;

  std::uint64_t macs_per_read() const {
    return static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(active_cols);
  }

  void validate() const {
    if (rows < 0 || active_cols < 0 || columns < 0 || adcs_per_tile < 0) {
      throw ConfigError("tile config: negative dimension");
    }
    if (active_cols > columns) throw ConfigError("tile config: active_cols exceeds columns");
    if (adcs_per_tile > columns) throw ConfigError("tile config: more ADCs than columns");
    if (dac_bits != 4 || adc_bits != 4) {
      throw ConfigError("tile config: only the 4-bit DAC / 4-bit SAR ADC tile is characterised");
    }
    if (read_voltage_V < anchor::kMinReadVoltage || read_voltage_V > anchor::kMaxReadVoltage) {
      throw ConfigError("tile config: read voltage outside the validated [50 mV, 200 mV] window");
    }
  }
};

struct EnergyBreakdown {
  double array_J = 0.0;
  double dac_J = 0.0;
  double adc_J = 0.0;
  double total_J = 0.0;
  double per_mac_J = 0.0;
};

/// Energy of one tile read, scaled linearly in active MACs and
/// quadratically in V_read (array and DAC) from the anchor.
inline EnergyBreakdown tile_read_energy(const TileEnergyConfig& cfg) {
  cfg.validate();
  const auto macs = cfg.macs_per_read();
  EnergyBreakdown e;
  if (macs == 0) return e;
  const double size = static_cast<double>(macs) / static_cast<double>(anchor::kMacsPerRead);
  const double v = cfg.read_voltage_V / anchor::kReadVoltage;
  const double dac = cfg.dac_variant == DacVariant::vdac ? anchor::kVdacJ : anchor::kPwmDacJ;
  e.array_J = anchor::kArrayJ * size * v * v;
  e.dac_J = dac * size * v * v;
  e.adc_J = anchor::kAdcJ * size;
  e.total_J = e.array_J + e.dac_J + e.adc_J;
  e.per_mac_J = e.total_J / static_cast<double>(macs);
  return e;
}

inline double per_mac_energy(DacVariant v) {
  TileEnergyConfig cfg;
  cfg.dac_variant = v;
  return tile_read_energy(cfg).per_mac_J;
}

/// Grouped-query attention shape of a Mistral-7B-class decoder.
struct AttentionShape {
  int n_heads = 32;
  int d_head = 128;
  int n_kv_heads = 8;
  int n_layers = 32;

  void validate() const {
    if (n_heads < 1 || d_head < 1 || n_kv_heads < 1 || n_layers < 1) {
      throw ConfigError("attention shape: all dimensions must be >= 1");
    }
    if (n_heads % n_kv_heads != 0) {
      throw ConfigError("attention shape: n_heads must be a multiple of n_kv_heads");
    }
  }
};

/// Q.K^T plus A.V multiply-accumulates per decoded token, one layer.
inline std::uint64_t attention_macs_per_token(std::uint64_t context_tokens,
                                              const AttentionShape& shape = {}) {
  return 2 * context_tokens * static_cast<std::uint64_t>(shape.n_heads) *
         static_cast<std::uint64_t>(shape.d_head);
}

inline double fcdc_token_energy(std::uint64_t context_tokens, const AttentionShape& shape,
                                DacVariant variant) {
  return static_cast<double>(attention_macs_per_token(context_tokens, shape)) *
         per_mac_energy(variant);
}

/// The original flat FCDC J/token column, kept for traceability only; it
/// omits the O(T) tile reads.
inline constexpr double kUndercountedLegacyTokenJ = 3.78e-10;

/// Affine fit a + b T to the four analytic A40 points (T = 16..1024).
namespace a40 {
inline constexpr double kOffsetJ = 6.27e-9;
inline constexpr double kSlopeJ = 1.933e-9;
}  // namespace a40

inline double a40_analytic_token_energy(std::uint64_t context_tokens) {
  if (context_tokens < 1) throw DomainError("a40_analytic_token_energy: T must be >= 1");
  return a40::kOffsetJ + a40::kSlopeJ * static_cast<double>(context_tokens);
}

inline double active_mac_ratio(std::uint64_t context_tokens, DacVariant variant,
                               const AttentionShape& shape = {}) {
  return a40_analytic_token_energy(context_tokens) /
         fcdc_token_energy(context_tokens, shape, variant);
}

struct KvAppend {
  std::uint64_t cells_per_token = 0;
  double energy_J = 0.0;
  double attention_fraction = 0.0;
};

/// KV-append write cost per decoded token: one K and one V vector per layer
/// per KV head. The fraction is taken against the per-layer active-MAC
/// attention energy at `context_tokens`.
inline KvAppend kv_append_energy(const AttentionShape& shape, double e_write_per_cell,
                                 std::uint64_t context_tokens = 1024,
                                 DacVariant variant = DacVariant::vdac) {
  if (e_write_per_cell < 0 || e_write_per_cell > 1e-12) {
    throw DomainError("kv_append_energy: write energy outside [0, 1 pJ]");
  }
  KvAppend out;
  out.cells_per_token = 2ull * static_cast<std::uint64_t>(shape.n_layers) *
                        static_cast<std::uint64_t>(shape.n_kv_heads) *
                        static_cast<std::uint64_t>(shape.d_head);
  out.energy_J = static_cast<double>(out.cells_per_token) * e_write_per_cell;
  const double attention = fcdc_token_energy(context_tokens, shape, variant);
  out.attention_fraction = attention > 0 ? out.energy_J / attention : 0.0;
  return out;
}

enum class Normalization {
  one_bit,    // 1-b x 1-b MAC; scales with bits^2
  native,     // quoted at its own precision
  projected,  // tile model at 4-b DAC/ADC
};

struct ComparatorEntry {
  std::string name;
  Normalization normalization;
  int native_bits;
  double native_fj_per_mac;
  double fj_per_mac;
};

/// Active-MAC comparators put on a common precision basis. One-bit
/// normalised switched-capacitor SRAM numbers scale by target_bits^2;
/// HERMES stays at its native 8 b; FCDC entries are the tile projection.
inline std::vector<ComparatorEntry> comparator_table(int target_bits) {
  if (target_bits != 1 && target_bits != 4 && target_bits != 8) {
    throw DomainError("comparator_table: target bits must be 1, 4 or 8");
  }
  const double one_bit_scale = static_cast<double>(target_bits) * target_bits;
  std::vector<ComparatorEntry> out = {
      {"HERMES PCM-IMC 1-phase (14 nm)", Normalization::native, 8, 204.0, 204.0},
      {"HERMES PCM-IMC 4-phase (14 nm)", Normalization::native, 8, 806.0, 806.0},
      {"SC-SRAM (28 nm)", Normalization::one_bit, 1, 0.17, 0.17 * one_bit_scale},
      {"SC-SRAM differential (2024)", Normalization::one_bit, 1, 0.12, 0.12 * one_bit_scale},
  };
  for (auto v : {DacVariant::vdac, DacVariant::pwm}) {
    const double fj = per_mac_energy(v) / 1e-15;
    out.push_back({"FCDC " + std::string(to_string(v)), Normalization::projected, 4, fj, fj});
  }
  return out;
}

struct TokenSweepRow {
  std::uint64_t context_tokens;
  std::uint64_t macs;
  double undercounted_legacy_J;
  double fcdc_vdac_J;
  double fcdc_pwm_J;
  double a40_analytic_J;
  double ratio_vdac;
  double ratio_pwm;
};

inline std::vector<TokenSweepRow> per_token_sweep(std::span<const std::uint64_t> contexts,
                                                  const AttentionShape& shape = {}) {
  std::vector<TokenSweepRow> rows;
  for (auto t : contexts) {
    const double vdac = fcdc_token_energy(t, shape, DacVariant::vdac);
    const double pwm = fcdc_token_energy(t, shape, DacVariant::pwm);
    const double gpu = a40_analytic_token_energy(t);
    rows.push_back({t, attention_macs_per_token(t, shape), kUndercountedLegacyTokenJ, vdac, pwm,
                    gpu, gpu / vdac, gpu / pwm});
  }
  return rows;
}

}  // namespace fcdc::tile
