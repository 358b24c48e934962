#pragma once

// Report tables, published-value checks and the `reproduce` driver.
//
// Each artifact is a set of tables plus checks of computed values against
// published ones. Output is written with fixed formatting and no
// timestamps, so identical config and seed give byte-identical files.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <tuple>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "fcdc/analog_kernel.hpp"
#include "fcdc/cache_model.hpp"
#include "fcdc/config.hpp"
#include "fcdc/device_model.hpp"
#include "fcdc/noise_budget.hpp"
#include "fcdc/serving_sim.hpp"
#include "fcdc/tile_energy.hpp"

namespace fcdc::report {

enum class Format { csv, json };

inline Format format_from(std::string_view s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ConfigError("unknown output format '" + std::string(s) + "'");
}

inline std::string_view extension(Format f) { return f == Format::csv ? "csv" : "json"; }

using Cell = std::variant<std::string, double, std::int64_t>;

inline std::string format_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return fmt::format("{}", *i);
  return fmt::format("{:.10g}", std::get<double>(c));
}

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw DomainError("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + csv_escape(t.columns[i]);
  s += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + csv_escape(format_cell(r[i]));
    s += '\n';
  }
  return s;
}

inline nlohmann::ordered_json to_json_value(const Table& t) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json o;
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::visit([&](const auto& v) { o[t.columns[i]] = v; }, r[i]);
    }
    rows.push_back(std::move(o));
  }
  return rows;
}

inline std::string render(const Table& t, Format f) {
  return f == Format::csv ? to_csv(t) : to_json_value(t).dump(2) + "\n";
}

/// A computed value compared with a published one.
struct Check {
  enum class Kind {
    relative,   // |c/p - 1| <= tol
    quoted,     // c rounded to `decimals` places, then relative to p
    at_most,    // c <= p
    exact,      // c == p
  };
  std::string artifact;
  std::string quantity;
  double published = 0.0;
  double computed = 0.0;
  Kind kind = Kind::relative;
  double tolerance = 0.0;
  int decimals = 0;

  double compared() const {
    if (kind != Kind::quoted) return computed;
    const double scale = std::pow(10.0, decimals);
    return std::round(computed * scale) / scale;
  }

  double deviation() const { return published != 0 ? compared() / published - 1.0 : compared(); }

  bool pass() const {
    switch (kind) {
      case Kind::relative:
      case Kind::quoted: return std::abs(deviation()) <= tolerance;
      case Kind::at_most: return computed <= published;
      case Kind::exact: return computed == published;
    }
    return false;
  }

  std::string rule() const {
    switch (kind) {
      case Kind::relative: return fmt::format("within {:g}%", tolerance * 100);
      case Kind::quoted: return fmt::format("within {:g}% at {} decimals", tolerance * 100, decimals);
      case Kind::at_most: return "at most";
      case Kind::exact: return "exact";
    }
    return "";
  }
};

inline Check rel(std::string artifact, std::string quantity, double published, double computed, double tol) {
  return {std::move(artifact), std::move(quantity), published, computed, Check::Kind::relative, tol, 0};
}

struct Artifact {
  std::string name;
  std::vector<Table> tables;
  std::vector<Check> checks;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
};

/// Published values checked by `reproduce`.
namespace published {
inline constexpr double kVdacFjPerMac = 19.2;
inline constexpr double kPwmFjPerMac = 0.78;
inline constexpr double kDacDominance = 3.2e4;
inline constexpr double kFcdcVdacTokenJ = 1.6e-7;
inline constexpr double kFcdcPwmTokenJ = 6.6e-9;
inline constexpr double kRatioVdac1024 = 12.0;
inline constexpr double kRatioPwm1024 = 300.0;
inline constexpr std::array<std::pair<std::uint64_t, double>, 4> kA40Points{
    {{16, 3.72e-8}, {64, 1.30e-7}, {256, 5.01e-7}, {1024, 1.99e-6}}};
// Gain-cell write energy used as the per-cell KV-append upper bound.
inline constexpr double kKvWriteBoundJ = 5e-14;
inline constexpr double kKvAppendJ = 3.3e-9;
inline constexpr double kKvAppendFraction = 0.02;

inline constexpr std::array<const char*, 5> kWorkloads{"chat", "qa", "rag", "agent", "parked"};
inline constexpr std::array<double, 5> kGpuJ{25.7, 21.1, 103, 206, 1.10e5};
inline constexpr std::array<double, 5> kHybridJ{5.76, 5.65, 5.71, 5.82, 84.4};
inline constexpr std::array<double, 5> kG0{4.5, 3.7, 18, 35, 1.3e3};
inline constexpr std::array<double, 5> kG1{0.93, 0.92, 1.36, 1.89, 41};
inline constexpr std::array<double, 5> kG2{1.84, 1.69, 2.96, 4.69, 1.3e2};
inline constexpr std::array<double, 5> kG3{1.56, 1.40, 2.35, 3.57, 93};
inline constexpr std::array<double, 5> kUnicaim{4.5, 3.7, 18, 35, 1.3e3};
inline constexpr std::array<double, 5> kXformer{4.2, 3.4, 15, 20, 68};
inline constexpr std::array<double, 5> kFcdcPwm{4.5, 3.7, 18, 35, 1.3e3};
inline constexpr double kParkedIdle01 = 650;
inline constexpr double kParkedIdle02 = 325;
}  // namespace published

// Per-artifact tolerances.
inline constexpr double kTolCell = 0.01;
inline constexpr double kTolTile3sf = 0.005;
inline constexpr double kTolDominance = 0.05;
inline constexpr double kTolToken = 0.02;
inline constexpr double kTolA40 = 0.01;
inline constexpr double kTolTokenRatio = 0.05;
inline constexpr double kTolComparatorBits = 0.05;
inline constexpr double kTolKv = 0.10;
inline constexpr double kTolCache = 0.02;
inline constexpr double kTolTable3 = 0.03;
inline constexpr double kTolSpeedup = 0.10;
inline constexpr double kTolG1 = 0.10;
inline constexpr double kTolG23 = 0.15;
inline constexpr double kTolSensitivity = 0.10;
inline constexpr double kTolComparator = 0.10;
inline constexpr double kTolMonteCarlo = 0.05;

inline const std::vector<double>& thickness_grid() {
  static const std::vector<double> g{6e-9, 6.5e-9, 7e-9, 7.5e-9, 8e-9, 8.5e-9, 9e-9, 9.5e-9,
                                     10e-9, 10.5e-9, 11e-9, 11.5e-9, 12e-9};
  return g;
}

inline Artifact build_fig_thickness(const config::WorkbenchConfig& c) {
  Artifact a{"fig_thickness_data", {}, {}, {}};
  const double v = c.cell.read_voltage_V;
  const auto sweep = device::thickness_sweep(thickness_grid(), c.cell.geometry, v, c.disturb);
  Table t{"fig_thickness_data",
          {"thickness_nm", "C0_aF", "E_read_J", "C0_vs_10nm", "E_read_vs_10nm", "vktc_vs_10nm", "Erd_over_Ec",
           "p_flip"},
          {}};
  for (const auto& p : sweep) {
    t.add({p.thickness_m / 1e-9, p.capacitance_F / 1e-18, p.read_energy_J, p.capacitance_ratio,
           p.read_energy_ratio, p.vktc_ratio, p.field_ratio, p.flip_probability});
  }
  a.tables.push_back(std::move(t));

  auto at = [&](double d) {
    for (const auto& p : sweep) {
      if (std::abs(p.thickness_m - d) < 1e-12) return p;
    }
    throw DomainError("thickness grid lacks requested point");
  };
  const auto p8 = at(8e-9), p6 = at(6e-9), p10 = at(10e-9);
  const std::string n = a.name;
  a.checks.push_back(rel(n, "C0 at 8 nm (aF)", 69, p8.capacitance_F / 1e-18, kTolCell));
  a.checks.push_back(rel(n, "E_read at 8 nm (J)", 8.6e-19, p8.read_energy_J, kTolCell));
  a.checks.push_back({n, "E_rd/E_c at 8 nm", 0.20, p8.field_ratio, Check::Kind::quoted, kTolCell, 2});
  a.checks.push_back({n, "E_rd/E_c at 6 nm", 0.26, p6.field_ratio, Check::Kind::quoted, kTolCell, 2});
  a.checks.push_back({n, "E_rd/E_c at 10 nm", 0.16, p10.field_ratio, Check::Kind::quoted, kTolCell, 2});
  a.checks.push_back({n, "C0 gain 8 vs 10 nm (%)", 25, (p8.capacitance_ratio - 1) * 100, Check::Kind::quoted,
                      kTolCell, 0});
  a.checks.push_back({n, "v_kTC change 8 vs 10 nm (%)", -11, (p8.vktc_ratio - 1) * 100, Check::Kind::quoted,
                      kTolCell, 0});
  Table env{"flip_envelope", {"E_a_MV_per_cm", "max_p_flip", "thickness_at_max_nm"}, {}};
  for (double ea : {9.0, 20.0}) {
    auto dp = c.disturb;
    dp.activation_field_V_per_m = ea * constants::kMegaVoltPerCm;
    double worst = 0, where = 0;
    for (const auto& p : device::thickness_sweep(thickness_grid(), c.cell.geometry, v, dp)) {
      if (p.flip_probability > worst) {
        worst = p.flip_probability;
        where = p.thickness_m;
      }
    }
    env.add({ea, worst, where / 1e-9});
  }
  a.tables.push_back(std::move(env));

  Table d{"disturb", {"E_a_MV_per_cm", "E_eff_MV_per_cm", "p_flip_bound"}, {}};
  auto dp = c.disturb_at_read();
  for (double ea : {9.0, 20.0}) {
    dp.activation_field_V_per_m = ea * constants::kMegaVoltPerCm;
    const double p = device::disturb_probability(dp);
    d.add({ea, dp.effective_field_V_per_m / constants::kMegaVoltPerCm, p});
    a.checks.push_back({n, fmt::format("p_flip bound at E_a={:g} MV/cm", ea), 1e-17, p, Check::Kind::at_most, 0, 0});
  }
  const double ea_req = device::required_activation_field(c.disturb_target, dp) / constants::kMegaVoltPerCm;
  d.add({ea_req, dp.effective_field_V_per_m / constants::kMegaVoltPerCm, c.disturb_target});
  a.checks.push_back({n, "required E_a (MV/cm)", 6.9, ea_req, Check::Kind::quoted, kTolCell, 1});
  a.tables.push_back(std::move(d));

  Table g{"nc_gain", {"cap_ratio", "process_shift", "shifted_ratio", "gain", "boundary_crossed"}, {}};
  const std::array<std::tuple<double, double, double>, 4> anchors{
      {{c.nc.cap_ratio, 0.0, 2.5}, {c.nc.cap_ratio, -0.2, 8.3}, {c.nc.cap_ratio, 0.2, 1.47}, {3.5, 0.0, 1.4}}};
  for (auto [r, s, pub] : anchors) {
    const auto gain = device::nc_gain({r, s});
    g.add({r, s, gain.shifted_ratio, gain.magnitude, std::string(gain.boundary_crossed ? "true" : "false")});
    a.checks.push_back(rel(n, fmt::format("|A_v| at r={:g}, shift={:+g}", r, s), pub, gain.magnitude, kTolCell));
  }
  for (double s : {-0.3, 0.3}) {
    const auto gain = device::nc_gain({c.nc.cap_ratio, s});
    g.add({c.nc.cap_ratio, s, gain.shifted_ratio, gain.magnitude,
           std::string(gain.boundary_crossed ? "true" : "false")});
  }
  a.tables.push_back(std::move(g));
  a.parameters["read_voltage_V"] = v;
  a.parameters["anchor_thickness_m"] = 10e-9;
  return a;
}

inline Artifact build_fig3(const config::WorkbenchConfig& c) {
  Artifact a{"fig3_data", {}, {}, {}};
  const std::string n = a.name;
  const double c0 = device::cell_capacitance(c.cell.geometry);
  const auto& z = c.noise;
  const int rows = c.operating_point(noise::OperatingLabel::nominal).rows;
  const double ktc = noise::ktc_noise(c0, c.cell.temperature_K, rows);
  const double flicker = noise::flicker_noise(z.flicker_amplitude, z.flicker_f_lo_Hz, z.flicker_f_hi_Hz);
  const auto corr = z.mismatch_correlated ? noise::MismatchCorrelation::correlated
                                          : noise::MismatchCorrelation::independent;
  const double nc_gain = device::nc_gain(c.nc).magnitude;
  noise::NcPropagation prop{ktc, z.read_fet_sigma_V, flicker, z.nc_jitter_sigma_V, nc_gain, z.nc_gain_rel_sigma, 0};
  const double with_gain = noise::nc_input_referred(prop);
  prop.gain = 1.0;
  const double no_gain = noise::nc_input_referred(prop);

  Table comp{"noise_components", {"component", "value", "unit"}, {}};
  comp.add({std::string("C0"), c0, std::string("F")});
  comp.add({std::string("v_kTC"), ktc, std::string("V")});
  comp.add({std::string("v_flicker"), flicker, std::string("V")});
  comp.add({std::string("mismatch_effective"), noise::mismatch_effective(z.mismatch, rows, corr), std::string("")});
  comp.add({std::string("correlated_floor"), z.correlated_floor_V, std::string("V")});
  comp.add({std::string("input_referred_with_nc"), with_gain, std::string("V")});
  comp.add({std::string("input_referred_no_nc"), no_gain, std::string("V")});
  a.tables.push_back(std::move(comp));
  a.checks.push_back(rel(n, "v_kTC (uV)", 484, ktc / 1e-6, kTolCell));
  a.checks.push_back({n, "v_flicker (uV)", 46, flicker / 1e-6, Check::Kind::quoted, kTolCell, 0});

  Table mc{"monte_carlo_nf",
           {"label", "N_rows", "V_read_V", "C_int_F", "Q_FS_C", "configured_nf", "estimated_nf", "stderr",
            "n_samples", "seed"},
           {}};
  for (const auto& op : c.operating_points) {
    const auto r = noise::monte_carlo_nf(op, c0, z.monte_carlo_samples, c.seed, z.threads);
    mc.add({std::string(noise::to_string(op.label)), static_cast<std::int64_t>(op.rows), op.read_voltage_V,
            op.integration_cap_F, noise::full_scale_charge(op, c0), r.configured_nf, r.estimated_nf,
            r.standard_error, static_cast<std::int64_t>(r.n_samples), static_cast<std::int64_t>(r.seed)});
    a.checks.push_back(rel(n, fmt::format("MC nf, {}", noise::to_string(op.label)), op.nf, r.estimated_nf,
                           kTolMonteCarlo));
  }
  a.tables.push_back(std::move(mc));

  // Kernel-level error along the nf axis.
  std::vector<double> nfs{0.0};
  for (const auto& op : c.operating_points) nfs.push_back(op.nf);
  std::sort(nfs.begin(), nfs.end());
  const auto curve = kernel::error_vs_nf(nfs, c.kernel.matrix_size, c.kernel.trials, c.seed,
                                         c.kernel.quant.adc_bits);
  Table k{"matmul_error_vs_nf", {"nf", "normalized_mse", "relative_frobenius"}, {}};
  for (const auto& p : curve) k.add({p.nf, p.mean_squared_error, p.relative_frobenius});
  a.tables.push_back(std::move(k));
  a.parameters["monte_carlo_samples"] = z.monte_carlo_samples;
  a.parameters["seed"] = c.seed;
  a.parameters["matrix_size"] = c.kernel.matrix_size;
  a.parameters["trials"] = c.kernel.trials;
  return a;
}

inline Artifact build_table2(const config::WorkbenchConfig& c) {
  Artifact a{"table2", {}, {}, {}};
  const std::string n = a.name;
  Table t{"table2", {"variant", "array_J", "dac_J", "adc_J", "total_J", "fJ_per_MAC"}, {}};
  for (auto v : {tile::DacVariant::vdac, tile::DacVariant::pwm}) {
    auto cfg = c.tile;
    cfg.dac_variant = v;
    const auto e = tile::tile_read_energy(cfg);
    t.add({std::string(tile::to_string(v)), e.array_J, e.dac_J, e.adc_J, e.total_J, e.per_mac_J / 1e-15});
  }
  a.tables.push_back(std::move(t));
  const auto vdac = tile::per_mac_energy(tile::DacVariant::vdac) / 1e-15;
  const auto pwm = tile::per_mac_energy(tile::DacVariant::pwm) / 1e-15;
  a.checks.push_back({n, "V-DAC fJ/MAC", published::kVdacFjPerMac, vdac, Check::Kind::quoted, kTolTile3sf, 1});
  a.checks.push_back({n, "PWM fJ/MAC", published::kPwmFjPerMac, pwm, Check::Kind::quoted, kTolTile3sf, 2});
  a.checks.push_back(rel(n, "(DAC+ADC)/array", published::kDacDominance,
                         (tile::anchor::kVdacJ + tile::anchor::kAdcJ) / tile::anchor::kArrayJ, kTolDominance));

  const auto& shape = c.serving.shape;
  const std::vector<std::uint64_t> contexts{16, 64, 256, 1024, 4096, 8192, 16384, 32768};
  Table s{"per_token",
          {"T", "MACs", "legacy_flat_J", "fcdc_vdac_J", "fcdc_pwm_J", "a40_analytic_J", "ratio_vdac", "ratio_pwm"},
          {}};
  for (const auto& r : tile::per_token_sweep(contexts, shape)) {
    s.add({static_cast<std::int64_t>(r.context_tokens), static_cast<std::int64_t>(r.macs), r.undercounted_legacy_J,
           r.fcdc_vdac_J, r.fcdc_pwm_J, r.a40_analytic_J, r.ratio_vdac, r.ratio_pwm});
  }
  a.tables.push_back(std::move(s));
  a.checks.push_back({n, "MACs at T=1024", 8388608.0,
                      static_cast<double>(tile::attention_macs_per_token(1024, shape)), Check::Kind::exact, 0, 0});
  a.checks.push_back(rel(n, "FCDC V-DAC J/token at T=1024", published::kFcdcVdacTokenJ,
                         tile::fcdc_token_energy(1024, shape, tile::DacVariant::vdac), kTolToken));
  a.checks.push_back(rel(n, "FCDC PWM J/token at T=1024", published::kFcdcPwmTokenJ,
                         tile::fcdc_token_energy(1024, shape, tile::DacVariant::pwm), kTolToken));
  for (auto [t_ctx, j] : published::kA40Points) {
    a.checks.push_back(rel(n, fmt::format("A40 analytic J/token at T={}", t_ctx), j,
                           tile::a40_analytic_token_energy(t_ctx), kTolA40));
  }
  a.checks.push_back(rel(n, "A40/V-DAC at T=1024", published::kRatioVdac1024,
                         tile::active_mac_ratio(1024, tile::DacVariant::vdac, shape), kTolTokenRatio));
  a.checks.push_back(rel(n, "A40/PWM at T=1024", published::kRatioPwm1024,
                         tile::active_mac_ratio(1024, tile::DacVariant::pwm, shape), kTolTokenRatio));

  const auto kv = tile::kv_append_energy(shape, published::kKvWriteBoundJ);
  Table k{"kv_append", {"cells_per_token", "e_write_J", "energy_J", "fraction_of_attention"}, {}};
  k.add({static_cast<std::int64_t>(kv.cells_per_token), published::kKvWriteBoundJ, kv.energy_J,
         kv.attention_fraction});
  a.tables.push_back(std::move(k));
  a.checks.push_back({n, "KV cells per token", 65536.0, static_cast<double>(kv.cells_per_token),
                      Check::Kind::exact, 0, 0});
  a.checks.push_back(rel(n, "KV append J/token", published::kKvAppendJ, kv.energy_J, kTolKv));
  a.checks.push_back(rel(n, "KV append fraction of attention", published::kKvAppendFraction,
                         kv.attention_fraction, kTolKv));
  return a;
}

inline Artifact build_cache(const config::WorkbenchConfig& c) {
  Artifact a{"cache", {}, {}, {}};
  const std::string n = a.name;
  const std::vector<double> residencies{1e-6, 1e-5, 2e-5, 1e-4, 1e-3, 2e-3, 1e-2, 1e-1, 1, 10, 60, 3600, 28800,
                                        100800};
  Table t{"cache_residency",
          {"residency_s", "parked_1fJ", "parked_100fJ", "active_tau_1ms", "active_tau_100us"}, {}};
  for (const auto& r : cache::residency_sweep(residencies, c.cache)) {
    t.add({r.residency_s, r.parked_1fj, r.parked_100fj, r.active_1ms, r.active_100us});
  }
  a.tables.push_back(std::move(t));

  auto p1 = c.cache, p100 = c.cache, fast = c.cache;
  p1.e_write_fcdc_J = 1e-15;
  p100.e_write_fcdc_J = 1e-13;
  fast.refresh_period_s = 1e-4;
  const double keep = 28 * 3600.0;
  Table x{"crossover", {"e_write_fcdc_J", "crossover_s"}, {}};
  x.add({p1.e_write_fcdc_J, cache::parked_advantage(0, p1).crossover_time_s});
  x.add({p100.e_write_fcdc_J, cache::parked_advantage(0, p100).crossover_time_s});
  a.tables.push_back(std::move(x));
  a.checks.push_back(rel(n, "parked advantage, 100 fJ, 28 h", 5.04e7, cache::parked_advantage(keep, p100).ratio,
                         kTolCache));
  a.checks.push_back(rel(n, "parked advantage, 1 fJ, 28 h", 5.04e9, cache::parked_advantage(keep, p1).ratio,
                         kTolCache));
  a.checks.push_back(rel(n, "active advantage, tau=1 ms", 9.5, cache::active_advantage(1.0, c.cache), kTolCache));
  a.checks.push_back(rel(n, "active advantage, tau=0.1 ms", 85.7, cache::active_advantage(1.0, fast), kTolCache));
  a.parameters["e_read_event_J"] = c.cache.e_read_event_J;
  a.parameters["read_interval_s"] = 1.0;
  return a;
}

inline std::size_t workload_index(const std::vector<serving::Workload>& ws, std::string_view name) {
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (ws[i].name == name) return i;
  }
  throw ConfigError("workload fixture lacks '" + std::string(name) + "'");
}

inline Artifact build_table3(const config::WorkbenchConfig& c, const config::ServingInputs& in) {
  Artifact a{"table3", {}, {}, {}};
  const std::string n = a.name;
  const auto sub = serving::fcdc_substrate(tile::DacVariant::vdac, c.fcdc_idle_power_W);
  Table t{"table3", {"workload", "T", "T_keep_s", "n_decode", "gpu_J", "hybrid_J", "speedup"}, {}};
  for (const auto& w : in.workloads) {
    const double g = serving::gpu_g0_energy(w, in.gpu);
    const double h = serving::hybrid_energy(w, sub, c.serving, in.gpu);
    t.add({w.name, static_cast<std::int64_t>(w.context_tokens), w.residency_s, w.n_decode, g, h, g / h});
  }
  a.tables.push_back(std::move(t));

  Table d{"n_decode_derivation", {"workload", "published_gpu_J", "E_dec_J", "derived_n_decode", "fixture_n_decode"},
          {}};
  for (std::size_t i = 0; i < published::kWorkloads.size(); ++i) {
    const auto& w = in.workloads[workload_index(in.workloads, published::kWorkloads[i])];
    const double e = in.gpu.decode_energy(w.context_tokens);
    d.add({w.name, published::kGpuJ[i], e,
           std::round(serving::derive_n_decode(w.residency_s, published::kGpuJ[i], e, in.gpu.idle_power_W)),
           w.n_decode});
    const double g = serving::gpu_g0_energy(w, in.gpu);
    const double h = serving::hybrid_energy(w, sub, c.serving, in.gpu);
    a.checks.push_back(rel(n, "GPU J, " + w.name, published::kGpuJ[i], g, kTolTable3));
    a.checks.push_back(rel(n, "hybrid J, " + w.name, published::kHybridJ[i], h, kTolTable3));
    a.checks.push_back(rel(n, "speedup, " + w.name, published::kG0[i], g / h, kTolSpeedup));
  }
  a.tables.push_back(std::move(d));
  a.parameters["alpha"] = c.serving.alpha;
  a.parameters["c_serve_J"] = c.serving.c_serve_J;
  a.parameters["fcdc_idle_W"] = c.fcdc_idle_power_W;
  return a;
}

inline Table ratio_grid_table(std::string name, const serving::RatioGrid& g) {
  Table t{std::move(name), {"workload", "hybrid_J"}, {}};
  for (auto s : g.strategies) t.columns.push_back(std::string(serving::to_string(s)));
  for (auto s : g.strategies) t.columns.push_back(std::string(serving::to_string(s)) + "_J");
  for (std::size_t i = 0; i < g.workloads.size(); ++i) {
    std::vector<Cell> row{g.workloads[i], g.hybrid_J[i]};
    for (double r : g.ratio[i]) row.emplace_back(r);
    for (double e : g.baseline_J[i]) row.emplace_back(e);
    t.add(std::move(row));
  }
  return t;
}

inline Artifact build_table4(const config::WorkbenchConfig& c, const config::ServingInputs& in) {
  Artifact a{"table4", {}, {}, {}};
  const std::string n = a.name;
  const auto sub = serving::fcdc_substrate(tile::DacVariant::vdac, c.fcdc_idle_power_W);
  const auto g = serving::ratio_table(in.workloads, sub, c.serving, in.gpu);
  a.tables.push_back(ratio_grid_table("table4", g));
  const std::array<std::pair<serving::Strategy, const std::array<double, 5>*>, 4> cols{
      {{serving::Strategy::G0, &published::kG0},
       {serving::Strategy::G1, &published::kG1},
       {serving::Strategy::G2, &published::kG2},
       {serving::Strategy::G3, &published::kG3}}};
  for (auto [s, pub] : cols) {
    const double tol = s == serving::Strategy::G0   ? kTolSpeedup
                       : s == serving::Strategy::G1 ? kTolG1
                                                    : kTolG23;
    for (std::size_t i = 0; i < published::kWorkloads.size(); ++i) {
      a.checks.push_back(rel(n, fmt::format("{} ratio, {}", serving::to_string(s), published::kWorkloads[i]),
                             (*pub)[i], g.at(published::kWorkloads[i], s), tol));
    }
  }
  const auto& s = c.serving;
  a.parameters["batch"] = s.batch;
  a.parameters["gate_power_W"] = s.gate_power_W;
  a.parameters["host_park_power_W"] = s.host_park_power_W;
  a.parameters["wake_time_s"] = s.wake_time_s;
  a.parameters["wake_power_W"] = s.wake_power_W;
  a.parameters["nvme_bandwidth_Bps"] = s.nvme_bandwidth_Bps;
  a.parameters["reload_power_W"] = s.reload_power_W;
  a.parameters["overhead_in_parked_baselines"] = s.overhead_in_parked_baselines;
  return a;
}

inline Artifact build_comparators(const config::WorkbenchConfig& c, const config::ServingInputs& in) {
  Artifact a{"comparators", {}, {}, {}};
  const std::string n = a.name;
  Table m{"active_mac", {"name", "normalization", "native_bits", "native_fJ_per_MAC", "bits", "fJ_per_MAC"}, {}};
  for (int bits : {1, 4, 8}) {
    for (const auto& e : tile::comparator_table(bits)) {
      const char* norm = e.normalization == tile::Normalization::one_bit ? "1b-normalized"
                         : e.normalization == tile::Normalization::native ? "native"
                                                                           : "projected";
      m.add({e.name, std::string(norm), static_cast<std::int64_t>(e.native_bits), e.native_fj_per_mac,
             static_cast<std::int64_t>(bits), e.fj_per_mac});
    }
  }
  a.tables.push_back(std::move(m));
  const auto four = tile::comparator_table(4);
  a.checks.push_back(rel(n, "SC-SRAM 28 nm at 4 b (fJ/MAC)", 2.7, four[2].fj_per_mac, kTolComparatorBits));
  a.checks.push_back(rel(n, "SC-SRAM differential at 4 b (fJ/MAC)", 1.9, four[3].fj_per_mac, kTolComparatorBits));

  const auto subs = serving::comparator_substrates(c.fcdc_idle_power_W);
  const auto g = serving::comparator_ratios(in.workloads, subs, c.serving, in.gpu);
  Table w{"workload_comparators", {"workload"}, {}};
  for (const auto& s : g.substrates) w.columns.push_back(s);
  for (std::size_t j = 0; j < g.workloads.size(); ++j) {
    std::vector<Cell> row{g.workloads[j]};
    for (std::size_t i = 0; i < g.substrates.size(); ++i) row.emplace_back(g.ratio[i][j]);
    w.add(std::move(row));
  }
  a.tables.push_back(std::move(w));
  const std::array<const std::array<double, 5>*, 3> pub{&published::kUnicaim, &published::kXformer,
                                                        &published::kFcdcPwm};
  for (std::size_t i = 0; i < subs.size(); ++i) {
    for (std::size_t k = 0; k < published::kWorkloads.size(); ++k) {
      a.checks.push_back(rel(n, fmt::format("{} ratio, {}", subs[i].name, published::kWorkloads[k]), (*pub[i])[k],
                             g.at(subs[i].name, published::kWorkloads[k]), kTolComparator));
    }
  }
  return a;
}

inline Artifact build_sensitivity(const config::WorkbenchConfig& c, const config::ServingInputs& in) {
  Artifact a{"sensitivity", {}, {}, {}};
  const std::string n = a.name;
  const auto rep = serving::sensitivity_sweep(in.workloads, c.serving, in.gpu, c.fcdc_idle_power_W);
  Table t{"sensitivity", {"axis", "value"}, {}};
  for (const auto& w : rep.workloads) t.columns.push_back(w);
  auto emit = [&](const char* axis, const std::vector<serving::SweepPoint>& pts) {
    for (const auto& p : pts) {
      std::vector<Cell> row{std::string(axis), p.value};
      for (double r : p.ratio) row.emplace_back(r);
      t.add(std::move(row));
    }
  };
  emit("alpha", rep.alpha);
  emit("fcdc_idle_W", rep.fcdc_idle);
  emit("kv_write_J", rep.kv_write);
  a.tables.push_back(std::move(t));

  Table b{"sensitivity_bounds", {"workload", "alpha_max_dev", "kv_write_max_dev"}, {}};
  for (std::size_t i = 0; i < rep.workloads.size(); ++i) {
    b.add({rep.workloads[i], serving::SensitivityReport::max_deviation(rep.alpha, rep.nominal, i),
           serving::SensitivityReport::max_deviation(rep.kv_write, rep.nominal, i)});
  }
  a.tables.push_back(std::move(b));

  const auto parked = rep.index_of("parked");
  for (const auto& p : rep.fcdc_idle) {
    if (std::abs(p.value - 0.1) < 1e-12) {
      a.checks.push_back(rel(n, "parked ratio at 0.1 W idle", published::kParkedIdle01, p.ratio[parked],
                             kTolSensitivity));
    }
    if (std::abs(p.value - 0.2) < 1e-12) {
      a.checks.push_back(rel(n, "parked ratio at 0.2 W idle", published::kParkedIdle02, p.ratio[parked],
                             kTolSensitivity));
    }
  }
  return a;
}

inline const std::vector<std::string>& all_targets() {
  static const std::vector<std::string> t{"table2",     "table3", "table4",      "fig3_data",
                                          "fig_thickness_data", "comparators", "sensitivity", "cache"};
  return t;
}

inline Artifact build(std::string_view target, const config::WorkbenchConfig& c) {
  if (target == "table2") return build_table2(c);
  if (target == "fig3_data") return build_fig3(c);
  if (target == "fig_thickness_data") return build_fig_thickness(c);
  if (target == "cache") return build_cache(c);
  const auto in = config::load_serving_inputs(c);
  if (target == "table3") return build_table3(c, in);
  if (target == "table4") return build_table4(c, in);
  if (target == "comparators") return build_comparators(c, in);
  if (target == "sensitivity") return build_sensitivity(c, in);
  throw ConfigError("unknown reproduce target '" + std::string(target) + "'");
}

inline Table summary_table(const std::vector<Check>& checks) {
  Table t{"summary", {"artifact", "quantity", "published", "computed", "deviation", "rule", "status"}, {}};
  for (const auto& k : checks) {
    t.add({k.artifact, k.quantity, k.published, k.computed, k.deviation(), k.rule(),
           std::string(k.pass() ? "PASS" : "FAIL")});
  }
  return t;
}

struct ReproduceResult {
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;

  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& k : checks) f += k.pass() ? 0 : 1;
    return f;
  }
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
}

/// Build `target` ("all" for every artifact), write one file per table plus
/// summary and manifest.json into `out_dir`.
inline ReproduceResult reproduce(std::string_view target, const config::WorkbenchConfig& c,
                                 const std::filesystem::path& out_dir, Format fmt_out) {
  std::vector<std::string> targets;
  if (target == "all") {
    targets = all_targets();
  } else {
    targets.emplace_back(target);
  }
  std::filesystem::create_directories(out_dir);
  ReproduceResult res;
  nlohmann::ordered_json manifest;
  manifest["seed"] = c.seed;
  manifest["format"] = std::string(extension(fmt_out));
  manifest["artifacts"] = nlohmann::ordered_json::object();
  for (const auto& t : targets) {
    auto art = build(t, c);
    nlohmann::ordered_json entry;
    entry["files"] = nlohmann::ordered_json::array();
    for (const auto& tab : art.tables) {
      const auto file = fmt::format("{}.{}", tab.name == art.name ? tab.name : art.name + "_" + tab.name,
                                    extension(fmt_out));
      write_file(out_dir / file, render(tab, fmt_out));
      res.files.push_back(out_dir / file);
      entry["files"].push_back(file);
    }
    entry["parameters"] = art.parameters;
    std::size_t pass = 0;
    for (const auto& k : art.checks) pass += k.pass() ? 1 : 0;
    entry["checks"] = art.checks.size();
    entry["passed"] = pass;
    manifest["artifacts"][art.name] = std::move(entry);
    res.checks.insert(res.checks.end(), art.checks.begin(), art.checks.end());
  }
  const auto summary = fmt::format("summary.{}", extension(fmt_out));
  write_file(out_dir / summary, render(summary_table(res.checks), fmt_out));
  res.files.push_back(out_dir / summary);
  manifest["summary"] = summary;
  manifest["failures"] = res.failures();
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
  res.files.push_back(out_dir / "manifest.json");
  return res;
}

}  // namespace fcdc::report
