#pragma once

// Workbench configuration: YAML with unit-suffixed quantities
// (`read_voltage: 158 mV`), normalised to SI on load. Unknown keys, wrong
// units and out-of-range values are collected with their line numbers and
// reported together as a SchemaError.

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fcdc/analog_kernel.hpp"
#include "fcdc/cache_model.hpp"
#include "fcdc/device_model.hpp"
#include "fcdc/errors.hpp"
#include "fcdc/fixtures.hpp"
#include "fcdc/noise_budget.hpp"
#include "fcdc/serving_sim.hpp"
#include "fcdc/tile_energy.hpp"
#include "fcdc/units.hpp"

namespace fcdc::config {

struct CellConfig {
  device::CellGeometry geometry{};
  double read_voltage_V = 0.158;
  double temperature_K = 300.0;
};

struct NoiseConfig {
  double flicker_amplitude = 10e-6;  // V/rtHz at 1 Hz
  double flicker_f_lo_Hz = 1.0;
  double flicker_f_hi_Hz = 1e9;
  double mismatch = 0.05;  // sigma_C / C
  bool mismatch_correlated = false;
  double correlated_floor_V = 0.0;
  double read_fet_sigma_V = 100e-6;
  double nc_jitter_sigma_V = 0.0;
  double nc_gain_rel_sigma = 0.0;
  std::uint64_t monte_carlo_samples = 100'000;
  unsigned threads = 1;
};

struct KernelConfig {
  kernel::QuantNoiseConfig quant{};
  std::size_t matrix_size = 64;
  int trials = 20;
  kernel::WtaConfig wta{};
  std::size_t wta_tokens = 64;
  std::size_t wta_rows = 1000;
};

struct FixturePaths {
  std::filesystem::path gpu_decode;
  std::filesystem::path workloads;
  std::filesystem::path operating_points;  // empty when given inline
  double gpu_idle_power_W = 70.0;
};

struct WorkbenchConfig {
  std::uint64_t seed = 7;
  std::filesystem::path output_dir = "out";
  CellConfig cell;
  device::DisturbParams disturb{};
  double disturb_target = 3e-13;
  device::NcDesignPoint nc{};
  NoiseConfig noise;
  std::vector<noise::TileOperatingPoint> operating_points;
  tile::TileEnergyConfig tile{};
  cache::CacheParams cache{};
  serving::ServingConfig serving{};
  double fcdc_idle_power_W = serving::kFcdcChipIdleW;
  KernelConfig kernel;
  FixturePaths fixtures;
  std::vector<std::string> warnings;

  /// Disturb parameters with E_eff = V_read / d of the configured cell.
  device::DisturbParams disturb_at_read() const {
    auto d = disturb;
    d.effective_field_V_per_m = cell.read_voltage_V / cell.geometry.hzo_thickness_m;
    return d;
  }

  const noise::TileOperatingPoint& operating_point(noise::OperatingLabel l) const {
    for (const auto& op : operating_points) {
      if (op.label == l) return op;
    }
    throw ConfigError("no '" + std::string(noise::to_string(l)) + "' operating point configured");
  }
};

namespace detail {

using units::Dimension;

class Reader {
public:
  std::vector<ConfigIssue> issues;

  static int line(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

  void issue(const YAML::Node& n, std::string msg) { issues.push_back({line(n), std::move(msg)}); }

  /// Rejects keys outside `allowed`. Returns false if `n` is not a map.
  bool keys(const YAML::Node& n, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (!n.IsMap()) {
      issue(n, fmt::format("{}: expected a mapping", section));
      return false;
    }
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) issue(kv.first, fmt::format("{}: unknown key '{}'", section, key));
    }
    return true;
  }

  void quantity(const YAML::Node& n, const char* key, Dimension d, double& out) {
    const auto v = n[key];
    if (!v) return;
    try {
      if (!v.IsScalar()) throw ConfigError("expected a scalar");
      out = units::parse_as(v.Scalar(), d);
    } catch (const std::exception& e) {
      issue(v, fmt::format("{}: {}", key, e.what()));
    }
  }

  void number(const YAML::Node& n, const char* key, double& out) {
    quantity(n, key, Dimension::dimensionless, out);
  }

  template <class Int>
  void integer(const YAML::Node& n, const char* key, Int& out) {
    const auto v = n[key];
    if (!v) return;
    try {
      const auto x = v.as<long long>();
      if (x < 0) throw ConfigError("must be non-negative");
      out = static_cast<Int>(x);
    } catch (const std::exception& e) {
      issue(v, fmt::format("{}: expected a non-negative integer ({})", key, e.what()));
    }
  }

  void boolean(const YAML::Node& n, const char* key, bool& out) {
    const auto v = n[key];
    if (!v) return;
    try {
      out = v.as<bool>();
    } catch (const std::exception&) {
      issue(v, fmt::format("{}: expected true or false", key));
    }
  }

  void text(const YAML::Node& n, const char* key, std::string& out) {
    const auto v = n[key];
    if (!v) return;
    if (!v.IsScalar()) {
      issue(v, fmt::format("{}: expected a string", key));
      return;
    }
    out = v.Scalar();
  }

  /// Runs a validator and records its exception against `n`.
  template <class F>
  void check(const YAML::Node& n, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      issue(n, e.what());
    }
  }
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace detail

/// Parse YAML text. Relative fixture paths resolve against `base_dir`.
inline WorkbenchConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  using units::Dimension;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw SchemaError({{e.mark.line + 1, e.msg}});
  }
  WorkbenchConfig c;
  detail::Reader r;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!r.keys(root, "config",
              {"seed", "output_dir", "fixtures", "cell", "disturb", "nc", "noise", "operating_points",
               "tile", "attention", "cache", "serving", "kernel"})) {
    throw SchemaError(r.issues);
  }
  r.integer(root, "seed", c.seed);
  std::string out_dir = c.output_dir.string();
  r.text(root, "output_dir", out_dir);
  c.output_dir = out_dir;

  std::string gpu = "gpu_decode_a40.csv", workloads = "workloads.csv", ops = "operating_points.csv";
  bool ops_from_file = true;
  if (auto n = root["fixtures"]; n && r.keys(n, "fixtures", {"gpu_decode", "workloads", "operating_points",
                                                             "gpu_idle_power"})) {
    r.text(n, "gpu_decode", gpu);
    r.text(n, "workloads", workloads);
    r.text(n, "operating_points", ops);
    r.quantity(n, "gpu_idle_power", Dimension::power, c.fixtures.gpu_idle_power_W);
    if (n["operating_points"] && root["operating_points"]) {
      r.issue(n["operating_points"], "fixtures.operating_points: also given inline; keep one");
    }
  }
  c.fixtures.gpu_decode = detail::resolve(base_dir, gpu);
  c.fixtures.workloads = detail::resolve(base_dir, workloads);

  if (auto n = root["cell"]; n && r.keys(n, "cell", {"pitch", "hzo_thickness", "permittivity", "coercive_field",
                                                     "remanent_polarization", "electrode_area",
                                                     "read_voltage", "temperature"})) {
    auto& g = c.cell.geometry;
    r.quantity(n, "pitch", Dimension::length, g.pitch_m);
    g.electrode_area_m2 = g.pitch_m * g.pitch_m;
    r.quantity(n, "electrode_area", Dimension::area, g.electrode_area_m2);
    r.quantity(n, "hzo_thickness", Dimension::length, g.hzo_thickness_m);
    r.number(n, "permittivity", g.permittivity);
    r.quantity(n, "coercive_field", Dimension::field, g.coercive_field_V_per_m);
    r.quantity(n, "remanent_polarization", Dimension::charge_density, g.remanent_polarization_C_per_m2);
    r.quantity(n, "read_voltage", Dimension::voltage, c.cell.read_voltage_V);
    r.quantity(n, "temperature", Dimension::temperature, c.cell.temperature_K);
    r.check(n, [&] {
      for (auto& w : g.validate()) c.warnings.push_back("cell: " + w);
      if (c.cell.temperature_K < 0) throw DomainError("cell: negative temperature");
    });
  }

  if (auto n = root["disturb"]; n && r.keys(n, "disturb", {"pulse_width", "attempt_time", "activation_field",
                                                           "vulnerable_domains", "target_probability"})) {
    r.quantity(n, "pulse_width", Dimension::time, c.disturb.pulse_width_s);
    r.quantity(n, "attempt_time", Dimension::time, c.disturb.attempt_time_s);
    r.quantity(n, "activation_field", Dimension::field, c.disturb.activation_field_V_per_m);
    r.number(n, "vulnerable_domains", c.disturb.vulnerable_domains);
    r.number(n, "target_probability", c.disturb_target);
    r.check(n, [&] {
      c.disturb.validate();
      if (!(c.disturb_target > 0 && c.disturb_target < 1)) {
        throw DomainError("disturb: target probability outside (0, 1)");
      }
    });
  }

  if (auto n = root["nc"]; n && r.keys(n, "nc", {"cap_ratio", "process_shift"})) {
    r.number(n, "cap_ratio", c.nc.cap_ratio);
    r.number(n, "process_shift", c.nc.process_shift);
    r.check(n, [&] { device::nc_gain(c.nc); });
  }

  if (auto n = root["noise"]; n && r.keys(n, "noise", {"flicker_amplitude", "flicker_f_lo", "flicker_f_hi",
                                                       "mismatch", "mismatch_correlated", "correlated_floor",
                                                       "read_fet_sigma", "nc_jitter_sigma",
                                                       "nc_gain_rel_sigma", "monte_carlo_samples",
                                                       "threads"})) {
    auto& z = c.noise;
    r.quantity(n, "flicker_amplitude", Dimension::noise_density, z.flicker_amplitude);
    r.quantity(n, "flicker_f_lo", Dimension::frequency, z.flicker_f_lo_Hz);
    r.quantity(n, "flicker_f_hi", Dimension::frequency, z.flicker_f_hi_Hz);
    r.number(n, "mismatch", z.mismatch);
    r.boolean(n, "mismatch_correlated", z.mismatch_correlated);
    r.quantity(n, "correlated_floor", Dimension::voltage, z.correlated_floor_V);
    r.quantity(n, "read_fet_sigma", Dimension::voltage, z.read_fet_sigma_V);
    r.quantity(n, "nc_jitter_sigma", Dimension::voltage, z.nc_jitter_sigma_V);
    r.number(n, "nc_gain_rel_sigma", z.nc_gain_rel_sigma);
    r.integer(n, "monte_carlo_samples", z.monte_carlo_samples);
    r.integer(n, "threads", z.threads);
    r.check(n, [&] {
      noise::flicker_noise(z.flicker_amplitude, z.flicker_f_lo_Hz, z.flicker_f_hi_Hz);
      noise::mismatch_effective(z.mismatch, 1, noise::MismatchCorrelation::correlated);
      if (z.correlated_floor_V < 0 || z.read_fet_sigma_V < 0 || z.nc_jitter_sigma_V < 0 ||
          z.nc_gain_rel_sigma < 0) {
        throw DomainError("noise: sigmas must be >= 0");
      }
      if (z.monte_carlo_samples < noise::kMinMonteCarloSamples) {
        c.warnings.push_back("noise: fewer than 1e4 Monte-Carlo samples");
      }
    });
  }

  if (auto n = root["operating_points"]) {
    ops_from_file = false;
    if (!n.IsSequence()) {
      r.issue(n, "operating_points: expected a list");
    } else {
      for (const auto& e : n) {
        if (!r.keys(e, "operating_points[]", {"label", "rows", "read_voltage", "integration_cap", "nf"})) continue;
        noise::TileOperatingPoint op;
        std::string label = "nominal";
        r.text(e, "label", label);
        r.integer(e, "rows", op.rows);
        r.quantity(e, "read_voltage", Dimension::voltage, op.read_voltage_V);
        r.quantity(e, "integration_cap", Dimension::capacitance, op.integration_cap_F);
        r.number(e, "nf", op.nf);
        r.check(e, [&] {
          op.label = noise::operating_label_from(label);
          op.validate();
        });
        c.operating_points.push_back(op);
      }
    }
  }

  if (auto n = root["tile"]; n && r.keys(n, "tile", {"rows", "active_cols", "columns", "dac_variant",
                                                     "dac_bits", "adc_bits", "adcs_per_tile",
                                                     "read_voltage"})) {
    auto& t = c.tile;
    r.integer(n, "rows", t.rows);
    r.integer(n, "active_cols", t.active_cols);
    r.integer(n, "columns", t.columns);
    std::string variant(tile::to_string(t.dac_variant));
    r.text(n, "dac_variant", variant);
    r.integer(n, "dac_bits", t.dac_bits);
    r.integer(n, "adc_bits", t.adc_bits);
    r.integer(n, "adcs_per_tile", t.adcs_per_tile);
    r.quantity(n, "read_voltage", Dimension::voltage, t.read_voltage_V);
    r.check(n, [&] {
      t.dac_variant = tile::dac_variant_from(variant);
      t.validate();
    });
  }

  if (auto n = root["attention"]; n && r.keys(n, "attention", {"n_heads", "d_head", "n_kv_heads", "n_layers"})) {
    auto& s = c.serving.shape;
    r.integer(n, "n_heads", s.n_heads);
    r.integer(n, "d_head", s.d_head);
    r.integer(n, "n_kv_heads", s.n_kv_heads);
    r.integer(n, "n_layers", s.n_layers);
    r.check(n, [&] { s.validate(); });
  }

  if (auto n = root["cache"]; n && r.keys(n, "cache", {"e_write_gain_cell", "refresh_period", "e_write_fcdc",
                                                       "e_read_event", "head_dim"})) {
    auto& k = c.cache;
    r.quantity(n, "e_write_gain_cell", Dimension::energy, k.e_write_gain_cell_J);
    r.quantity(n, "refresh_period", Dimension::time, k.refresh_period_s);
    r.quantity(n, "e_write_fcdc", Dimension::energy, k.e_write_fcdc_J);
    r.quantity(n, "e_read_event", Dimension::energy, k.e_read_event_J);
    r.integer(n, "head_dim", k.head_dim);
    r.check(n, [&] {
      for (auto& w : k.validate()) c.warnings.push_back("cache: " + w);
    });
  }

  if (auto n = root["serving"]; n && r.keys(n, "serving", {"alpha", "c_serve", "batch", "gate_power",
                                                           "host_park_power", "wake_time", "wake_power",
                                                           "nvme_bandwidth", "reload_power", "kv_write_energy",
                                                           "overhead_in_parked_baselines",
                                                           "fcdc_idle_power"})) {
    auto& s = c.serving;
    r.number(n, "alpha", s.alpha);
    r.quantity(n, "c_serve", Dimension::energy, s.c_serve_J);
    r.number(n, "batch", s.batch);
    r.quantity(n, "gate_power", Dimension::power, s.gate_power_W);
    r.quantity(n, "host_park_power", Dimension::power, s.host_park_power_W);
    r.quantity(n, "wake_time", Dimension::time, s.wake_time_s);
    r.quantity(n, "wake_power", Dimension::power, s.wake_power_W);
    r.quantity(n, "nvme_bandwidth", Dimension::byte_rate, s.nvme_bandwidth_Bps);
    r.quantity(n, "reload_power", Dimension::power, s.reload_power_W);
    r.quantity(n, "kv_write_energy", Dimension::energy, s.kv_write_energy_J);
    r.boolean(n, "overhead_in_parked_baselines", s.overhead_in_parked_baselines);
    r.quantity(n, "fcdc_idle_power", Dimension::power, c.fcdc_idle_power_W);
    r.check(n, [&] {
      s.validate();
      if (c.fcdc_idle_power_W < 0) throw ConfigError("serving: negative FCDC idle power");
    });
  }

  if (auto n = root["kernel"]; n && r.keys(n, "kernel", {"nf", "dac_bits", "adc_bits", "rescale", "matrix_size",
                                                         "trials", "wta_sigma", "wta_k_eff", "wta_k_ens",
                                                         "wta_tokens", "wta_rows"})) {
    auto& k = c.kernel;
    r.number(n, "nf", k.quant.nf);
    r.integer(n, "dac_bits", k.quant.dac_bits);
    r.integer(n, "adc_bits", k.quant.adc_bits);
    r.boolean(n, "rescale", k.quant.rescale);
    r.integer(n, "matrix_size", k.matrix_size);
    r.integer(n, "trials", k.trials);
    r.number(n, "wta_sigma", k.wta.sigma);
    r.integer(n, "wta_k_eff", k.wta.k_eff);
    r.integer(n, "wta_k_ens", k.wta.k_ens);
    r.integer(n, "wta_tokens", k.wta_tokens);
    r.integer(n, "wta_rows", k.wta_rows);
    r.check(n, [&] {
      k.quant.validate();
      k.wta.validate();
      if (k.matrix_size < 1 || k.matrix_size > 512) throw DomainError("kernel: matrix_size outside [1, 512]");
      if (k.trials < 1 || k.wta_tokens < 1 || k.wta_rows < 1) throw DomainError("kernel: counts must be >= 1");
    });
  }

  if (ops_from_file) {
    c.fixtures.operating_points = detail::resolve(base_dir, ops);
    r.check(root, [&] {
      c.operating_points = fixtures::operating_points_from(fixtures::read_csv(c.fixtures.operating_points));
    });
  }

  if (!r.issues.empty()) throw SchemaError(r.issues);
  c.kernel.quant.seed = c.seed;
  c.kernel.wta.seed = c.seed;
  return c;
}

inline WorkbenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

/// Built-in defaults with fixtures resolved against `data_dir`.
inline WorkbenchConfig default_config(const std::filesystem::path& data_dir) {
  return parse_config("{}", data_dir);
}

namespace detail {

inline std::string q(double v, units::Dimension d) {
  const auto sym = units::si_symbol(d);
  return sym.empty() ? fmt::format("{:.17g}", v) : fmt::format("{:.17g} {}", v, sym);
}

}  // namespace detail

/// Serialise to YAML in SI units with 17 significant digits, so that
/// parse_config(store_config(c)) reproduces every value bit-exactly.
/// Operating points are always written inline; fixture paths are absolute.
inline std::string store_config(const WorkbenchConfig& c) {
  using units::Dimension;
  using detail::q;
  const auto abs = [](const std::filesystem::path& p) { return std::filesystem::absolute(p).string(); };
  std::string s;
  auto line = [&s](std::string_view text) {
    s += text;
    s += '\n';
  };
  line(fmt::format("seed: {}", c.seed));
  line(fmt::format("output_dir: \"{}\"", c.output_dir.string()));
  line("fixtures:");
  line(fmt::format("  gpu_decode: \"{}\"", abs(c.fixtures.gpu_decode)));
  line(fmt::format("  workloads: \"{}\"", abs(c.fixtures.workloads)));
  line(fmt::format("  gpu_idle_power: {}", q(c.fixtures.gpu_idle_power_W, Dimension::power)));
  const auto& g = c.cell.geometry;
  line("cell:");
  line(fmt::format("  pitch: {}", q(g.pitch_m, Dimension::length)));
  line(fmt::format("  electrode_area: {}", q(g.electrode_area_m2, Dimension::area)));
  line(fmt::format("  hzo_thickness: {}", q(g.hzo_thickness_m, Dimension::length)));
  line(fmt::format("  permittivity: {}", q(g.permittivity, Dimension::dimensionless)));
  line(fmt::format("  coercive_field: {}", q(g.coercive_field_V_per_m, Dimension::field)));
  line(fmt::format("  remanent_polarization: {}", q(g.remanent_polarization_C_per_m2, Dimension::charge_density)));
  line(fmt::format("  read_voltage: {}", q(c.cell.read_voltage_V, Dimension::voltage)));
  line(fmt::format("  temperature: {}", q(c.cell.temperature_K, Dimension::temperature)));
  line("disturb:");
  line(fmt::format("  pulse_width: {}", q(c.disturb.pulse_width_s, Dimension::time)));
  line(fmt::format("  attempt_time: {}", q(c.disturb.attempt_time_s, Dimension::time)));
  line(fmt::format("  activation_field: {}", q(c.disturb.activation_field_V_per_m, Dimension::field)));
  line(fmt::format("  vulnerable_domains: {}", q(c.disturb.vulnerable_domains, Dimension::dimensionless)));
  line(fmt::format("  target_probability: {}", q(c.disturb_target, Dimension::dimensionless)));
  line("nc:");
  line(fmt::format("  cap_ratio: {}", q(c.nc.cap_ratio, Dimension::dimensionless)));
  line(fmt::format("  process_shift: {}", q(c.nc.process_shift, Dimension::dimensionless)));
  const auto& z = c.noise;
  line("noise:");
  line(fmt::format("  flicker_amplitude: {}", q(z.flicker_amplitude, Dimension::noise_density)));
  line(fmt::format("  flicker_f_lo: {}", q(z.flicker_f_lo_Hz, Dimension::frequency)));
  line(fmt::format("  flicker_f_hi: {}", q(z.flicker_f_hi_Hz, Dimension::frequency)));
  line(fmt::format("  mismatch: {}", q(z.mismatch, Dimension::dimensionless)));
  line(fmt::format("  mismatch_correlated: {}", z.mismatch_correlated));
  line(fmt::format("  correlated_floor: {}", q(z.correlated_floor_V, Dimension::voltage)));
  line(fmt::format("  read_fet_sigma: {}", q(z.read_fet_sigma_V, Dimension::voltage)));
  line(fmt::format("  nc_jitter_sigma: {}", q(z.nc_jitter_sigma_V, Dimension::voltage)));
  line(fmt::format("  nc_gain_rel_sigma: {}", q(z.nc_gain_rel_sigma, Dimension::dimensionless)));
  line(fmt::format("  monte_carlo_samples: {}", z.monte_carlo_samples));
  line(fmt::format("  threads: {}", z.threads));
  line("operating_points:");
  for (const auto& op : c.operating_points) {
    line(fmt::format("  - label: {}", noise::to_string(op.label)));
    line(fmt::format("    rows: {}", op.rows));
    line(fmt::format("    read_voltage: {}", q(op.read_voltage_V, Dimension::voltage)));
    line(fmt::format("    integration_cap: {}", q(op.integration_cap_F, Dimension::capacitance)));
    line(fmt::format("    nf: {}", q(op.nf, Dimension::dimensionless)));
  }
  const auto& t = c.tile;
  line("tile:");
  line(fmt::format("  rows: {}", t.rows));
  line(fmt::format("  active_cols: {}", t.active_cols));
  line(fmt::format("  columns: {}", t.columns));
  line(fmt::format("  dac_variant: {}", tile::to_string(t.dac_variant)));
  line(fmt::format("  dac_bits: {}", t.dac_bits));
  line(fmt::format("  adc_bits: {}", t.adc_bits));
  line(fmt::format("  adcs_per_tile: {}", t.adcs_per_tile));
  line(fmt::format("  read_voltage: {}", q(t.read_voltage_V, Dimension::voltage)));
  const auto& a = c.serving.shape;
  line("attention:");
  line(fmt::format("  n_heads: {}", a.n_heads));
  line(fmt::format("  d_head: {}", a.d_head));
  line(fmt::format("  n_kv_heads: {}", a.n_kv_heads));
  line(fmt::format("  n_layers: {}", a.n_layers));
  const auto& k = c.cache;
  line("cache:");
  line(fmt::format("  e_write_gain_cell: {}", q(k.e_write_gain_cell_J, Dimension::energy)));
  line(fmt::format("  refresh_period: {}", q(k.refresh_period_s, Dimension::time)));
  line(fmt::format("  e_write_fcdc: {}", q(k.e_write_fcdc_J, Dimension::energy)));
  line(fmt::format("  e_read_event: {}", q(k.e_read_event_J, Dimension::energy)));
  line(fmt::format("  head_dim: {}", k.head_dim));
  const auto& v = c.serving;
  line("serving:");
  line(fmt::format("  alpha: {}", q(v.alpha, Dimension::dimensionless)));
  line(fmt::format("  c_serve: {}", q(v.c_serve_J, Dimension::energy)));
  line(fmt::format("  batch: {}", q(v.batch, Dimension::dimensionless)));
  line(fmt::format("  gate_power: {}", q(v.gate_power_W, Dimension::power)));
  line(fmt::format("  host_park_power: {}", q(v.host_park_power_W, Dimension::power)));
  line(fmt::format("  wake_time: {}", q(v.wake_time_s, Dimension::time)));
  line(fmt::format("  wake_power: {}", q(v.wake_power_W, Dimension::power)));
  line(fmt::format("  nvme_bandwidth: {}", q(v.nvme_bandwidth_Bps, Dimension::byte_rate)));
  line(fmt::format("  reload_power: {}", q(v.reload_power_W, Dimension::power)));
  line(fmt::format("  kv_write_energy: {}", q(v.kv_write_energy_J, Dimension::energy)));
  line(fmt::format("  overhead_in_parked_baselines: {}", v.overhead_in_parked_baselines));
  line(fmt::format("  fcdc_idle_power: {}", q(c.fcdc_idle_power_W, Dimension::power)));
  const auto& kn = c.kernel;
  line("kernel:");
  line(fmt::format("  nf: {}", q(kn.quant.nf, Dimension::dimensionless)));
  line(fmt::format("  dac_bits: {}", kn.quant.dac_bits));
  line(fmt::format("  adc_bits: {}", kn.quant.adc_bits));
  line(fmt::format("  rescale: {}", kn.quant.rescale));
  line(fmt::format("  matrix_size: {}", kn.matrix_size));
  line(fmt::format("  trials: {}", kn.trials));
  line(fmt::format("  wta_sigma: {}", q(kn.wta.sigma, Dimension::dimensionless)));
  line(fmt::format("  wta_k_eff: {}", kn.wta.k_eff));
  line(fmt::format("  wta_k_ens: {}", kn.wta.k_ens));
  line(fmt::format("  wta_tokens: {}", kn.wta_tokens));
  line(fmt::format("  wta_rows: {}", kn.wta_rows));
  return s;
}

/// Workloads and GPU decode table named by the config.
struct ServingInputs {
  std::vector<serving::Workload> workloads;
  serving::GpuFixture gpu;
};

inline ServingInputs load_serving_inputs(const WorkbenchConfig& c) {
  return {fixtures::workloads_from(fixtures::read_csv(c.fixtures.workloads)),
          fixtures::gpu_fixture_from(fixtures::read_csv(c.fixtures.gpu_decode), c.fixtures.gpu_idle_power_W)};
}

}  // namespace fcdc::config
