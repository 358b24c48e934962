// fcdc-workbench: command-line front end for the FCDC models.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 a published
// value missed its tolerance in `reproduce`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "fcdc/fcdc.hpp"

#ifndef FCDC_DATA_DIR
#define FCDC_DATA_DIR "data"
#endif

namespace {

using fcdc::report::Cell;
using fcdc::report::Table;
namespace fs = std::filesystem;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
};

fcdc::config::WorkbenchConfig load(const Globals& g) {
  auto c = g.config_path.empty() ? fcdc::config::default_config(FCDC_DATA_DIR)
                                 : fcdc::config::load_config(g.config_path);
  if (g.seed) {
    c.seed = *g.seed;
    c.kernel.quant.seed = *g.seed;
    c.kernel.wta.seed = *g.seed;
  }
  if (!g.out_dir.empty()) c.output_dir = g.out_dir;
  for (const auto& w : c.warnings) std::cerr << "warning: " << w << "\n";
  return c;
}

/// Tables go to files in --out when given, otherwise to stdout.
void emit(const Globals& g, const std::string& prefix, const std::vector<Table>& tables) {
  const auto f = fcdc::report::format_from(g.format);
  if (!g.out_dir.empty()) {
    fs::create_directories(g.out_dir);
    for (const auto& t : tables) {
      const auto name = t.name == prefix ? t.name : prefix + "_" + t.name;
      const auto path = fs::path(g.out_dir) / fmt::format("{}.{}", name, fcdc::report::extension(f));
      fcdc::report::write_file(path, fcdc::report::render(t, f));
      std::cout << path.string() << "\n";
    }
    return;
  }
  if (f == fcdc::report::Format::json) {
    nlohmann::ordered_json o;
    for (const auto& t : tables) o[t.name] = fcdc::report::to_json_value(t);
    std::cout << o.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) std::cout << "\n";
    std::cout << "# " << tables[i].name << "\n" << fcdc::report::to_csv(tables[i]);
  }
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto t = fcdc::units::detail::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<double> parse_values(const std::string& s, fcdc::units::Dimension d) {
  std::vector<double> out;
  for (const auto& v : split(s)) out.push_back(fcdc::units::parse_as(v, d));
  if (out.empty()) throw fcdc::ConfigError("empty value list");
  return out;
}

std::vector<Table> device_tables(const fcdc::config::WorkbenchConfig& c, const std::vector<double>& thicknesses) {
  using namespace fcdc;
  const auto& g = c.cell.geometry;
  const double c0 = device::cell_capacitance(g);
  const auto dp = c.disturb_at_read();
  const auto nc = device::nc_gain(c.nc);
  Table cell{"cell", {"quantity", "value", "unit"}, {}};
  cell.add({std::string("C0"), c0, std::string("F")});
  cell.add({std::string("E_read_half_CV2"), device::intrinsic_read_energy(c0, c.cell.read_voltage_V),
            std::string("J")});
  cell.add({std::string("E_read_supply_CV2"),
            device::intrinsic_read_energy(c0, c.cell.read_voltage_V, device::ReadAccounting::supply_cv2),
            std::string("J")});
  cell.add({std::string("E_rd_over_E_c"),
            device::read_field_ratio(c.cell.read_voltage_V, g.hzo_thickness_m, g.coercive_field_V_per_m),
            std::string("")});
  cell.add({std::string("E_eff"), dp.effective_field_V_per_m, std::string("V/m")});
  cell.add({std::string("p_flip_bound"), device::disturb_probability(dp), std::string("")});
  cell.add({std::string("required_activation_field"), device::required_activation_field(c.disturb_target, dp),
            std::string("V/m")});
  cell.add({std::string("nc_gain"), nc.magnitude, std::string("")});
  cell.add({std::string("nc_boundary_crossed"), static_cast<std::int64_t>(nc.boundary_crossed), std::string("")});
  cell.add({std::string("switching_work_1V2"), device::switching_work(1.2, g), std::string("J")});

  Table sweep{"thickness", {"thickness_m", "C0_F", "E_read_J", "C0_vs_10nm", "E_read_vs_10nm", "vktc_vs_10nm",
                            "Erd_over_Ec", "p_flip"},
              {}};
  for (const auto& p : device::thickness_sweep(thicknesses, g, c.cell.read_voltage_V, c.disturb)) {
    sweep.add({p.thickness_m, p.capacitance_F, p.read_energy_J, p.capacitance_ratio, p.read_energy_ratio,
               p.vktc_ratio, p.field_ratio, p.flip_probability});
  }
  return {cell, sweep};
}

std::vector<Table> serve_tables(const fcdc::config::WorkbenchConfig& c, const std::vector<std::string>& workload_names,
                                const std::vector<std::string>& strategy_names,
                                const std::vector<std::string>& substrate_names, bool sensitivity) {
  using namespace fcdc;
  auto in = config::load_serving_inputs(c);
  if (!workload_names.empty()) {
    std::vector<serving::Workload> picked;
    for (const auto& n : workload_names) picked.push_back(in.workloads[report::workload_index(in.workloads, n)]);
    in.workloads = std::move(picked);
  }
  std::vector<serving::Strategy> strategies;
  for (const auto& s : strategy_names) strategies.push_back(serving::strategy_from(s));
  if (strategies.empty()) strategies.assign(std::begin(serving::kAllStrategies), std::end(serving::kAllStrategies));

  std::vector<serving::SubstrateModel> subs;
  for (const auto& s : substrate_names) {
    if (s == "fcdc-vdac") subs.push_back(serving::fcdc_substrate(tile::DacVariant::vdac, c.fcdc_idle_power_W));
    else if (s == "fcdc-pwm") subs.push_back(serving::fcdc_substrate(tile::DacVariant::pwm, c.fcdc_idle_power_W));
    else if (s == "unicaim") subs.push_back(serving::unicaim_like(c.fcdc_idle_power_W));
    else if (s == "xformer") subs.push_back(serving::xformer_like());
    else if (s == "gain-cell") subs.push_back(serving::gain_cell_like(c.cache));
    else throw ConfigError("unknown substrate '" + s + "'");
  }
  if (subs.empty()) subs = serving::comparator_substrates(c.fcdc_idle_power_W);

  std::vector<Table> out;
  const auto vdac = serving::fcdc_substrate(tile::DacVariant::vdac, c.fcdc_idle_power_W);
  Table t3{"table3", {"workload", "T", "T_keep_s", "n_decode", "gpu_J", "hybrid_J", "speedup"}, {}};
  for (const auto& w : in.workloads) {
    const double g = serving::gpu_g0_energy(w, in.gpu);
    const double h = serving::hybrid_energy(w, vdac, c.serving, in.gpu);
    t3.add({w.name, static_cast<std::int64_t>(w.context_tokens), w.residency_s, w.n_decode, g, h, g / h});
  }
  out.push_back(std::move(t3));
  out.push_back(report::ratio_grid_table("table4", serving::ratio_table(in.workloads, vdac, c.serving, in.gpu,
                                                                           strategies)));
  const auto g = serving::comparator_ratios(in.workloads, subs, c.serving, in.gpu);
  Table cmp{"substrates", {"workload"}, {}};
  for (const auto& s : g.substrates) cmp.columns.push_back(s);
  for (std::size_t j = 0; j < g.workloads.size(); ++j) {
    std::vector<Cell> row{g.workloads[j]};
    for (std::size_t i = 0; i < g.substrates.size(); ++i) row.emplace_back(g.ratio[i][j]);
    cmp.add(std::move(row));
  }
  out.push_back(std::move(cmp));
  if (sensitivity) {
    auto art = report::build_sensitivity(c, in);
    for (auto& t : art.tables) out.push_back(std::move(t));
  }
  return out;
}

std::vector<Table> kernel_tables(const fcdc::config::WorkbenchConfig& c, const std::vector<double>& nfs,
                                 const std::vector<double>& k_effs, const std::vector<double>& k_enss) {
  using namespace fcdc;
  Table e{"error_vs_nf", {"nf", "normalized_mse", "relative_frobenius"}, {}};
  for (const auto& p : kernel::error_vs_nf(nfs, c.kernel.matrix_size, c.kernel.trials, c.seed,
                                           c.kernel.quant.adc_bits)) {
    e.add({p.nf, p.mean_squared_error, p.relative_frobenius});
  }
  Table tv{"tv_vs_k", {"sigma", "K_eff", "K_ens", "mean_tv", "energy_reduction"}, {}};
  for (double ke : k_effs) {
    for (double kn : k_enss) {
      auto w = c.kernel.wta;
      w.k_eff = static_cast<int>(ke);
      w.k_ens = static_cast<int>(kn);
      tv.add({w.sigma, static_cast<std::int64_t>(w.k_eff), static_cast<std::int64_t>(w.k_ens),
              kernel::wta_mean_tv(c.kernel.wta_tokens, c.kernel.wta_rows, w),
              kernel::wta_energy_reduction(c.kernel.wta_tokens, w)});
    }
  }
  return {e, tv};
}

/// One-axis sweep of a config parameter; each point reports the quantities
/// that depend on it.
std::vector<Table> sweep_tables(const fcdc::config::WorkbenchConfig& base, const std::string& axis,
                                const std::string& values) {
  using namespace fcdc;
  using units::Dimension;
  if (axis == "thickness") {
    return {device_tables(base, parse_values(values, Dimension::length))[1]};
  }
  if (axis == "read-voltage") {
    Table t{"sweep_read_voltage", {"read_voltage_V", "vdac_fJ_per_MAC", "pwm_fJ_per_MAC", "E_read_J", "Erd_over_Ec"},
            {}};
    for (double v : parse_values(values, Dimension::voltage)) {
      auto tc = base.tile;
      tc.read_voltage_V = v;
      tc.dac_variant = tile::DacVariant::vdac;
      const double vd = tile::tile_read_energy(tc).per_mac_J;
      tc.dac_variant = tile::DacVariant::pwm;
      const double pw = tile::tile_read_energy(tc).per_mac_J;
      const auto& g = base.cell.geometry;
      t.add({v, vd / 1e-15, pw / 1e-15, device::intrinsic_read_energy(device::cell_capacitance(g), v),
             device::read_field_ratio(v, g.hzo_thickness_m, g.coercive_field_V_per_m)});
    }
    return {t};
  }
  if (axis == "residency") {
    Table t{"sweep_residency", {"residency_s", "parked_1fJ", "parked_100fJ", "active_tau_1ms", "active_tau_100us"},
            {}};
    for (const auto& r : cache::residency_sweep(parse_values(values, Dimension::time), base.cache)) {
      t.add({r.residency_s, r.parked_1fj, r.parked_100fj, r.active_1ms, r.active_100us});
    }
    return {t};
  }
  if (axis == "nf") {
    Table t{"sweep_nf", {"nf", "estimated_nf", "stderr", "normalized_mse"}, {}};
    const auto nfs = parse_values(values, Dimension::dimensionless);
    const auto curve = kernel::error_vs_nf(nfs, base.kernel.matrix_size, base.kernel.trials, base.seed,
                                           base.kernel.quant.adc_bits);
    const auto op = base.operating_point(noise::OperatingLabel::nominal);
    const double c0 = device::cell_capacitance(base.cell.geometry);
    for (std::size_t i = 0; i < nfs.size(); ++i) {
      const auto mc = noise::monte_carlo_nf(op, nfs[i], c0, base.noise.monte_carlo_samples, base.seed,
                                            base.noise.threads);
      t.add({nfs[i], mc.estimated_nf, mc.standard_error, curve[i].mean_squared_error});
    }
    return {t};
  }
  // Serving axes.
  const auto in = config::load_serving_inputs(base);
  Table t{"sweep_" + axis, {"value"}, {}};
  for (const auto& w : in.workloads) t.columns.push_back(w.name);
  auto row = [&](double value, const serving::ServingConfig& s, double idle) {
    const auto sub = serving::fcdc_substrate(tile::DacVariant::vdac, idle);
    std::vector<Cell> r{value};
    for (const auto& w : in.workloads) r.emplace_back(serving::gpu_g0_energy(w, in.gpu) /
                                                      serving::hybrid_energy(w, sub, s, in.gpu));
    t.add(std::move(r));
  };
  if (axis == "alpha") {
    for (double a : parse_values(values, Dimension::dimensionless)) {
      auto s = base.serving;
      s.alpha = a;
      s.validate();
      row(a, s, base.fcdc_idle_power_W);
    }
  } else if (axis == "fcdc-idle") {
    for (double p : parse_values(values, Dimension::power)) row(p, base.serving, p);
  } else if (axis == "kv-write") {
    for (double e : parse_values(values, Dimension::energy)) {
      auto s = base.serving;
      s.kv_write_energy_J = e;
      row(e, s, base.fcdc_idle_power_W);
    }
  } else if (axis == "c-serve") {
    for (double e : parse_values(values, Dimension::energy)) {
      auto s = base.serving;
      s.c_serve_J = e;
      row(e, s, base.fcdc_idle_power_W);
    }
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  return {t};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FCDC workbench: cell, noise, tile, cache, serving and kernel models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "override the configured seed");
  app.add_option("--out", g.out_dir, "output directory (default: stdout, or output_dir for reproduce)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  auto* device_cmd = app.add_subcommand("device", "cell physics, read disturb, NC gain and thickness sweep");
  std::string thicknesses = "6 nm,7 nm,8 nm,9 nm,10 nm,11 nm,12 nm";
  device_cmd->add_option("--thickness", thicknesses, "comma-separated thicknesses with units");

  auto* noise_cmd = app.add_subcommand("noise", "noise components and Monte-Carlo nf per operating point");
  std::optional<std::uint64_t> samples;
  std::optional<unsigned> threads;
  noise_cmd->add_option("--samples", samples, "Monte-Carlo samples per operating point");
  noise_cmd->add_option("--threads", threads, "worker threads (result is thread-count invariant)");

  auto* tile_cmd = app.add_subcommand("tile-energy", "tile read energy, per-token scaling, KV append, comparators");
  std::string contexts = "16,64,256,1024,4096,8192";
  std::string kv_write = "50 fJ";
  int bits = 4;
  tile_cmd->add_option("--contexts", contexts, "comma-separated context lengths");
  tile_cmd->add_option("--kv-write", kv_write, "per-cell KV append write energy");
  tile_cmd->add_option("--bits", bits, "comparator precision (1, 4 or 8)");

  auto* cache_cmd = app.add_subcommand("cache-crossover", "parked and active gain-cell vs FCDC cache energy");
  std::string residencies = "1 us,10 us,100 us,1 ms,10 ms,100 ms,1 s,1 min,1 h,8 h,28 h";
  cache_cmd->add_option("--residency", residencies, "comma-separated residencies with units");

  auto* serve_cmd = app.add_subcommand("serve", "per-served-token energy across workloads and GPU strategies");
  std::string workloads, strategies, substrates;
  bool sensitivity = false;
  serve_cmd->add_option("--workloads", workloads, "subset, e.g. chat,parked");
  serve_cmd->add_option("--strategies", strategies, "subset of G0,G1,G2,G3");
  serve_cmd->add_option("--substrates", substrates, "fcdc-vdac,fcdc-pwm,unicaim,xformer,gain-cell");
  serve_cmd->add_flag("--sensitivity", sensitivity, "add the alpha / idle / KV-write sweeps");

  auto* kernel_cmd = app.add_subcommand("kernel", "noisy matmul error and Mott-WTA softmax curves");
  std::string nfs = "0,0.005,0.009,0.015,0.03,0.035";
  std::string k_effs = "1,2,4,8,16,64";
  std::string k_enss = "1,4,16";
  kernel_cmd->add_option("--nf", nfs, "noise fractions");
  kernel_cmd->add_option("--k-eff", k_effs, "WTA support widths");
  kernel_cmd->add_option("--k-ens", k_enss, "WTA ensemble sizes");

  auto* repro_cmd = app.add_subcommand("reproduce", "regenerate published tables and figure data");
  std::string target = "all";
  repro_cmd->add_option("target", target, "table2|table3|table4|fig3_data|fig_thickness_data|comparators|"
                                          "sensitivity|cache|all");

  auto* sweep_cmd = app.add_subcommand("sweep", "one-axis parameter sweep");
  std::string axis, values;
  sweep_cmd->add_option("--axis", axis, "thickness|read-voltage|residency|nf|alpha|fcdc-idle|kv-write|c-serve")
      ->required();
  sweep_cmd->add_option("--values", values, "comma-separated values with units")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    using fcdc::units::Dimension;
    auto c = load(g);
    if (*device_cmd) {
      emit(g, "device", device_tables(c, parse_values(thicknesses, Dimension::length)));
    } else if (*noise_cmd) {
      if (samples) c.noise.monte_carlo_samples = *samples;
      if (threads) c.noise.threads = *threads;
      auto art = fcdc::report::build_fig3(c);
      emit(g, "noise", art.tables);
      if (c.noise.monte_carlo_samples < fcdc::noise::kMinMonteCarloSamples) {
        std::cerr << "warning: fewer than 1e4 samples: estimate precision not guaranteed\n";
      }
    } else if (*tile_cmd) {
      std::vector<std::uint64_t> ts;
      for (const auto& s : split(contexts)) ts.push_back(std::stoull(s));
      const auto& shape = c.serving.shape;
      Table e{"tile", {"variant", "array_J", "dac_J", "adc_J", "total_J", "fJ_per_MAC"}, {}};
      for (auto v : {fcdc::tile::DacVariant::vdac, fcdc::tile::DacVariant::pwm}) {
        auto tc = c.tile;
        tc.dac_variant = v;
        const auto r = fcdc::tile::tile_read_energy(tc);
        e.add({std::string(fcdc::tile::to_string(v)), r.array_J, r.dac_J, r.adc_J, r.total_J, r.per_mac_J / 1e-15});
      }
      Table pt{"per_token", {"T", "MACs", "fcdc_vdac_J", "fcdc_pwm_J", "a40_analytic_J", "ratio_vdac", "ratio_pwm"},
               {}};
      for (const auto& r : fcdc::tile::per_token_sweep(ts, shape)) {
        pt.add({static_cast<std::int64_t>(r.context_tokens), static_cast<std::int64_t>(r.macs), r.fcdc_vdac_J,
                r.fcdc_pwm_J, r.a40_analytic_J, r.ratio_vdac, r.ratio_pwm});
      }
      const auto kv = fcdc::tile::kv_append_energy(shape, fcdc::units::parse_as(kv_write, Dimension::energy));
      Table k{"kv_append", {"cells_per_token", "energy_J", "fraction_of_attention_T1024"}, {}};
      k.add({static_cast<std::int64_t>(kv.cells_per_token), kv.energy_J, kv.attention_fraction});
      Table m{"comparators", {"name", "native_bits", "native_fJ_per_MAC", "bits", "fJ_per_MAC"}, {}};
      for (const auto& r : fcdc::tile::comparator_table(bits)) {
        m.add({r.name, static_cast<std::int64_t>(r.native_bits), r.native_fj_per_mac, static_cast<std::int64_t>(bits),
               r.fj_per_mac});
      }
      emit(g, "tile_energy", {e, pt, k, m});
    } else if (*cache_cmd) {
      auto art = fcdc::report::build_cache(c);
      art.tables[0].rows.clear();
      for (const auto& r : fcdc::cache::residency_sweep(parse_values(residencies, Dimension::time), c.cache)) {
        art.tables[0].add({r.residency_s, r.parked_1fj, r.parked_100fj, r.active_1ms, r.active_100us});
      }
      emit(g, "cache", art.tables);
    } else if (*serve_cmd) {
      emit(g, "serve", serve_tables(c, split(workloads), split(strategies), split(substrates), sensitivity));
    } else if (*kernel_cmd) {
      emit(g, "kernel", kernel_tables(c, parse_values(nfs, Dimension::dimensionless),
                                      parse_values(k_effs, Dimension::dimensionless),
                                      parse_values(k_enss, Dimension::dimensionless)));
    } else if (*repro_cmd) {
      const auto res = fcdc::report::reproduce(target, c, c.output_dir, fcdc::report::format_from(g.format));
      for (const auto& k : res.checks) {
        std::cout << fmt::format("{} {}: {} published={:.6g} computed={:.6g} ({})\n", k.pass() ? "PASS" : "FAIL",
                                 k.artifact, k.quantity, k.published, k.computed, k.rule());
      }
      std::cout << fmt::format("{} checks, {} failed; outputs in {}\n", res.checks.size(), res.failures(),
                               c.output_dir.string());
      return res.failures() == 0 ? 0 : 2;
    } else if (*sweep_cmd) {
      emit(g, "sweep", sweep_tables(c, axis, values));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
