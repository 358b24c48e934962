#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcdc/config.hpp"
#include "fcdc/fixtures.hpp"
#include "fcdc/report.hpp"
#include "support.hpp"

namespace cfg = fcdc::config;
namespace rp = fcdc::report;
namespace fs = std::filesystem;
using fcdc::test::data_dir;

namespace {

std::vector<fcdc::ConfigIssue> issues_of(const std::string& yaml) {
  try {
    cfg::parse_config(yaml, data_dir());
  } catch (const fcdc::SchemaError& e) {
    return e.issues();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fcdc_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ShippedDefaultLoadsWithoutWarnings) {
  const auto c = cfg::load_config(data_dir() / "default.yaml");
  EXPECT_TRUE(c.warnings.empty());
  EXPECT_EQ(c.seed, 7u);
  EXPECT_DOUBLE_EQ(c.cell.geometry.hzo_thickness_m, 8e-9);
  EXPECT_DOUBLE_EQ(c.cell.geometry.electrode_area_m2, 50e-9 * 50e-9);
  EXPECT_DOUBLE_EQ(c.disturb.activation_field_V_per_m, 9e8);
  EXPECT_DOUBLE_EQ(c.serving.nvme_bandwidth_Bps, 3e9);
  EXPECT_DOUBLE_EQ(c.fcdc_idle_power_W, 0.05);
  ASSERT_EQ(c.operating_points.size(), 3u);
  EXPECT_DOUBLE_EQ(c.operating_point(fcdc::noise::OperatingLabel::aggressive).nf, 0.035);
  EXPECT_DOUBLE_EQ(c.operating_point(fcdc::noise::OperatingLabel::conservative).integration_cap_F, 400e-15);
  EXPECT_EQ(c.kernel.quant.seed, c.seed);
  EXPECT_TRUE(cfg::default_config(data_dir()).warnings.empty());
}

TEST(Config, OutOfRangeNfRejected) {
  const auto issues = issues_of(
      "operating_points:\n"
      "  - {label: nominal, rows: 256, read_voltage: 100 mV, integration_cap: 400 fF, nf: 0.5}\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 2);
  EXPECT_NE(issues[0].message.find("nf"), std::string::npos);
}

TEST(Config, UnknownKeyRejectedWithLine) {
  const auto issues = issues_of("seed: 3\ncell:\n  pitch: 50 nm\n  colour: red\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 4);
  EXPECT_NE(issues[0].message.find("colour"), std::string::npos);
  EXPECT_FALSE(issues_of("frobnicate: 1\n").empty());
}

TEST(Config, UnitMismatchRejectedWithLine) {
  const auto issues = issues_of("cell:\n  pitch: 50 mV\n");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].line, 2);
  EXPECT_NE(issues[0].message.find("unit mismatch"), std::string::npos);
}

TEST(Config, AllIssuesReportedInOnePass) {
  const auto issues = issues_of("cell:\n  pitch: 50 mV\nserving:\n  alpha: 2\nkernel:\n  dac_bits: 17\n");
  ASSERT_EQ(issues.size(), 3u);
  EXPECT_EQ(issues[0].line, 2);
  EXPECT_EQ(issues[1].line, 4);
  EXPECT_EQ(issues[2].line, 6);
}

TEST(Config, MalformedYaml) {
  EXPECT_THROW(cfg::parse_config("cell: [1, 2\n", data_dir()), fcdc::SchemaError);
  EXPECT_THROW(cfg::load_config("/nonexistent/fcdc.yaml"), fcdc::ConfigError);
}

TEST(Config, ThicknessOutsideSweepWarns) {
  const auto c = cfg::parse_config("cell:\n  hzo_thickness: 16 nm\n", data_dir());
  EXPECT_EQ(c.warnings.size(), 1u);
  EXPECT_FALSE(issues_of("cell:\n  hzo_thickness: 30 nm\n").empty());
}

TEST(Config, TenNanometreAnchor) {
  const auto c = cfg::parse_config("cell:\n  hzo_thickness: 10 nm\n", data_dir());
  EXPECT_TRUE(c.warnings.empty());
  const std::vector<double> d{c.cell.geometry.hzo_thickness_m};
  const auto p = fcdc::device::thickness_sweep(d, c.cell.geometry, c.cell.read_voltage_V, c.disturb)[0];
  EXPECT_REL(55.3e-18, p.capacitance_F, 0.01);
  EXPECT_REL(0.158, p.field_ratio, 0.005);
  EXPECT_DOUBLE_EQ(p.read_energy_ratio, 1.0);
  EXPECT_DOUBLE_EQ(p.vktc_ratio, 1.0);
  const auto art = rp::build_fig_thickness(c);
  EXPECT_DOUBLE_EQ(c.disturb_at_read().effective_field_V_per_m, 0.158 / 10e-9);
  EXPECT_FALSE(art.tables.empty());
}

TEST(Config, StoreLoadRoundTripIsBitExact) {
  auto c = cfg::load_config(data_dir() / "default.yaml");
  c.seed = 99;
  c.serving.alpha = 0.1 + 0.2;
  c.cache.e_read_event_J = 1.0 / 3.0 * 1e-11;
  c.noise.mismatch_correlated = true;
  c.kernel.wta.k_eff = 5;
  const auto text = cfg::store_config(c);
  const auto back = cfg::parse_config(text, data_dir());
  EXPECT_EQ(cfg::store_config(back), text);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.serving.alpha, c.serving.alpha);
  EXPECT_EQ(back.cache.e_read_event_J, c.cache.e_read_event_J);
  EXPECT_EQ(back.cell.geometry.remanent_polarization_C_per_m2, c.cell.geometry.remanent_polarization_C_per_m2);
  EXPECT_EQ(back.disturb.attempt_time_s, c.disturb.attempt_time_s);
  EXPECT_TRUE(back.noise.mismatch_correlated);
  EXPECT_EQ(back.kernel.wta.k_eff, 5);
  ASSERT_EQ(back.operating_points.size(), c.operating_points.size());
  for (std::size_t i = 0; i < c.operating_points.size(); ++i) {
    EXPECT_EQ(back.operating_points[i].integration_cap_F, c.operating_points[i].integration_cap_F);
    EXPECT_EQ(back.operating_points[i].nf, c.operating_points[i].nf);
  }
}

TEST(Fixtures, CsvParsing) {
  EXPECT_EQ(fcdc::fixtures::split_csv_line(R"(a, "b,c" ,"say ""hi""")"),
            (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  std::istringstream bad("# comment\nx,y\n1,2\n3\n");
  try {
    fcdc::fixtures::parse_csv(bad, "bad.csv");
    FAIL() << "expected ConfigError";
  } catch (const fcdc::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:4"), std::string::npos);
  }
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(fcdc::fixtures::parse_csv(empty, "e.csv"), fcdc::ConfigError);
  std::istringstream wl("name,T,T_keep,n_decode,description\nchat,8192,30 V,100,x\n");
  EXPECT_THROW(fcdc::fixtures::workloads_from(fcdc::fixtures::parse_csv(wl, "w.csv")), fcdc::ConfigError);
}

TEST(Report, CellsAndCsv) {
  rp::Table t{"t", {"name", "x", "n"}, {}};
  t.add({std::string("a,b"), 0.1 + 0.2, std::int64_t{42}});
  EXPECT_EQ(rp::to_csv(t), "name,x,n\n\"a,b\",0.3,42\n");
  EXPECT_THROW(t.add({std::string("short")}), fcdc::DomainError);
  const auto j = rp::to_json_value(t);
  EXPECT_EQ(j[0]["n"], 42);
  EXPECT_EQ(rp::format_from("json"), rp::Format::json);
  EXPECT_THROW(rp::format_from("xml"), fcdc::ConfigError);
}

TEST(Report, CheckRules) {
  rp::Check q{"a", "q", 0.20, 0.1975, rp::Check::Kind::quoted, 0.01, 2};
  EXPECT_TRUE(q.pass());
  EXPECT_FALSE(rp::rel("a", "r", 0.20, 0.1975, 0.01).pass());
  EXPECT_TRUE((rp::Check{"a", "m", 1e-17, 8e-18, rp::Check::Kind::at_most, 0, 0}.pass()));
  EXPECT_FALSE((rp::Check{"a", "m", 1e-17, 2e-17, rp::Check::Kind::at_most, 0, 0}.pass()));
  EXPECT_TRUE((rp::Check{"a", "e", 32, 32, rp::Check::Kind::exact, 0, 0}.pass()));
}

TEST(Report, ReproduceAllIsCleanAndDeterministic) {
  const auto c = cfg::load_config(data_dir() / "default.yaml");
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const auto ra = rp::reproduce("all", c, a, rp::Format::csv);
  const auto rb = rp::reproduce("all", c, b, rp::Format::csv);
  EXPECT_EQ(ra.failures(), 0u);
  for (const auto& k : ra.checks) EXPECT_TRUE(k.pass()) << k.artifact << ": " << k.quantity;
  ASSERT_EQ(ra.files.size(), rb.files.size());
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    EXPECT_EQ(ra.files[i].filename(), rb.files[i].filename());
    EXPECT_EQ(slurp(ra.files[i]), slurp(rb.files[i])) << ra.files[i];
  }
  std::size_t on_disk = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(a)) ++on_disk;
  EXPECT_EQ(on_disk, ra.files.size());
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  std::size_t listed = 2;  // summary and the manifest itself
  for (const auto& [name, art] : manifest["artifacts"].items()) {
    for (const auto& f : art["files"]) {
      EXPECT_TRUE(fs::exists(a / f.get<std::string>())) << f;
      ++listed;
    }
  }
  EXPECT_EQ(listed, ra.files.size());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Report, JsonTargets) {
  const auto c = cfg::default_config(data_dir());
  const auto dir = scratch("repro_json");
  const auto r = rp::reproduce("table4", c, dir, rp::Format::json);
  EXPECT_EQ(r.failures(), 0u);
  const auto t = nlohmann::json::parse(slurp(dir / "table4.json"));
  EXPECT_EQ(t.size(), 5u);
  EXPECT_THROW(rp::reproduce("table9", c, dir, rp::Format::csv), fcdc::ConfigError);
  fs::remove_all(dir);
}
