#pragma once

// CSV fixture readers. Fixtures hold measured or published numbers that
// are loaded verbatim: GPU decode energies, the calibrated tile operating
// points and the canonical serving workloads. Lines starting with '#' are
// comments; the first non-comment line is the header.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "fcdc/errors.hpp"
#include "fcdc/noise_budget.hpp"
#include "fcdc/serving_sim.hpp"
#include "fcdc/units.hpp"

namespace fcdc::fixtures {

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;  // source line of each row

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError(source + ": missing column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::string(units::detail::trim(cell)));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(std::string(units::detail::trim(cell)));
  return out;
}

inline CsvTable parse_csv(std::istream& in, std::string source) {
  CsvTable t;
  t.source = std::move(source);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = units::detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto cells = split_csv_line(trimmed);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ConfigError(t.source + ":" + std::to_string(n) + ": expected " +
                        std::to_string(t.header.size()) + " fields, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(n);
  }
  if (t.header.empty()) throw ConfigError(t.source + ": empty CSV");
  return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture '" + path.string() + "'");
  return parse_csv(in, path.string());
}

namespace detail {

inline double number(const CsvTable& t, std::size_t row, std::string_view col) {
  const auto& s = t.rows[row][t.column(col)];
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError(t.source + ":" + std::to_string(t.lines[row]) + ": column " + std::string(col) +
                      " is not a number: '" + s + "'");
  }
  return v;
}

inline std::uint64_t count(const CsvTable& t, std::size_t row, std::string_view col) {
  const double v = number(t, row, col);
  if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) {
    throw ConfigError(t.source + ":" + std::to_string(t.lines[row]) + ": column " + std::string(col) +
                      " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

inline double quantity(const CsvTable& t, std::size_t row, std::string_view col, units::Dimension d) {
  try {
    return units::parse_as(t.rows[row][t.column(col)], d);
  } catch (const ConfigError& e) {
    throw ConfigError(t.source + ":" + std::to_string(t.lines[row]) + ": " + e.what());
  }
}

}  // namespace detail

/// precision,T,J_per_token,tokens_per_s,avg_W
inline serving::GpuFixture gpu_fixture_from(const CsvTable& t, double idle_power_W) {
  serving::GpuFixture fx;
  fx.idle_power_W = idle_power_W;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    fx.rows.push_back({t.rows[i][t.column("precision")], detail::count(t, i, "T"),
                       detail::number(t, i, "J_per_token"), detail::number(t, i, "tokens_per_s"),
                       detail::number(t, i, "avg_W")});
  }
  fx.validate();
  return fx;
}

/// name,T,T_keep,n_decode,description (T_keep carries units)
inline std::vector<serving::Workload> workloads_from(const CsvTable& t) {
  std::vector<serving::Workload> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    serving::Workload w{t.rows[i][t.column("name")], detail::count(t, i, "T"),
                        detail::quantity(t, i, "T_keep", units::Dimension::time),
                        detail::number(t, i, "n_decode"), t.rows[i][t.column("description")]};
    w.validate();
    out.push_back(std::move(w));
  }
  if (out.empty()) throw ConfigError(t.source + ": no workloads");
  return out;
}

/// label,N_rows,V_read,C_int,nf (V_read and C_int carry units)
inline std::vector<noise::TileOperatingPoint> operating_points_from(const CsvTable& t) {
  std::vector<noise::TileOperatingPoint> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    noise::TileOperatingPoint op;
    op.label = noise::operating_label_from(t.rows[i][t.column("label")]);
    op.rows = static_cast<int>(detail::count(t, i, "N_rows"));
    op.read_voltage_V = detail::quantity(t, i, "V_read", units::Dimension::voltage);
    op.integration_cap_F = detail::quantity(t, i, "C_int", units::Dimension::capacitance);
    op.nf = detail::number(t, i, "nf");
    try {
      op.validate();
    } catch (const DomainError& e) {
      throw ConfigError(t.source + ":" + std::to_string(t.lines[i]) + ": " + e.what());
    }
    out.push_back(op);
  }
  return out;
}

}  // namespace fcdc::fixtures
