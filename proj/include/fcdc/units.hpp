#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>

#include "fcdc/errors.hpp"

namespace fcdc::units {

enum class Dimension {
  dimensionless,
  length,
  area,
  time,
  voltage,
  capacitance,
  energy,
  power,
  temperature,
  field,
  charge_density,
  frequency,
  noise_density,  // V/sqrt(Hz)
  byte_rate,
};

inline std::string_view name(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::area: return "area";
    case Dimension::time: return "time";
    case Dimension::voltage: return "voltage";
    case Dimension::capacitance: return "capacitance";
    case Dimension::energy: return "energy";
    case Dimension::power: return "power";
    case Dimension::temperature: return "temperature";
    case Dimension::field: return "field";
    case Dimension::charge_density: return "charge density";
    case Dimension::frequency: return "frequency";
    case Dimension::noise_density: return "noise density";
    case Dimension::byte_rate: return "byte rate";
  }
  return "?";
}

/// Canonical SI unit symbol written back out by the config store.
inline std::string_view si_symbol(Dimension d) {
  switch (d) {
    case Dimension::dimensionless: return "";
    case Dimension::length: return "m";
    case Dimension::area: return "m^2";
    case Dimension::time: return "s";
    case Dimension::voltage: return "V";
    case Dimension::capacitance: return "F";
    case Dimension::energy: return "J";
    case Dimension::power: return "W";
    case Dimension::temperature: return "K";
    case Dimension::field: return "V/m";
    case Dimension::charge_density: return "C/m^2";
    case Dimension::frequency: return "Hz";
    case Dimension::noise_density: return "V/rtHz";
    case Dimension::byte_rate: return "B/s";
  }
  return "";
}

struct Quantity {
  double value = 0.0;  // SI
  Dimension dimension = Dimension::dimensionless;
};

namespace detail {

struct BaseUnit {
  std::string_view symbol;
  Dimension dimension;
  double factor;
  bool prefixable;
  int prefix_power = 1;  // m^2 takes the prefix squared
};

inline constexpr std::array kBaseUnits = {
    BaseUnit{"C/cm^2", Dimension::charge_density, 1e4, true},
    BaseUnit{"C/m^2", Dimension::charge_density, 1.0, true},
    BaseUnit{"V/rtHz", Dimension::noise_density, 1.0, true},
    BaseUnit{"V/cm", Dimension::field, 1e2, true},
    BaseUnit{"V/m", Dimension::field, 1.0, true},
    BaseUnit{"m^2", Dimension::area, 1.0, true, 2},
    BaseUnit{"B/s", Dimension::byte_rate, 1.0, true},
    BaseUnit{"min", Dimension::time, 60.0, false},
    BaseUnit{"Hz", Dimension::frequency, 1.0, true},
    BaseUnit{"m", Dimension::length, 1.0, true},
    BaseUnit{"s", Dimension::time, 1.0, true},
    BaseUnit{"h", Dimension::time, 3600.0, false},
    BaseUnit{"V", Dimension::voltage, 1.0, true},
    BaseUnit{"F", Dimension::capacitance, 1.0, true},
    BaseUnit{"J", Dimension::energy, 1.0, true},
    BaseUnit{"W", Dimension::power, 1.0, true},
    BaseUnit{"K", Dimension::temperature, 1.0, false},
    BaseUnit{"%", Dimension::dimensionless, 1e-2, false},
};

inline std::optional<double> prefix_factor(std::string_view p) {
  if (p.empty()) return 1.0;
  if (p == "a") return 1e-18;
  if (p == "f") return 1e-15;
  if (p == "p") return 1e-12;
  if (p == "n") return 1e-9;
  if (p == "u" || p == "µ") return 1e-6;
  if (p == "m") return 1e-3;
  if (p == "c") return 1e-2;
  if (p == "k") return 1e3;
  if (p == "M") return 1e6;
  if (p == "G") return 1e9;
  if (p == "T") return 1e12;
  return std::nullopt;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Resolve a unit symbol such as "mV", "MV/cm", "uC/cm^2" or "GB/s".
inline std::optional<Quantity> parse_unit(std::string_view unit) {
  for (const auto& b : detail::kBaseUnits) {
    if (unit == b.symbol) return Quantity{b.factor, b.dimension};
  }
  for (const auto& b : detail::kBaseUnits) {
    if (!b.prefixable || unit.size() <= b.symbol.size() || !unit.ends_with(b.symbol)) continue;
    if (auto f = detail::prefix_factor(unit.substr(0, unit.size() - b.symbol.size()))) {
      const double scale = b.prefix_power == 2 ? *f * *f : *f;
      return Quantity{scale * b.factor, b.dimension};
    }
  }
  return std::nullopt;
}

/// Parse "158 mV" style text into an SI quantity. A bare number is
/// dimensionless.
inline Quantity parse_quantity(std::string_view text) {
  text = detail::trim(text);
  double number = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec != std::errc{}) throw ConfigError("not a number: '" + std::string(text) + "'");
  auto unit = detail::trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr)));
  if (unit.empty()) return {number, Dimension::dimensionless};
  auto u = parse_unit(unit);
  if (!u) throw ConfigError("unknown unit '" + std::string(unit) + "'");
  return {number * u->value, u->dimension};
}

/// Parse and require a dimension; bare numbers are accepted only for
/// dimensionless quantities.
inline double parse_as(std::string_view text, Dimension expected) {
  const auto q = parse_quantity(text);
  if (q.dimension != expected) {
    throw ConfigError("unit mismatch: '" + std::string(detail::trim(text)) + "' is " +
                      std::string(name(q.dimension)) + ", expected " + std::string(name(expected)));
  }
  return q.value;
}

}  // namespace fcdc::units
