#pragma once

// Closed-form HZO cell physics: parallel-plate capacitance, read energy,
// read field, Merz/NLS read-disturb bound, negative-capacitance read-path
// gain, switching work and thickness sweeps. All functions are pure.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fcdc/constants.hpp"
#include "fcdc/errors.hpp"

namespace fcdc::device {

/// Storage-capacitor geometry and ferroelectric material parameters (SI).
struct CellGeometry {
  double pitch_m = 50e-9;
  double hzo_thickness_m = 8e-9;
  double permittivity = 25.0;
  double coercive_field_V_per_m = 1.0 * constants::kMegaVoltPerCm;
  double remanent_polarization_C_per_m2 = 25.0 * constants::kMicroCoulombPerCm2;
  double electrode_area_m2 = 50e-9 * 50e-9;

  /// Square electrode of side `pitch`.
  static CellGeometry from_pitch(double pitch, double thickness, double eps_r = 25.0) {
    CellGeometry g;
    g.pitch_m = pitch;
    g.hzo_thickness_m = thickness;
    g.permittivity = eps_r;
    g.electrode_area_m2 = pitch * pitch;
    return g;
  }

  static constexpr double kMinThickness = 4e-9;
  static constexpr double kMaxThickness = 20e-9;
  static constexpr double kSweepLow = 6e-9;
  static constexpr double kSweepHigh = 12e-9;

  /// Throws DomainError on a hard violation; returns soft warnings.
  std::vector<std::string> validate() const {
    if (!(pitch_m > 0) || !(hzo_thickness_m > 0) || !(permittivity > 0) ||
        !(coercive_field_V_per_m > 0) || !(remanent_polarization_C_per_m2 > 0) ||
        !(electrode_area_m2 > 0)) {
      throw DomainError("cell geometry: all parameters must be strictly positive");
    }
    if (hzo_thickness_m < kMinThickness || hzo_thickness_m > kMaxThickness) {
      throw DomainError("cell geometry: HZO thickness outside [4 nm, 20 nm]");
    }
    std::vector<std::string> warnings;
    if (hzo_thickness_m < kSweepLow || hzo_thickness_m > kSweepHigh) {
      warnings.emplace_back("HZO thickness outside the characterised 6-12 nm sweep range");
    }
    return warnings;
  }
};

/// Parallel-plate capacitance eps0 * eps_r * A / d.
inline double cell_capacitance(const CellGeometry& g) {
  if (!(g.hzo_thickness_m > 0)) throw DomainError("cell_capacitance: thickness must be positive");
  return constants::kVacuumPermittivity * g.permittivity * g.electrode_area_m2 / g.hzo_thickness_m;
}

enum class ReadAccounting {
  half_cv2,    // charge-recovering read: 1/2 C V^2
  supply_cv2,  // supply-driven, no recovery: C V^2
};

inline double intrinsic_read_energy(double capacitance_F, double read_voltage_V,
                                    ReadAccounting accounting = ReadAccounting::half_cv2) {
  if (capacitance_F < 0) throw DomainError("intrinsic_read_energy: negative capacitance");
  const double cv2 = capacitance_F * read_voltage_V * read_voltage_V;
  return accounting == ReadAccounting::half_cv2 ? 0.5 * cv2 : cv2;
}

/// Storage-layer read field (V/d) as a fraction of the coercive field.
inline double read_field_ratio(double read_voltage_V, double thickness_m, double coercive_field) {
  if (!(thickness_m > 0) || !(coercive_field > 0)) {
    throw DomainError("read_field_ratio: thickness and coercive field must be positive");
  }
  return (read_voltage_V / thickness_m) / coercive_field;
}

/// Merz/NLS read-disturb parameters, tau(E) = tau_inf * exp(E_a / E).
struct DisturbParams {
  double pulse_width_s = 5e-9;
  double attempt_time_s = 1e-10;
  double activation_field_V_per_m = 9.0 * constants::kMegaVoltPerCm;
  double effective_field_V_per_m = 0.0;
  double vulnerable_domains = 10.0;

  void validate() const {
    if (!(pulse_width_s > 0) || !(attempt_time_s > 0) || !(vulnerable_domains >= 1) ||
        !(effective_field_V_per_m >= 0)) {
      throw DomainError("disturb parameters out of range");
    }
  }

  /// N_dom * tau_rd / tau_inf, the field-free prefactor of the bound.
  double prefactor() const { return vulnerable_domains * pulse_width_s / attempt_time_s; }
};

/// Per-read flip probability bound N_dom (tau_rd / tau_inf) exp(-E_a / E_eff),
/// clamped to 1. Zero field is an infinite barrier.
inline double disturb_probability(const DisturbParams& p) {
  p.validate();
  if (p.effective_field_V_per_m == 0.0) return 0.0;
  const double bound =
      p.prefactor() * std::exp(-p.activation_field_V_per_m / p.effective_field_V_per_m);
  return std::min(1.0, bound);
}

/// Smallest activation field keeping the bound at `p_target`.
/// The activation field stored in `p` is ignored.
inline double required_activation_field(double p_target, const DisturbParams& p) {
  p.validate();
  const double pre = p.prefactor();
  if (!(p_target > 0) || p_target > pre) {
    throw DomainError("required_activation_field: target must lie in (0, N_dom*tau_rd/tau_inf]");
  }
  return p.effective_field_V_per_m * std::log(pre / p_target);
}

/// Series load ratio C_s/|C_FE| plus a signed process shift applied to |C_FE|.
struct NcDesignPoint {
  double cap_ratio = 0.714;
  double process_shift = 0.0;
};

struct NcGain {
  double magnitude = 1.0;
  double shifted_ratio = 0.0;
  /// The shift moved the ratio to the other side of the r = 1 singularity.
  bool boundary_crossed = false;
  bool stable = true;
};

/// Capacitive-divider surrogate |A_v| = r'/|1 - r'| with r' = r / (1 + shift).
///
/// Reproduces the published anchors (0.714 -> 2.5, +/-20 % -> 1.47 / 8.3,
/// 3.5 -> 1.4). The design is stable while the shifted ratio stays on the
/// same side of 1 as the nominal ratio.
inline NcGain nc_gain(const NcDesignPoint& dp) {
  if (!(dp.cap_ratio > 0)) throw DomainError("nc_gain: ratio must be positive");
  if (!(1.0 + dp.process_shift > 0)) throw DomainError("nc_gain: process shift must exceed -100%");
  const double r = dp.cap_ratio / (1.0 + dp.process_shift);
  if (r == 1.0) throw DomainError("nc_gain: ratio sits on the stability boundary (singular gain)");
  NcGain out;
  out.shifted_ratio = r;
  out.magnitude = r / std::abs(1.0 - r);
  out.boundary_crossed = (r > 1.0) != (dp.cap_ratio > 1.0);
  out.stable = !out.boundary_crossed;
  return out;
}

/// Ferroelectric switching work V * 2 P_r * A.
inline double switching_work(double voltage_V, const CellGeometry& g) {
  return voltage_V * 2.0 * g.remanent_polarization_C_per_m2 * g.electrode_area_m2;
}

struct ThicknessPoint {
  double thickness_m;
  double capacitance_F;
  double read_energy_J;
  double capacitance_ratio;  // vs anchor thickness
  double read_energy_ratio;  // vs anchor thickness
  double vktc_ratio;         // sqrt(d / d_anchor)
  double field_ratio;        // E_rd / E_c
  double flip_probability;   // per pulse, no field gain
};

/// Evaluate the cell at each thickness holding everything else fixed.
/// Ratios are relative to `anchor_thickness` (the 10 nm measured stack).
inline std::vector<ThicknessPoint> thickness_sweep(std::span<const double> thicknesses,
                                                   const CellGeometry& base, double read_voltage,
                                                   const DisturbParams& disturb,
                                                   double anchor_thickness = 10e-9) {
  auto at = [&](double d) {
    CellGeometry g = base;
    g.hzo_thickness_m = d;
    return g;
  };
  const double c_anchor = cell_capacitance(at(anchor_thickness));
  const double e_anchor = intrinsic_read_energy(c_anchor, read_voltage);

  std::vector<ThicknessPoint> out;
  out.reserve(thicknesses.size());
  for (double d : thicknesses) {
    if (!(d > 0)) throw DomainError("thickness_sweep: thickness must be positive");
    const auto g = at(d);
    const double c = cell_capacitance(g);
    const double e = intrinsic_read_energy(c, read_voltage);
    DisturbParams dp = disturb;
    dp.effective_field_V_per_m = read_voltage / d;
    out.push_back({d, c, e, c / c_anchor, e / e_anchor, std::sqrt(d / anchor_thickness),
                   read_field_ratio(read_voltage, d, g.coercive_field_V_per_m),
                   disturb_probability(dp)});
  }
  return out;
}

}  // namespace fcdc::device
