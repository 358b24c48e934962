#pragma once

namespace fcdc::constants {

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kRoomTemperature = 300.0;        // K

inline constexpr double kNano = 1e-9;
inline constexpr double kFemto = 1e-15;

// 1 MV/cm in V/m
inline constexpr double kMegaVoltPerCm = 1e8;
// 1 uC/cm^2 in C/m^2
inline constexpr double kMicroCoulombPerCm2 = 1e-2;

}  // namespace fcdc::constants
