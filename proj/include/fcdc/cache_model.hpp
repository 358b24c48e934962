#pragma once

// Volatile gain-cell vs nonvolatile FCDC cache energetics, per cell.
// Per-vector figures multiply every term by head_dim and give identical ratios.

#include <span>
#include <string>
#include <vector>

#include "fcdc/errors.hpp"

namespace fcdc::cache {

struct CacheParams {
  double e_write_gain_cell_J = 5e-14;
  double refresh_period_s = 1e-3;
  double e_write_fcdc_J = 1e-13;
  // Per read event; calibrated so that a 1 s read interval at 1 ms refresh
  // gives the published 9.5x active advantage (see calibrate_read_event).
  double e_read_event_J = 5e-11 / 8.5;
  int head_dim = 64;

  static constexpr double kMinFcdcWrite = 1e-15;
  static constexpr double kMaxFcdcWrite = 1e-13;

  std::vector<std::string> validate() const {
    if (!(e_write_gain_cell_J > 0) || !(refresh_period_s > 0) || !(e_write_fcdc_J > 0) ||
        !(e_read_event_J > 0) || head_dim < 1) {
      throw DomainError("cache params: all values must be positive");
    }
    std::vector<std::string> warnings;
    if (e_write_fcdc_J < kMinFcdcWrite * (1 - 1e-9) || e_write_fcdc_J > kMaxFcdcWrite * (1 + 1e-9)) {
      warnings.emplace_back("FCDC write energy outside the [1 fJ, 100 fJ] sweep");
    }
    return warnings;
  }
};

/// Gain-cell refresh power per stored cell.
inline double refresh_power_per_cell(const CacheParams& p) {
  if (!(p.refresh_period_s > 0)) throw DomainError("refresh period must be positive");
  return p.e_write_gain_cell_J / p.refresh_period_s;
}

struct ParkedAdvantage {
  double ratio;
  double crossover_time_s;  // e_write_fcdc / refresh power
};

/// Parked-cache energy ratio after `residency_s`: the gain cell pays one
/// write plus refresh, the FCDC cell one write.
inline ParkedAdvantage parked_advantage(double residency_s, const CacheParams& p) {
  if (residency_s < 0) throw DomainError("parked_advantage: negative residency");
  const double refresh = refresh_power_per_cell(p);
  return {(refresh * residency_s + p.e_write_gain_cell_J) / p.e_write_fcdc_J,
          p.e_write_fcdc_J / refresh};
}

/// Active-cache ratio when the cell is read once every `read_interval_s`.
inline double active_advantage(double read_interval_s, const CacheParams& p) {
  if (!(read_interval_s > 0)) throw DomainError("active_advantage: read interval must be positive");
  return (refresh_power_per_cell(p) * read_interval_s + p.e_read_event_J) / p.e_read_event_J;
}

/// Read-event energy that makes active_advantage(interval) equal `ratio`.
inline double calibrate_read_event(double ratio, double read_interval_s, const CacheParams& p) {
  if (!(ratio > 1)) throw DomainError("calibrate_read_event: ratio must exceed 1");
  return refresh_power_per_cell(p) * read_interval_s / (ratio - 1.0);
}

struct ResidencyRow {
  double residency_s;
  double parked_1fj;
  double parked_100fj;
  double active_1ms;
  double active_100us;
};

/// Residency sweep in the cache-crossover report layout. Active columns use
/// a read interval equal to min(residency, 1 s).
inline std::vector<ResidencyRow> residency_sweep(std::span<const double> residencies,
                                                 const CacheParams& base) {
  CacheParams p1 = base, p100 = base, fast = base;
  p1.e_write_fcdc_J = 1e-15;
  p100.e_write_fcdc_J = 1e-13;
  fast.refresh_period_s = 1e-4;
  CacheParams slow = base;
  slow.refresh_period_s = 1e-3;
  std::vector<ResidencyRow> rows;
  for (double t : residencies) {
    const double interval = t > 0 && t < 1.0 ? t : 1.0;
    rows.push_back({t, parked_advantage(t, p1).ratio, parked_advantage(t, p100).ratio,
                    active_advantage(interval, slow), active_advantage(interval, fast)});
  }
  return rows;
}

}  // namespace fcdc::cache
