// Minimal library use: cell capacitance, tile energy and one serving ratio.

#include <iostream>

#include <fmt/format.h>

#include "fcdc/fcdc.hpp"

int main() {
  using namespace fcdc;
  const device::CellGeometry cell;
  const double c0 = device::cell_capacitance(cell);
  fmt::print("C0 = {:.3g} F, read energy = {:.3g} J\n", c0, device::intrinsic_read_energy(c0, 0.158));

  fmt::print("V-DAC {:.4g} fJ/MAC, PWM {:.4g} fJ/MAC\n", tile::per_mac_energy(tile::DacVariant::vdac) / 1e-15,
             tile::per_mac_energy(tile::DacVariant::pwm) / 1e-15);

  const auto cfg = config::default_config(FCDC_DATA_DIR);
  const auto in = config::load_serving_inputs(cfg);
  const auto sub = serving::fcdc_substrate(tile::DacVariant::vdac);
  for (const auto& w : in.workloads) {
    const double gpu = serving::gpu_g0_energy(w, in.gpu);
    const double hyb = serving::hybrid_energy(w, sub, cfg.serving, in.gpu);
    fmt::print("{:>7}: GPU {:10.4g} J  hybrid {:8.4g} J  ratio {:8.4g}\n", w.name, gpu, hyb, gpu / hyb);
  }
}
