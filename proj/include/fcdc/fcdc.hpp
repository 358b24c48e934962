#pragma once

#include "fcdc/analog_kernel.hpp"
#include "fcdc/cache_model.hpp"
#include "fcdc/config.hpp"
#include "fcdc/constants.hpp"
#include "fcdc/device_model.hpp"
#include "fcdc/errors.hpp"
#include "fcdc/fixtures.hpp"
#include "fcdc/noise_budget.hpp"
#include "fcdc/report.hpp"
#include "fcdc/rng.hpp"
#include "fcdc/serving_sim.hpp"
#include "fcdc/tile_energy.hpp"
#include "fcdc/units.hpp"
