#pragma once

#include "aep/montecarlo/rng.hpp"
#include "aep/montecarlo/simulation.hpp"
#include "aep/montecarlo/trunc_normal.hpp"
