#pragma once

#include "aep/constructions/calibration.hpp"
#include "aep/constructions/products.hpp"
