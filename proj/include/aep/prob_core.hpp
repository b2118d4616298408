#pragma once

#include "aep/core/error.hpp"
#include "aep/core/expectation.hpp"
#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"
#include "aep/core/stopping.hpp"
#include "aep/core/tree.hpp"
