#pragma once

#include "aep/verifier/certificate.hpp"
#include "aep/verifier/diagonal_horizon.hpp"
#include "aep/verifier/drift.hpp"
#include "aep/verifier/sampling.hpp"
#include "aep/verifier/snell.hpp"
