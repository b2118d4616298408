#pragma once

#include <cstddef>

#include "aep/core/measure.hpp"
#include "aep/core/process.hpp"

namespace aep {

// Snell envelope of `row` for stopping times bounded by row time r:
// L = E at row time r and L_n = max(E_n, E[L_{n+1} | F_n]) below. Levels past
// r carry E unchanged.
TreeProcess snell_envelope_bounded(const MeasureFamily& family, std::size_t measure,
                                   const TreeProcess& row, std::size_t r);

// E_P[L_0], which equals sup over stopping times <= r of E_P[E_tau].
double envelope_value(const MeasureFamily& family, std::size_t measure,
                      const TreeProcess& row, std::size_t r);

}  // namespace aep
