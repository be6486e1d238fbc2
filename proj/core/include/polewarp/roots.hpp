#pragma once

#include <span>
#include <vector>

#include "polewarp/precision.hpp"

namespace polewarp {

struct RootFindOptions {
    int max_sweeps = 500;
    int polish_iterations = 3;
};

/// All complex roots of a real-coefficient polynomial (ascending
/// coefficients) by Aberth-Ehrlich simultaneous iteration at the
/// coefficients' working precision, polished by Newton. Trailing
/// coefficients that vanish relative to the largest one reduce the
/// effective degree; exact zeros at the origin are returned directly.
/// Throws ConvergenceError when the sweep cap is hit before corrections
/// stall.
std::vector<HPComplex> polynomial_roots(std::span<const HPReal> coeffs,
                                        const RootFindOptions& opts = {});

/// Horner evaluation of a real-coefficient polynomial at a complex point.
HPComplex polynomial_eval(std::span<const HPReal> coeffs, const HPComplex& z);

}  // namespace polewarp
