#pragma once

#include "fockopt/core.hpp"

#include <vector>

namespace fockopt::meas {

// measured_mode is 0 (first mode) or 1 (second mode) throughout.
Heralded<PureState> herald_pnrd(const PureState& joint, int measured_mode, int n);
Heralded<DensityOperator> herald_pnrd(const DensityOperator& joint, int measured_mode, int n);

// <x|n> for n < dim, x = a + a^dag convention, stable three-term recurrence.
RVec homodyne_x_functional(double x, int dim);

// Project the measured mode of a two-mode pure state on <x|.
Heralded<PureState> herald_homodyne_x(const PureState& joint, int measured_mode, double x = 0.0);

// Breeding contraction: psi1 (x) psi2 through a 50:50 beamsplitter, second
// output projected on <x|. Never forms the two-mode state.
Heralded<PureState> breed_homodyne_x(const PureState& a, const PureState& b, double x = 0.0);

// Mixed-input version. Peak memory is one dim x dim^2 real kernel.
Heralded<DensityOperator> breed_homodyne_x(const DensityOperator& a, const DensityOperator& b, double x = 0.0);

// Integrate the homodyne density over [x - w/2, x + w/2] by the midpoint rule.
Heralded<PureState> with_window(Heralded<PureState> h, double width);
Heralded<DensityOperator> with_window(Heralded<DensityOperator> h, double width);

enum class Quadrature { X, P };

std::vector<double> quadrature_distribution(const PureState& s, Quadrature q, const std::vector<double>& grid);
std::vector<double> quadrature_distribution(const DensityOperator& s, Quadrature q, const std::vector<double>& grid);

}  // namespace fockopt::meas
