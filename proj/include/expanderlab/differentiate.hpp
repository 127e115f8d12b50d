#pragma once

#include <span>

#include "expanderlab/core.hpp"

namespace expanderlab {

/// Fornberg's recursion: weights w_j such that sum_j w_j f(x_j) approximates
/// the `order`-th derivative of f at x0.
Vector finite_difference_weights(double x0, std::span<const double> xs, int order);

/// Symmetry of a radial field under r -> -r, used to build ghost values at
/// the axis. `none` falls back to one-sided stencils.
enum class Parity { even, odd, none };

/// (2 half + 1)-point derivative of sampled values (5-point, 4th order by
/// default); reflected stencils at r = 0 and one-sided stencils at r_max.
Vector differentiate(const RadialGrid& grid, const Vector& values, Parity parity, int order = 1,
                     int half = 2);

/// 3-point central differences, one-sided (2nd order) at both ends.
Vector central_difference(const RadialGrid& grid, const Vector& values);

/// Richardson order estimate from errors at three successive halvings.
double refinement_order(double coarse, double medium, double fine);

}  // namespace expanderlab
