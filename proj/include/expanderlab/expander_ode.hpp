#pragma once

#include <string>
#include <vector>

#include "expanderlab/core.hpp"

namespace expanderlab {

/// R = u''/(1+u'^2) + (n-1)u'/r - (u - r u')/2, with the axis limit
/// n u''(0) - u(0)/2. u'' comes from a 7-point derivative of du.
Vector expander_residual(const Profile& p, int n);

/// u'' implied by the expander equation at radius r (axis limit at r = 0).
double expander_second_derivative(int n, double r, double u, double du);

struct IntegrateOptions {
  double tol = 1e-12;
  /// |u'| above this means the solution left the graphical regime.
  double slope_cap = 1e3;
  int max_steps = 2000000;
};

/// Series start on [0, r_ser] then adaptive Dormand-Prince from r_ser to the
/// end of the grid, sampled at the nodes.
Profile integrate_profile(int n, double a, const RadialGrid& grid, const IntegrateOptions& opts = {});

/// Convenience overload on a uniform 2048-interval grid.
Profile integrate_profile(int n, double a, double r_max, double tol);

struct ShootOptions {
  int nodes = 2048;
  double r_max = 40.0;
  double stretch = 1.0;
  /// Target accuracy on the asymptotic slope.
  double tol = 1e-10;
  double ode_tol = 1e-12;
  /// Scan a in 2^k tau sqrt(n), k in [scan_lo, scan_hi], `scan_refine` points
  /// per octave.
  int scan_lo = -6;
  int scan_hi = 3;
  int scan_refine = 1;
};

struct ScanRow {
  double a = 0.0;
  double slope = 0.0;
};

struct ShootingResult {
  Profile profile;
  double a = 0.0;
  double residual_sup = 0.0;
  double slope_error = 0.0;
  int iterations = 0;
  std::vector<ScanRow> scan;
};

ShootingResult shoot(int n, double tau, const ShootOptions& opts = {});

/// Slope at infinity reached from axis height a on the given grid.
double shooting_slope(int n, double a, const RadialGrid& grid, double ode_tol = 1e-12);

/// sup over the tail half of |x| (|f| + |df/ds|), f the normal offset from the
/// cone and s cone arclength.
double decay_constant(const Profile& p, const ConeSpec& cone, double trace_tol = 1e-3);

}  // namespace expanderlab
