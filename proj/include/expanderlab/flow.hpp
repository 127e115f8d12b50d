#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "expanderlab/core.hpp"

namespace expanderlab {

/// u_i = tau sqrt(eps + r_i^2), derivative in closed form.
Profile mollified_cone(double tau, double eps, const RadialGrid& grid);

enum class Boundary { dirichlet, neumann };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view name);

struct FlowParams {
  double cfl = 0.4;
  Boundary boundary = Boundary::dirichlet;
  /// Neumann data u'(r_max); NaN means "use the initial slope there".
  double neumann_slope = std::numeric_limits<double>::quiet_NaN();
  double slope_cap = 1e3;
  double dt_min = 1e-14;
};

struct FlowState {
  double t = 0.0;
  Profile profile;
  double dt_last = 0.0;
  /// dt_last relative to the local stability limit.
  double cfl = 0.0;
  /// Smallest step taken so far.
  double dt_min_seen = std::numeric_limits<double>::infinity();
  long steps = 0;
  /// Largest max|u'| seen at any step.
  double max_slope = 0.0;
  /// Smallest value of the spatial operator seen at any step (mean convexity).
  double min_speed = std::numeric_limits<double>::infinity();
};

/// Explicit method of lines for u_t = u''/(1+u'^2) + (n-1)u'/r; returns the
/// state at each requested time (ascending, > 0).
std::vector<FlowState> evolve_radial_mcf(const Profile& u0, int n, std::span<const double> times,
                                         const FlowParams& params = {});

FlowState evolve_radial_mcf(const Profile& u0, int n, double t_end, const FlowParams& params = {});

/// Spatial operator u''/(1+u'^2) + (n-1)u'/r on the grid (axis: n u''(0)).
Vector mcf_speed(const RadialGrid& grid, const Vector& u, int n);

/// sup over r <= r_max/2 of |u(t2, r) - sqrt(t2/t1) u(t1, r sqrt(t1/t2))|.
double self_similarity_defect(const FlowState& s1, const FlowState& s2);

struct LinkState {
  int n = 2;
  double theta = M_PI / 2;
  double t = 0.0;
};

/// Extinction time of the geodesic sphere of radius theta0 (infinite at the
/// equator).
double link_extinction_time(int n, double theta0);

/// Closed form cos theta(t) = cos theta0 e^{(n-1)t}.
LinkState link_sphere_flow(int n, double theta0, double t);

/// Same flow by adaptive integration of d theta/dt = -(n-1) cot theta.
LinkState link_sphere_flow_integrated(int n, double theta0, double t, double tol = 1e-12);

struct PinchingResult {
  bool holds = true;
  double margin = 0.0;
};

/// Pinching inequality for the umbilic link; vacuous (margin = inf) for n = 2.
PinchingResult pinching_check(const LinkState& link);

}  // namespace expanderlab
