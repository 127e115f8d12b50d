#pragma once

#include <cstdint>
#include <vector>

#include "expanderlab/core.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

/// Translation in the symmetry quotient: axial component and signed distance
/// from the axis.
struct Center {
  double axial = 0.0;
  double off = 0.0;
};

/// (4 pi)^{-n/2} |S^{n-1}|, the constant in front of the radial reduction.
double gaussian_constant(int n);

struct GaussianArea {
  double value = 0.0;
  /// Quadrature error estimate on the sampled part.
  double quad_error = 0.0;
  /// Lower and upper bounds for the contribution beyond r_max.
  double tail_lo = 0.0;
  double tail_hi = 0.0;

  double bracket() const { return tail_hi - tail_lo; }
};

/// F[scale * Sigma + y] for the rotation hypersurface of p. Beyond r_max the
/// profile continues as tau r + c/r + d/r^3 fitted to the last node, and the
/// tail is bracketed by a band around that model.
GaussianArea gaussian_area_report(const Profile& p, int n, Center center, double scale,
                                  bool estimate_error = true);

double gaussian_area(const Profile& p, int n, Center center, double scale);

/// F[C + y] for the exact cone (no sampling).
GaussianArea cone_gaussian_area(const ConeSpec& cone, Center center);

/// Closed meridian curve (r(t), z(t)) sampled with derivatives, for surfaces
/// that are not graphs over the plane.
struct MeridianCurve {
  Vector t, r, z, dr, dz;
};

/// Round sphere of radius R centred at the origin, N intervals in t in [0, pi].
MeridianCurve sphere_meridian(double R, int N);

double gaussian_area(const MeridianCurve& curve, int n, Center center, double scale);

struct EntropySearch {
  double rho_min = 1e-4;
  double rho_max = 1e2;
  double y_box = 12.0;
  double eps_bd = 1e-4;
  double radius_start = 4.0;
  double radius_max = 1024.0;
  int shell_directions = 64;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct EntropyReport {
  double lambda = 1.0;
  /// Upper end of the bracket: lambda or the boundary-shell bound.
  double lambda_upper = 1.0;
  double f_identity = 0.0;
  double argmax_scale = 1.0;
  Center argmax_center;
  double quad_error = 0.0;
  /// Widest tail bracket seen at the reported maximizer.
  double tail_bracket = 0.0;
  double search_radius = 0.0;
  bool boundary_hit = false;
  int evaluations = 0;
};

EntropyReport entropy_of_profile(const Profile& p, int n, const EntropySearch& search = {});

EntropyReport cone_entropy(const ConeSpec& cone, const EntropySearch& search = {});

/// Area of Sigma in B_R divided by Mtilde lambda R^n for each radius.
std::vector<double> area_ratios(const Profile& p, int n, double lambda, const std::vector<double>& radii);

/// H^n(Sigma cap B_R).
double area_in_ball(const Profile& p, int n, double R);

/// (4 pi)^{n/2} e^{1/4}.
double area_ratio_constant(int n);

CheckReport area_ratio_check(const Profile& p, int n, double lambda, const std::vector<double>& radii);

struct ContinuityRow {
  double tau = 0.0;
  double lambda = 0.0;
  double difference = 0.0;
  double quad_error = 0.0;
};

std::vector<ContinuityRow> entropy_continuity_experiment(int n, const std::vector<double>& tau_seq,
                                                         double tau_limit,
                                                         const EntropySearch& search = {});

}  // namespace expanderlab
