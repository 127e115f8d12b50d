#pragma once

#include <array>
#include <functional>
#include <string>

#include "expanderlab/core.hpp"
#include "expanderlab/report.hpp"

namespace expanderlab {

/// Pointwise geometry of the rotation hypersurface, upward normal.
struct SurfaceSample {
  Vector r, u, W, kappa_m, kappa_p, H, A2;
  /// u'', from the ODE or from finite differences (see method).
  Vector d2u;
  std::string method;

  Vector ratio() const { return (A2.array() / H.array().square()).matrix(); }
};

/// With `use_ode`, expander profiles of matching dimension take u'' from the
/// equation; everything else is differentiated numerically.
SurfaceSample curvatures(const Profile& p, int n, bool use_ode = true);

/// Both conclusions of the curvature bound: sup |A|^2/H^2 <= 4K(1 + 1e-3)
/// and |A|^2 <= K |x|^2, with 4K taken from the cone's link.
CheckReport curvature_ratio_bound(const Profile& expander, const ConeSpec& cone, int n);

/// sup |L H + H| over the inner 80% of nodes.
CheckReport drift_H_residual(const Profile& p, int n);

/// Min of L_{H^2}(|A|^2/H^2) and the defect against its closed form.
CheckReport ratio_subsolution_check(const Profile& p, int n);

/// H from curvatures (finite differences) against (u - r u')/(2W).
CheckReport h_identity_check(const Profile& p, int n);

/// H > 0 at every node.
CheckReport mean_convexity_check(const Profile& p, int n);

/// Is Sigma, near node, a graph of size < delta on scale r over the tangent
/// plane?
bool graph_window_check(const Profile& p, int n, Eigen::Index node, double delta, double scale_r);

/// Runs `check` at three resolutions and returns the finest report with the
/// observed order filled in.
CheckReport refinement_study(const std::function<CheckReport(int)>& check,
                             const std::array<int, 3>& nodes = {512, 1024, 2048});

}  // namespace expanderlab
