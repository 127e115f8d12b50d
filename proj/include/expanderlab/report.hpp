#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace expanderlab {

/// Outcome of one verification. pass is always sup_residual <= tolerance.
struct CheckReport {
  std::string name;
  double sup_residual = 0.0;
  double tolerance = 0.0;
  /// Empirical convergence order; NaN when no refinement study was run.
  double order_estimate = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  /// How second derivatives were obtained, or which nodes were used.
  std::string method;
  std::string note;

  static CheckReport make(std::string name, double sup, double tol, std::string method = {},
                          std::string note = {}) {
    CheckReport r;
    r.name = std::move(name);
    r.sup_residual = sup;
    r.tolerance = tol;
    r.pass = std::isfinite(sup) && sup <= tol;
    r.method = std::move(method);
    r.note = std::move(note);
    return r;
  }
};

}  // namespace expanderlab
