#pragma once

#include <cstdint>
#include <functional>

#include "expanderlab/core.hpp"

namespace expanderlab {

struct NelderMeadOptions {
  int max_evals = 4000;
  /// Stop when the simplex spread in f and in x both fall below these.
  double f_tol = 1e-13;
  double x_tol = 1e-9;
  /// Restarts from the incumbent with a fresh, randomly rotated simplex.
  int restarts = 2;
  std::uint64_t seed = 1;
};

struct NelderMeadResult {
  Vector x;
  double fx = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Minimizes f from x0 with initial simplex edge lengths `step`.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const Vector& step, const NelderMeadOptions& opts = {});

}  // namespace expanderlab
