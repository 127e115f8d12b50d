#pragma once

#include <functional>

namespace expanderlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (31 point) on a finite interval. Bisection stops
/// once the Kronrod-Gauss difference is below max(tol |I|, abs_floor); the
/// floor keeps near-empty pieces from recursing on roundoff.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double tol = 1e-12, unsigned max_depth = 12, double abs_floor = 0.0);

/// Fixed 5-point Gauss-Legendre; the workhorse for per-interval integrals.
double gauss_legendre5(const std::function<double(double)>& f, double a, double b);

/// |S^k|, the area of the unit k-sphere.
double sphere_area(int k);

/// Mean of exp(kappa (cos phi - 1)) over S^{n-1}, phi the angle to a fixed
/// axis. Always in (0, 1]; the exp(-kappa) scaling keeps it finite for large
/// kappa.
double angular_average(int n, double kappa);

}  // namespace expanderlab
