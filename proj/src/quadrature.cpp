#include "expanderlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "expanderlab/error.hpp"

namespace expanderlab {

namespace {

QuadResult kronrod(const std::function<double(double)>& f, double a, double b) {
  QuadResult q;
  q.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &q.error);
  // boost reports a relative estimate
  q.error *= std::abs(q.value);
  return q;
}

void refine(const std::function<double(double)>& f, double a, double b, const QuadResult& here,
            double target, unsigned depth, QuadResult& out) {
  if (depth == 0 || here.error <= target) {
    out.value += here.value;
    out.error += here.error;
    return;
  }
  const double mid = 0.5 * (a + b);
  refine(f, a, mid, kronrod(f, a, mid), 0.5 * target, depth - 1, out);
  refine(f, mid, b, kronrod(f, mid, b), 0.5 * target, depth - 1, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double tol, unsigned max_depth, double abs_floor) {
  QuadResult out;
  if (a == b) return out;
  const QuadResult first = kronrod(f, a, b);
  refine(f, a, b, first, std::max(tol * std::abs(first.value), abs_floor), max_depth, out);
  return out;
}

double gauss_legendre5(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 5>::integrate(f, a, b);
}

double sphere_area(int k) {
  require(k >= 0, ErrorKind::invalid_parameter, "sphere dimension must be >= 0");
  const double m = 0.5 * (k + 1);
  return 2.0 * std::pow(M_PI, m) / boost::math::tgamma(m);
}

double angular_average(int n, double kappa) {
  require(n >= 2, ErrorKind::invalid_parameter, "angular average needs n >= 2");
  require(kappa >= 0.0 && std::isfinite(kappa), ErrorKind::invalid_parameter,
          "angular average needs finite kappa >= 0");
  if (kappa == 0.0) return 1.0;
  // mean of exp(kappa cos phi) over S^{n-1} is Gamma(n/2) (2/kappa)^nu I_nu(kappa)
  const double nu = 0.5 * n - 1.0;
  const double front = boost::math::tgamma(0.5 * n) * std::pow(2.0 / kappa, nu);
  if (kappa < 1e-6) return 1.0 - kappa + 0.5 * kappa * kappa * (1.0 + 1.0 / n);
  if (kappa <= 500.0) return front * std::exp(-kappa) * boost::math::cyl_bessel_i(nu, kappa);
  // exp(-x) I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * kappa);
    sum += term;
    if (std::abs(term) < 1e-17) break;
  }
  return front * sum / std::sqrt(2.0 * M_PI * kappa);
}

}  // namespace expanderlab
