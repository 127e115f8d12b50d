#include "expanderlab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "expanderlab/differentiate.hpp"
#include "expanderlab/expander_ode.hpp"

namespace expanderlab {

SurfaceSample curvatures(const Profile& p, int n, bool use_ode) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  const Eigen::Index m = p.size();
  SurfaceSample s;
  s.r = p.r();
  s.u = p.u();
  const bool ode = use_ode && p.meta().kind == ProfileKind::expander && p.meta().expander_dim == n;
  if (ode) {
    s.d2u.resize(m);
    for (Eigen::Index i = 0; i < m; ++i)
      s.d2u[i] = expander_second_derivative(n, s.r[i], s.u[i], p.du()[i]);
    s.method = "ode";
  } else {
    s.d2u = differentiate(p.grid(), p.du(), Parity::odd);
    s.method = "finite-differences";
  }
  const auto du = p.du().array();
  s.W = (1.0 + du.square()).sqrt();
  s.kappa_m = (s.d2u.array() / s.W.array().cube()).matrix();
  s.kappa_p.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    s.kappa_p[i] = s.r[i] == 0.0 ? s.kappa_m[i] : du[i] / (s.r[i] * s.W[i]);
  s.H = s.kappa_m + (n - 1) * s.kappa_p;
  s.A2 = (s.kappa_m.array().square() + (n - 1) * s.kappa_p.array().square()).matrix();
  return s;
}

namespace {

void require_mean_convex(const SurfaceSample& s) {
  const double h = s.H.minCoeff();
  require(h > 0.0, ErrorKind::hypothesis_violation,
          "mean curvature not positive (min H = " + std::to_string(h) + ")");
}

// Delta f for radial f on the rotation hypersurface; axis limit n f''(0).
Vector surface_laplacian(const SurfaceSample& s, const Vector& f1, const Vector& f2, const Vector& du,
                         int n) {
  Vector out(s.r.size());
  for (Eigen::Index i = 0; i < s.r.size(); ++i) {
    if (s.r[i] == 0.0) {
      out[i] = n * f2[i];
      continue;
    }
    const double W = s.W[i], W2 = W * W;
    const double dW = du[i] * s.d2u[i] / W;
    out[i] = f2[i] / W2 - f1[i] * dW / (W2 * W) + (n - 1) * f1[i] / (s.r[i] * W2);
  }
  return out;
}

Eigen::Index inner_limit(const Profile& p) { return static_cast<Eigen::Index>(0.8 * (p.size() - 1)); }

}  // namespace

CheckReport curvature_ratio_bound(const Profile& expander, const ConeSpec& cone, int n) {
  cone.validate();
  const auto s = curvatures(expander, n);
  require_mean_convex(s);
  // link of the cone: kappa_m = 0, kappa_p = tau/(r W), so |A|^2/H^2 = 1/(n-1)
  const Profile cp = cone_profile(cone, make_radial_grid(16, 2.0, 1.0));
  const auto cs = curvatures(cp, n, false);
  const double four_k = cs.A2[8] / (cs.H[8] * cs.H[8]);
  const double K = 0.25 * four_k;
  const Vector ratio = s.ratio();
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::Index where = 0;
  for (Eigen::Index i = 0; i < ratio.size(); ++i) {
    const double x2 = s.r[i] * s.r[i] + s.u[i] * s.u[i];
    const double excess = std::max(ratio[i] / four_k - 1.0, s.A2[i] / (K * x2) - 1.0);
    if (excess > worst) {
      worst = excess;
      where = i;
    }
  }
  Eigen::Index argmax_ratio;
  ratio.maxCoeff(&argmax_ratio);
  return CheckReport::make("curvature_ratio_bound", worst, 1e-3, s.method,
                           "4K = " + std::to_string(four_k) + "; max ratio at r = " +
                               std::to_string(s.r[argmax_ratio]) + "; worst excess at r = " +
                               std::to_string(s.r[where]));
}

CheckReport drift_H_residual(const Profile& p, int n) {
  const auto s = curvatures(p, n);
  const Vector H1 = differentiate(p.grid(), s.H, Parity::even, 1);
  const Vector H2 = differentiate(p.grid(), s.H, Parity::even, 2);
  const Vector lap = surface_laplacian(s, H1, H2, p.du(), n);
  double sup = 0.0;
  int positive = 0;
  const Eigen::Index last = inner_limit(p);
  for (Eigen::Index i = 0; i <= last; ++i) {
    const double W2 = s.W[i] * s.W[i];
    const double drift = (s.r[i] + s.u[i] * p.du()[i]) / (2.0 * W2) * H1[i];
    const double res = lap[i] + drift + (s.A2[i] - 0.5) * s.H[i] + s.H[i];
    sup = std::max(sup, std::abs(res));
    positive += res > 0.0;
  }
  return CheckReport::make("drift_H_residual", sup, 1e-4, s.method + "; inner 80% of nodes",
                           std::to_string(positive) + "/" + std::to_string(last + 1) +
                               " nodes with positive residual");
}

CheckReport ratio_subsolution_check(const Profile& p, int n) {
  const auto s = curvatures(p, n);
  require_mean_convex(s);
  const auto& g = p.grid();
  const Vector Q = s.ratio();
  const Vector Q1 = differentiate(g, Q, Parity::even, 1);
  const Vector Q2 = differentiate(g, Q, Parity::even, 2);
  const Vector H1 = differentiate(g, s.H, Parity::even, 1);
  const Vector lap = surface_laplacian(s, Q1, Q2, p.du(), n);
  // closed form 2|grad(A/H)|^2 in terms of f = kappa_m/H, g = kappa_p/H
  const Vector f = (s.kappa_m.array() / s.H.array()).matrix();
  const Vector h = (s.kappa_p.array() / s.H.array()).matrix();
  const Vector f1 = differentiate(g, f, Parity::even, 1);
  const Vector h1 = differentiate(g, h, Parity::even, 1);

  double min_value = std::numeric_limits<double>::infinity(), identity = 0.0;
  const Eigen::Index last = inner_limit(p);
  for (Eigen::Index i = 1; i <= last; ++i) {
    const double W2 = s.W[i] * s.W[i];
    const double LQ = lap[i] + (s.r[i] + s.u[i] * p.du()[i]) / (2.0 * W2) * Q1[i] +
                      2.0 * (H1[i] / s.H[i]) * Q1[i] / W2;
    const double fh = f[i] - h[i];
    const double rhs = 2.0 * (f1[i] * f1[i] / W2 + (n - 1) * h1[i] * h1[i] / W2 +
                              2.0 * (n - 1) * fh * fh / (s.r[i] * s.r[i] * W2));
    min_value = std::min(min_value, LQ);
    identity = std::max(identity, std::abs(LQ - rhs));
  }
  const double sup = std::max(identity, -min_value);
  return CheckReport::make("ratio_subsolution", sup, 1e-4, s.method + "; inner 80% of nodes, axis skipped",
                           "min value " + std::to_string(min_value) + ", identity defect " +
                               std::to_string(identity));
}

CheckReport h_identity_check(const Profile& p, int n) {
  const auto s = curvatures(p, n, false);
  double sup = 0.0;
  const Eigen::Index last = inner_limit(p);
  for (Eigen::Index i = 0; i <= last; ++i) {
    const double support = (s.u[i] - s.r[i] * p.du()[i]) / (2.0 * s.W[i]);
    sup = std::max(sup, std::abs(s.H[i] - support));
  }
  return CheckReport::make("h_identity", sup, 1e-7, s.method + "; inner 80% of nodes");
}

CheckReport mean_convexity_check(const Profile& p, int n) {
  const auto s = curvatures(p, n);
  const double h = s.H.minCoeff();
  return CheckReport::make("mean_convexity", -h, 0.0, s.method, "min H = " + std::to_string(h));
}

bool graph_window_check(const Profile& p, int n, Eigen::Index node, double delta, double scale_r) {
  require(n >= 2, ErrorKind::invalid_parameter, "n must be >= 2");
  require(node >= 0 && node < p.size() - 1, ErrorKind::invalid_parameter, "node must be interior");
  require(delta > 0.0 && scale_r > 0.0, ErrorKind::invalid_parameter, "delta and scale must be > 0");
  const Vector& r = p.r();
  const Vector& u = p.u();
  const Vector& du = p.du();
  const Eigen::Index N = p.size() - 1;
  using V3 = Eigen::Vector3d;
  const V3 x0(r[node], 0.0, u[node]);
  const V3 e = V3(-du[node], 0.0, 1.0).normalized();
  const double top = delta * scale_r;

  auto point = [&](Eigen::Index j, double phi) { return V3(r[j] * std::cos(phi), r[j] * std::sin(phi), u[j]); };
  auto normal = [&](Eigen::Index j, double phi) {
    return V3(-du[j] * std::cos(phi), -du[j] * std::sin(phi), 1.0).normalized();
  };
  auto split = [&](const V3& x) {
    const V3 d = x - x0;
    const double h = d.dot(e);
    return std::pair{h, (d - h * e).norm()};
  };

  // The sheet through x0 must leave the cylinder through its side, along the
  // meridian line in both directions (through the axis if needed).
  auto walk = [&](int dir) {
    std::vector<std::pair<Eigen::Index, double>> path;
    if (dir > 0) {
      for (Eigen::Index j = node + 1; j <= N; ++j) path.push_back({j, 0.0});
    } else {
      for (Eigen::Index j = node - 1; j >= 0; --j) path.push_back({j, 0.0});
      for (Eigen::Index j = 1; j <= N; ++j) path.push_back({j, M_PI});
    }
    for (const auto& [j, phi] : path) {
      const auto [h, side] = split(point(j, phi));
      if (side >= scale_r) return true;
      if (std::abs(h) >= top) return false;
      if (normal(j, phi).dot(e) <= 0.0) return false;
    }
    throw Error(ErrorKind::window_escapes_grid, "window reaches past r_max");
  };
  if (!walk(1) || !walk(-1)) return false;

  constexpr int kAngles = 64;
  double sup_h = 0.0, sup_grad = 0.0;
  for (int k = 0; k <= kAngles; ++k) {
    const double phi = M_PI * k / kAngles;
    for (Eigen::Index j = 0; j <= N; ++j) {
      const auto [h, side] = split(point(j, phi));
      if (side >= scale_r || std::abs(h) >= top) continue;
      const double c = normal(j, phi).dot(e);
      if (c <= 0.0) return false;
      sup_h = std::max(sup_h, std::abs(h));
      sup_grad = std::max(sup_grad, std::sqrt(std::max(0.0, 1.0 - c * c)) / c);
    }
  }
  return sup_h / scale_r + sup_grad < delta;
}

CheckReport refinement_study(const std::function<CheckReport(int)>& check, const std::array<int, 3>& nodes) {
  std::array<CheckReport, 3> reps{check(nodes[0]), check(nodes[1]), check(nodes[2])};
  CheckReport out = reps[2];
  out.order_estimate = refinement_order(reps[0].sup_residual, reps[1].sup_residual, reps[2].sup_residual);
  out.note += (out.note.empty() ? "" : "; ") + std::string("sups ") + std::to_string(reps[0].sup_residual) +
              ", " + std::to_string(reps[1].sup_residual) + ", " + std::to_string(reps[2].sup_residual);
  return out;
}

}  // namespace expanderlab
