#include "expanderlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expanderlab/differentiate.hpp"

namespace expanderlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::step_underflow: return "step-underflow";
    case ErrorKind::bracket_failure: return "bracket-failure";
    case ErrorKind::tolerance_not_met: return "tolerance-not-met";
    case ErrorKind::trace_mismatch: return "trace-mismatch";
    case ErrorKind::cfl_underflow: return "cfl-underflow";
    case ErrorKind::slope_cap_exceeded: return "slope-cap-exceeded";
    case ErrorKind::past_extinction: return "past-extinction";
    case ErrorKind::quadrature_tolerance: return "quadrature-tolerance-not-met";
    case ErrorKind::search_radius_overflow: return "search-radius-overflow";
    case ErrorKind::hypothesis_violation: return "hypothesis-violation";
    case ErrorKind::window_escapes_grid: return "window-escapes-grid";
    case ErrorKind::unknown_kind: return "unknown-kind";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

void ConeSpec::validate() const {
  require(n >= 2, ErrorKind::invalid_parameter, "cone dimension n must be >= 2");
  require(std::isfinite(tau) && tau >= 0.0, ErrorKind::invalid_parameter,
          "cone slope tau must be finite and >= 0");
}

double ConeSpec::link_polar_cosine() const { return tau / std::sqrt(1.0 + tau * tau); }

ConeSpec cone_from_link_angle(int n, double polar_angle) {
  require(polar_angle > 0.0 && polar_angle <= M_PI / 2, ErrorKind::invalid_parameter,
          "link polar angle must lie in (0, pi/2]");
  // cos(phi) = tau / sqrt(1 + tau^2)  <=>  tau = cot(phi)
  const double tau = polar_angle == M_PI / 2 ? 0.0 : std::cos(polar_angle) / std::sin(polar_angle);
  ConeSpec cone{n, std::max(tau, 0.0)};
  cone.validate();
  return cone;
}

RadialGrid::RadialGrid(Vector nodes, double stretch) : nodes_(std::move(nodes)), stretch_(stretch) {
  require(nodes_.size() >= 17, ErrorKind::invalid_parameter, "grid needs at least 16 intervals");
  require(stretch_ >= 1.0, ErrorKind::invalid_parameter, "stretch must be >= 1");
  require(nodes_[0] == 0.0, ErrorKind::invalid_parameter, "grid must start at r = 0");
  for (Eigen::Index i = 1; i < nodes_.size(); ++i) {
    require(std::isfinite(nodes_[i]) && nodes_[i] > nodes_[i - 1], ErrorKind::invalid_parameter,
            "grid nodes must be finite and strictly increasing");
    if (i >= 2) {
      const double ratio = (nodes_[i] - nodes_[i - 1]) / (nodes_[i - 1] - nodes_[i - 2]);
      require(ratio <= stretch_ * (1.0 + 1e-9), ErrorKind::invalid_parameter,
              "consecutive spacing ratio exceeds stretch");
    }
  }
}

double RadialGrid::min_spacing() const {
  const Eigen::Index m = nodes_.size() - 1;
  return (nodes_.tail(m) - nodes_.head(m)).minCoeff();
}

double RadialGrid::max_spacing() const {
  const Eigen::Index m = nodes_.size() - 1;
  return (nodes_.tail(m) - nodes_.head(m)).maxCoeff();
}

Eigen::Index RadialGrid::locate(double r) const {
  const double* begin = nodes_.data();
  const double* end = begin + nodes_.size();
  const auto it = std::upper_bound(begin, end, r);
  const Eigen::Index idx = static_cast<Eigen::Index>(it - begin) - 1;
  return std::clamp<Eigen::Index>(idx, 0, nodes_.size() - 2);
}

RadialGrid make_radial_grid(int N, double r_max, double stretch) {
  require(N >= 16, ErrorKind::invalid_parameter, "N must be >= 16");
  require(std::isfinite(r_max) && r_max > 0.0, ErrorKind::invalid_parameter, "r_max must be > 0");
  require(std::isfinite(stretch) && stretch >= 1.0, ErrorKind::invalid_parameter,
          "stretch must be >= 1");
  Vector nodes(N + 1);
  nodes[0] = 0.0;
  if (stretch == 1.0) {
    const double h = r_max / N;
    for (int i = 1; i <= N; ++i) nodes[i] = h * i;
  } else {
    // h_i = h0 stretch^i, sum_{i<N} h_i = r_max
    const double h0 = r_max * (stretch - 1.0) / (std::pow(stretch, N) - 1.0);
    double h = h0;
    for (int i = 1; i <= N; ++i) {
      nodes[i] = nodes[i - 1] + h;
      h *= stretch;
    }
  }
  nodes[N] = r_max;
  return RadialGrid(std::move(nodes), stretch);
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::sampled: return "sampled";
    case ProfileKind::cone: return "cone";
    case ProfileKind::expander: return "expander";
    case ProfileKind::flow: return "flow";
  }
  return "sampled";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  if (name == "sampled") return ProfileKind::sampled;
  if (name == "cone") return ProfileKind::cone;
  if (name == "expander") return ProfileKind::expander;
  if (name == "flow") return ProfileKind::flow;
  throw Error(ErrorKind::unknown_kind, "profile kind '" + std::string(name) + "'");
}

Profile::Profile(RadialGrid grid, Vector u, Vector du, ProfileMeta meta)
    : grid_(std::move(grid)), u_(std::move(u)), du_(std::move(du)), meta_(std::move(meta)) {
  require(u_.size() == grid_.size() && du_.size() == grid_.size(), ErrorKind::invalid_parameter,
          "profile arrays must match the grid node count");
  require(u_.allFinite() && du_.allFinite(), ErrorKind::invalid_parameter,
          "profile values must be finite");
  require(du_[0] == 0.0, ErrorKind::invalid_parameter, "profile slope must vanish at the axis");
}

namespace {

struct HermiteSegment {
  double h, t, u0, u1, d0, d1;
};

HermiteSegment segment(const Profile& p, double r) {
  const auto& g = p.grid();
  require(r >= 0.0 && r <= g.r_max() * (1.0 + 1e-14), ErrorKind::invalid_parameter,
          "interpolation radius outside the grid");
  const Eigen::Index i = g.locate(r);
  const double h = g[i + 1] - g[i];
  // du at a cone vertex is a convention, not a slope
  const double d0 = i == 0 && p.meta().singular_axis ? (p.u()[1] - p.u()[0]) / h : p.du()[i];
  return {h, (r - g[i]) / h, p.u()[i], p.u()[i + 1], d0, p.du()[i + 1]};
}

}  // namespace

double Profile::height_at(double r) const {
  const auto s = segment(*this, r);
  const double t = s.t, t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * s.u0 + h10 * s.h * s.d0 + h01 * s.u1 + h11 * s.h * s.d1;
}

double Profile::slope_at(double r) const {
  const auto s = segment(*this, r);
  const double t = s.t, t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * s.u0 + d01 * s.u1) / s.h + d10 * s.d0 + d11 * s.d1;
}

Profile cone_profile(const ConeSpec& cone, const RadialGrid& grid) {
  cone.validate();
  Vector u = cone.tau * grid.nodes();
  Vector du = Vector::Constant(grid.size(), cone.tau);
  du[0] = 0.0;
  ProfileMeta meta;
  meta.kind = ProfileKind::cone;
  meta.singular_axis = cone.tau != 0.0;
  meta.cone = cone;
  return Profile(grid, std::move(u), std::move(du), meta);
}

Profile profile_from_values(const RadialGrid& grid, Vector u, ProfileMeta meta) {
  Vector du = differentiate(grid, u, Parity::even);
  du[0] = 0.0;
  return Profile(grid, std::move(u), std::move(du), std::move(meta));
}

double weighted_norm(const Vector& f, const Vector& df, const Profile& base,
                     const WeightedNormSpec& spec) {
  require(spec.l >= 0 && spec.l <= 2, ErrorKind::invalid_parameter,
          "weighted norm derivative order must be 0, 1 or 2");
  require(f.size() == base.size() && df.size() == base.size(), ErrorKind::invalid_parameter,
          "field does not match the base profile");
  const Vector& r = base.r();
  const Vector radius = (r.array().square() + base.u().array().square()).sqrt() + 1.0;
  double total = (radius.array().pow(-spec.d) * f.array().abs()).maxCoeff();
  if (spec.l >= 1) total += (radius.array().pow(1.0 - spec.d) * df.array().abs()).maxCoeff();
  if (spec.l >= 2) {
    const Vector d2f = central_difference(base.grid(), df);
    total += (radius.array().pow(2.0 - spec.d) * d2f.array().abs()).maxCoeff();
  }
  return total;
}

double weighted_norm(const Profile& p, const WeightedNormSpec& spec) {
  return weighted_norm(p.u(), p.du(), p, spec);
}

TraceEstimate trace_at_infinity(const Profile& p, double tolerance) {
  const double r_max = p.grid().r_max();
  require(r_max >= 10.0, ErrorKind::invalid_parameter, "trace needs a grid reaching r_max >= 10");
  const double q1 = p.height_at(r_max / 4) / (r_max / 4);
  const double q2 = p.height_at(r_max / 2) / (r_max / 2);
  const double q3 = p.u()[p.size() - 1] / r_max;
  // u/r = tau + c r^{-2} + d r^{-4} + ...
  const double e1 = (4.0 * q2 - q1) / 3.0;
  const double e2 = (4.0 * q3 - q2) / 3.0;
  const double est = e1 == e2 ? e2 : (16.0 * e2 - e1) / 15.0;
  TraceEstimate out;
  out.tau = est;
  out.spread = std::abs(est - e2);
  out.converged = std::isfinite(est) && out.spread <= tolerance;
  return out;
}

double homogeneous_extension(double link_value, double degree, double radius) {
  require(radius > 0.0, ErrorKind::invalid_parameter, "homogeneous extension needs radius > 0");
  return std::pow(radius, degree) * link_value;
}

}  // namespace expanderlab
