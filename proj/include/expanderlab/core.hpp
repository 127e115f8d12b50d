#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "expanderlab/error.hpp"

namespace expanderlab {

using Vector = Eigen::VectorXd;

/// Rotationally symmetric regular cone: the graph of x -> tau |x| over R^n,
/// sitting in R^{n+1}. tau = 0 is the flat hyperplane.
struct ConeSpec {
  int n = 2;
  double tau = 0.0;

  void validate() const;
  /// Cosine of the polar angle of the link measured from the positive axis.
  double link_polar_cosine() const;
  bool flat() const { return tau == 0.0; }

  bool operator==(const ConeSpec&) const = default;
};

ConeSpec cone_from_link_angle(int n, double polar_angle);

class RadialGrid {
 public:
  RadialGrid() = default;
  /// Takes ownership of explicit nodes; checks monotonicity, r_0 = 0, N >= 16
  /// and the spacing-ratio bound.
  RadialGrid(Vector nodes, double stretch);

  const Vector& nodes() const { return nodes_; }
  double operator[](Eigen::Index i) const { return nodes_[i]; }
  Eigen::Index size() const { return nodes_.size(); }
  /// Number of intervals.
  Eigen::Index intervals() const { return nodes_.size() - 1; }
  double r_max() const { return nodes_[nodes_.size() - 1]; }
  double stretch() const { return stretch_; }
  double min_spacing() const;
  double max_spacing() const;
  /// Index of the interval [r_i, r_{i+1}] containing r (clamped to the grid).
  Eigen::Index locate(double r) const;

  bool operator==(const RadialGrid& other) const {
    return stretch_ == other.stretch_ && nodes_ == other.nodes_;
  }

 private:
  Vector nodes_;
  double stretch_ = 1.0;
};

/// N intervals on [0, r_max] with spacings growing geometrically by `stretch`.
RadialGrid make_radial_grid(int N, double r_max, double stretch);

enum class ProfileKind { sampled, cone, expander, flow };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

struct ProfileMeta {
  ProfileKind kind = ProfileKind::sampled;
  /// Set for cone samples: du at the vertex is a convention, not a derivative.
  bool singular_axis = false;
  std::optional<ConeSpec> cone;
  /// Dimension of the expander equation this profile was solved for.
  std::optional<int> expander_dim;
  /// Time stamp for flow snapshots.
  std::optional<double> time;

  bool operator==(const ProfileMeta&) const = default;
};

/// Radial graph u(r) over R^n sampled on a grid, with first derivatives.
class Profile {
 public:
  Profile() = default;
  Profile(RadialGrid grid, Vector u, Vector du, ProfileMeta meta = {});

  const RadialGrid& grid() const { return grid_; }
  const Vector& r() const { return grid_.nodes(); }
  const Vector& u() const { return u_; }
  const Vector& du() const { return du_; }
  const ProfileMeta& meta() const { return meta_; }
  Eigen::Index size() const { return u_.size(); }

  /// Cubic Hermite interpolation of (u, du) at radius r inside the grid.
  double height_at(double r) const;
  double slope_at(double r) const;

  bool operator==(const Profile& other) const {
    return grid_ == other.grid_ && u_ == other.u_ && du_ == other.du_ && meta_ == other.meta_;
  }

 private:
  RadialGrid grid_;
  Vector u_;
  Vector du_;
  ProfileMeta meta_;
};

/// Samples u = tau r, du = tau (du_0 = 0 by convention at the vertex).
Profile cone_profile(const ConeSpec& cone, const RadialGrid& grid);

/// Builds a profile from values, differentiating numerically when du is absent.
Profile profile_from_values(const RadialGrid& grid, Vector u, ProfileMeta meta = {});

struct WeightedNormSpec {
  double d = 0.0;
  int l = 0;
};

/// sum_{i <= l} sup (|x| + 1)^{-d+i} |d^i u / dr^i| with |x| = sqrt(r^2 + u^2).
double weighted_norm(const Profile& p, const WeightedNormSpec& spec);

/// Same norm for a field f (values and first derivatives on base's grid),
/// weighted by the geometry of the fixed hypersurface `base`.
double weighted_norm(const Vector& f, const Vector& df, const Profile& base,
                     const WeightedNormSpec& spec);

struct TraceEstimate {
  double tau = 0.0;
  /// |final - second-level| Richardson estimate; a pessimistic error bound.
  double spread = 0.0;
  bool converged = true;
};

/// Asymptotic slope from u(r)/r at r_max/4, r_max/2, r_max, extrapolated in
/// powers of r^{-2}.
TraceEstimate trace_at_infinity(const Profile& p, double tolerance = 1e-4);

/// radius^degree * link_value.
double homogeneous_extension(double link_value, double degree, double radius);

}  // namespace expanderlab
