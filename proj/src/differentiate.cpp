#include "expanderlab/differentiate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace expanderlab {

Vector finite_difference_weights(double x0, std::span<const double> xs, int order) {
  const int m = static_cast<int>(xs.size());
  require(m > order, ErrorKind::invalid_parameter, "stencil too small for derivative order");
  // c(k, j): weight of node j for the k-th derivative.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(order + 1, m);
  double c1 = 1.0;
  double c4 = xs[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < m; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c.row(order).transpose();
}

Vector differentiate(const RadialGrid& grid, const Vector& values, Parity parity, int order, int half) {
  require(half >= 1 && half <= 4, ErrorKind::invalid_parameter, "stencil half-width must be 1..4");
  const int width = 2 * half + 1;
  const Eigen::Index n = grid.size();
  require(values.size() == n, ErrorKind::invalid_parameter, "values do not match grid");
  Vector out(n);
  std::array<double, 9> xs_buf{};
  std::array<double, 9> fs{};
  const std::span<double> xs(xs_buf.data(), width);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index start = i - half;
    const bool reflect = parity != Parity::none && start < 0;
    if (!reflect) start = std::clamp<Eigen::Index>(start, 0, n - width);
    for (int k = 0; k < width; ++k) {
      const Eigen::Index j = start + k;
      if (j < 0) {
        xs[k] = -grid[-j];
        fs[k] = parity == Parity::odd ? -values[-j] : values[-j];
      } else {
        xs[k] = grid[j];
        fs[k] = values[j];
      }
    }
    const Vector w = finite_difference_weights(grid[i], xs, order);
    double acc = 0.0;
    for (int k = 0; k < width; ++k) acc += w[k] * fs[k];
    out[i] = acc;
  }
  return out;
}

Vector central_difference(const RadialGrid& grid, const Vector& values) {
  const Eigen::Index n = grid.size();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index start = std::clamp<Eigen::Index>(i - 1, 0, n - 3);
    const std::array<double, 3> xs{grid[start], grid[start + 1], grid[start + 2]};
    const Vector w = finite_difference_weights(grid[i], xs, 1);
    out[i] = w[0] * values[start] + w[1] * values[start + 1] + w[2] * values[start + 2];
  }
  return out;
}

double refinement_order(double coarse, double medium, double fine) {
  if (!(coarse > 0.0 && medium > 0.0 && fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  // Two successive ratios; the smaller is the conservative estimate.
  return std::min(std::log2(coarse / medium), std::log2(medium / fine));
}

}  // namespace expanderlab
