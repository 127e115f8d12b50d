#include "expanderlab/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace expanderlab {

namespace {

struct Simplex {
  std::vector<Vector> x;
  std::vector<double> f;

  void sort() {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a] < f[b]; });
    std::vector<Vector> xs;
    std::vector<double> fs;
    for (auto i : idx) {
      xs.push_back(x[i]);
      fs.push_back(f[i]);
    }
    x = std::move(xs);
    f = std::move(fs);
  }

  double f_spread() const { return f.back() - f.front(); }

  double x_spread() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s = std::max(s, (x[i] - x[0]).lpNorm<Eigen::Infinity>());
    return s;
  }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const Vector& step, const NelderMeadOptions& opts) {
  const Eigen::Index d = x0.size();
  require(d >= 1 && step.size() == d, ErrorKind::invalid_parameter,
          "simplex step must match the dimension");
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  NelderMeadResult best;
  best.x = x0;
  best.fx = f(x0);
  best.evals = 1;

  auto eval = [&](const Vector& x) {
    ++best.evals;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  for (int round = 0; round <= opts.restarts; ++round) {
    Simplex s;
    s.x.push_back(best.x);
    s.f.push_back(best.fx);
    for (Eigen::Index i = 0; i < d; ++i) {
      Vector v = best.x;
      if (round == 0) {
        v[i] += step[i];
      } else {
        // jittered axes so restarts do not retrace the same path
        for (Eigen::Index j = 0; j < d; ++j) v[j] += 0.25 * unit(rng) * step[j];
        v[i] += step[i] * (0.5 + 0.5 * std::abs(unit(rng)));
      }
      s.x.push_back(v);
      s.f.push_back(eval(v));
    }
    s.sort();

    bool done = false;
    while (best.evals < opts.max_evals) {
      if (s.f_spread() <= opts.f_tol * (1.0 + std::abs(s.f[0])) && s.x_spread() <= opts.x_tol) {
        done = true;
        break;
      }
      Vector centroid = Vector::Zero(d);
      for (Eigen::Index i = 0; i < d; ++i) centroid += s.x[i];
      centroid /= static_cast<double>(d);
      const Vector& worst = s.x[d];

      const Vector xr = centroid + (centroid - worst);
      const double fr = eval(xr);
      if (fr < s.f[0]) {
        const Vector xe = centroid + 2.0 * (centroid - worst);
        const double fe = eval(xe);
        if (fe < fr) {
          s.x[d] = xe;
          s.f[d] = fe;
        } else {
          s.x[d] = xr;
          s.f[d] = fr;
        }
      } else if (fr < s.f[d - 1]) {
        s.x[d] = xr;
        s.f[d] = fr;
      } else {
        const bool outside = fr < s.f[d];
        const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                                  : Vector(centroid + 0.5 * (worst - centroid));
        const double fc = eval(xc);
        if (fc < std::min(fr, s.f[d])) {
          s.x[d] = xc;
          s.f[d] = fc;
        } else {
          for (Eigen::Index i = 1; i <= d; ++i) {
            s.x[i] = s.x[0] + 0.5 * (s.x[i] - s.x[0]);
            s.f[i] = eval(s.x[i]);
          }
        }
      }
      s.sort();
    }
    if (s.f[0] <= best.fx) {
      best.x = s.x[0];
      best.fx = s.f[0];
    }
    best.converged = done;
    if (!done) break;
  }
  return best;
}

}  // namespace expanderlab
