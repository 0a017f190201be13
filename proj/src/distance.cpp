#include "sfpmc/distance.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "sfpmc/errors.hpp"

namespace sfpmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundarySamples {
  std::vector<double> s;
  std::vector<Vec2> x;

  BoundarySamples(const RadialBoundary& b, int n) : s(static_cast<std::size_t>(n)), x(static_cast<std::size_t>(n)) {
    for (int k = 0; k < n; ++k) {
      s[static_cast<std::size_t>(k)] = kTwoPi * k / n;
      x[static_cast<std::size_t>(k)] = b.point(s[static_cast<std::size_t>(k)]);
    }
  }

  std::pair<double, double> nearest(const ConvexBody& body, const RadialBoundary& b, const Vec2& p) const {
    const std::size_t n = s.size();
    std::size_t best = 0;
    double dbest = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = gauge(body, p - x[k]);
      if (v < dbest) {
        dbest = v;
        best = k;
      }
    }
    const double ds = kTwoPi / static_cast<double>(n);
    auto f = [&](double t) { return gauge(body, p - b.point(t)); };
    const auto r = boost::math::tools::brent_find_minima(f, s[best] - ds, s[best] + ds, 50);
    if (r.second < dbest) return {r.second, wrap_angle(r.first)};
    return {dbest, s[best]};
  }
};

// Non-uniform three-point derivative from arms of length am (behind) and ap (ahead).
double central(double vm, double u, double vp, double am, double ap) {
  return (am * am * (vp - u) + ap * ap * (u - vm)) / (am * ap * (am + ap));
}

}  // namespace

std::pair<double, double> boundary_distance(const ConvexBody& body, const Domain& domain, const Vec2& p,
                                            int samples) {
  body.require_valid();
  if (samples < 8) throw ParameterError("boundary sample count too small");
  BoundarySamples bs(domain.boundary(), samples);
  return bs.nearest(body, domain.boundary(), p);
}

DistanceField finsler_distance(const ConvexBody& body, const Domain& domain, const DistanceOptions& opt) {
  body.require_valid();
  const Grid& g = domain.grid();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> d(g.size(), kInf);
  std::vector<std::uint8_t> fixed(g.size(), 0);

  BoundarySamples bs(domain.boundary(), opt.boundary_samples);
  const int L = std::max(1, opt.band_layers);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!domain.inside(idx)) continue;
      bool band = false;
      for (int jj = std::max(0, j - L); jj <= std::min(g.ny - 1, j + L) && !band; ++jj)
        for (int ii = std::max(0, i - L); ii <= std::min(g.nx - 1, i + L) && !band; ++ii)
          band = !domain.inside(g.index(ii, jj));
      if (!band) continue;
      d[idx] = bs.nearest(body, domain.boundary(), g.node(i, j)).first;
      fixed[idx] = 1;
    }
  }

  const double c_lower = body.validation().gauge_equivalence.first * g.h / std::sqrt(2.0);
  auto update = [&](int i, int j) -> double {
    const std::size_t idx = g.index(i, j);
    const Vec2 p = g.node(i, j);
    double best = d[idx];
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        const std::size_t ia = g.index(i + sx, j), ib = g.index(i, j + sy);
        const double da = d[ia], db = d[ib];
        if (da == kInf && db == kInf) continue;
        if (std::min(da, db) + c_lower >= best) continue;
        const Vec2 xa = g.node(i + sx, j), xb = g.node(i, j + sy);
        if (da == kInf || db == kInf) {
          const double v = (da == kInf) ? db + gauge(body, p - xb) : da + gauge(body, p - xa);
          best = std::min(best, v);
          continue;
        }
        auto phi = [&](double t) { return (1.0 - t) * da + t * db + gauge(body, p - (xa + t * (xb - xa))); };
        const auto r = boost::math::tools::brent_find_minima(phi, 0.0, 1.0, 40);
        best = std::min({best, r.second, phi(0.0), phi(1.0)});
      }
    }
    const double change = (d[idx] == kInf) ? kInf : d[idx] - best;
    d[idx] = best;
    return change;
  };

  DistanceField out;
  double last = kInf;
  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    double change = 0.0;
    for (int order = 0; order < 4; ++order) {
      const bool rev_i = order & 1, rev_j = order & 2;
      for (int jj = 0; jj < g.ny; ++jj) {
        const int j = rev_j ? g.ny - 1 - jj : jj;
        for (int ii = 0; ii < g.nx; ++ii) {
          const int i = rev_i ? g.nx - 1 - ii : ii;
          const std::size_t idx = g.index(i, j);
          if (!domain.inside(idx) || fixed[idx]) continue;
          change = std::max(change, update(i, j));
        }
      }
    }
    last = change;
    if (change < opt.tolerance) break;
  }
  if (iter == opt.max_iterations)
    throw IterationError("distance sweeps did not converge", last);

  out.iterations = iter + 1;
  out.values = ScalarField(g, nan);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (domain.inside(k)) out.values[k] = d[k];
  detect_ridge(body, domain, out, opt.ridge_factor);
  return out;
}

std::vector<std::uint8_t> detect_ridge(const ConvexBody& body, const Domain& domain, DistanceField& dist,
                                       double factor) {
  const Grid& g = domain.grid();
  if (!(dist.values.grid == g)) throw DimensionError("distance field grid does not match the domain");
  dist.threshold = factor * g.h;
  dist.residual = ScalarField(g, std::numeric_limits<double>::quiet_NaN());
  dist.ridge_mask.assign(g.size(), 0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!domain.inside(idx)) continue;
      const double u = dist.values[idx];
      double v[4], a[4];
      for (int dir = 0; dir < 4; ++dir) {
        const Arm& arm = domain.arm(idx, dir);
        a[dir] = arm.frac * g.h;
        v[dir] = arm.cut ? 0.0 : dist.values[g.index(i + kArmDirs[dir][0], j + kArmDirs[dir][1])];
      }
      const Vec2 grad{central(v[2], u, v[0], a[2], a[0]), central(v[3], u, v[1], a[3], a[1])};
      const Vec2 jump{(v[0] - u) / a[0] - (u - v[2]) / a[2], (v[1] - u) / a[1] - (u - v[3]) / a[3]};
      const double res = std::abs(dual_norm(body, grad) - 1.0);
      const double kink = 0.5 * (dual_norm(body, jump) + dual_norm(body, -jump));
      dist.residual[idx] = res;
      dist.ridge_mask[idx] = (res > dist.threshold || kink > dist.threshold) ? 1 : 0;
    }
  }
  return dist.ridge_mask;
}

}  // namespace sfpmc
