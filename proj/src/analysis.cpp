#include "sfpmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfpmc/errors.hpp"

namespace sfpmc {

namespace {

double grid_h(const ScalarField& u) { return u.grid.h; }

}  // namespace

std::vector<Vec2> recovered_gradient(const Domain& domain, const ScalarField& u, const ScalarFn& boundary) {
  const Mesh& m = domain.mesh();
  const std::vector<double> vv = vertex_values(domain, u, boundary);
  std::vector<Vec2> acc(m.vertices.size(), Vec2::Zero());
  std::vector<double> wsum(m.vertices.size(), 0.0);
  for (const auto& t : m.triangles) {
    const Vec2 g = triangle_gradient(t, vv);
    for (int q = 0; q < 3; ++q) {
      acc[t.v[q]] += t.weight * g;
      wsum[t.v[q]] += t.weight;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vec2> out(u.grid.size(), Vec2(nan, nan));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto v = m.node_vertex[k];
    if (v >= 0 && wsum[v] > 0) out[k] = acc[v] / wsum[v];
  }
  return out;
}

SingularSetMask singular_set(const Domain& domain, const ScalarField& u, const ScalarFn& boundary,
                             const VectorFn& F, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be nonnegative");
  const Mesh& m = domain.mesh();
  const Grid& g = domain.grid();
  const std::vector<Vec2> grad = recovered_gradient(domain, u, boundary);
  SingularSetMask s;
  s.tau = tau;
  s.mask.assign(g.size(), 0);
  double marked = 0.0, total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto v = m.node_vertex[k];
    if (v < 0 || !grad[k].allFinite()) continue;
    total += m.vertex_volume[v];
    if ((grad[k] + F(g.node(k))).norm() <= tau) {
      s.mask[k] = 1;
      ++s.count;
      marked += m.vertex_volume[v];
    }
  }
  s.area_fraction = total > 0 ? marked / total : 0.0;
  return s;
}

double lipschitz_norm(const ScalarField& u) {
  const Grid& g = u.grid;
  const double h = grid_h(u);
  double best = 0.0;
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double c[2][2] = {{u.at(i, j), u.at(i, j + 1)}, {u.at(i + 1, j), u.at(i + 1, j + 1)}};
      // Corner triangles: right angle at (a, b), legs along x and y.
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double v0 = c[a][b], vx = c[1 - a][b], vy = c[a][1 - b];
          if (!std::isfinite(v0) || !std::isfinite(vx) || !std::isfinite(vy)) continue;
          best = std::max(best, std::hypot(vx - v0, vy - v0) / h);
        }
      }
    }
  }
  return best;
}

double default_singular_tau(const ScalarField& u) { return 5.0 * grid_h(u) * (1.0 + lipschitz_norm(u)); }

double barrier_slope_threshold(const ProblemSpec& problem) {
  const Grid& g = problem.domain->grid();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (problem.domain->inside(k)) s = std::max(s, dual_norm(problem.body, -problem.F(g.node(k))));
  return s;
}

BarrierReport barrier_check(const ProblemSpec& problem, const SolverConfig& config, const DistanceField& dist,
                            double k, double mu) {
  const double thr = barrier_slope_threshold(problem);
  if (!(k > thr)) throw ParameterError("barrier slope must exceed sup ||-F||_*");
  if (!(mu > 0.0)) throw ParameterError("tube width must be positive");
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  const DiscreteFunctional fn = make_functional(problem, config.epsilon, config.eta, 1.0);

  ScalarField wp(dom.grid(), std::numeric_limits<double>::quiet_NaN()), wm = wp;
  for (std::size_t n = 0; n < dom.grid().size(); ++n) {
    if (!dom.inside(n)) continue;
    const double ph = problem.phi(dom.grid().node(n));
    wp[n] = k * dist.values[n] + ph;
    wm[n] = -k * dist.values[n] + ph;
  }
  const Eigen::VectorXd rp = fn.residual(fn.restrict(wp));
  const Eigen::VectorXd rm = fn.residual(fn.restrict(wm));

  BarrierReport rep;
  rep.k = k;
  rep.mu = mu;
  double maxp = -std::numeric_limits<double>::infinity(), minm = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < fn.size(); ++q) {
    const auto v = m.unknown_vertex[q];
    const auto node = static_cast<std::size_t>(m.vertices[v].node);
    if (m.boundary_adjacent[v] || dist.ridge_mask[node] || !(dist.values[node] < mu)) continue;
    ++rep.tube_nodes;
    maxp = std::max(maxp, rp[static_cast<Eigen::Index>(q)]);
    minm = std::min(minm, rm[static_cast<Eigen::Index>(q)]);
  }
  if (rep.tube_nodes == 0) return rep;
  rep.upper_margin = -maxp;
  rep.lower_margin = minm;
  rep.pass = rep.upper_margin > 0 && rep.lower_margin > 0;
  return rep;
}

BarrierReport find_barrier_slope(const ProblemSpec& problem, const SolverConfig& config,
                                 const DistanceField& dist, double mu, double k_max) {
  const double k0 = barrier_slope_threshold(problem) + 1.0;
  BarrierReport last;
  for (double k = k0; k <= k_max; k *= 2.0) {
    last = barrier_check(problem, config, dist, k, mu);
    if (last.pass) return last;
  }
  return last;
}

double check_gradient_max_principle(double sup_interior, double sup_boundary, double sup_f) {
  return sup_interior - sup_boundary - 2.0 * sup_f;
}

GradientBound check_gradient_max_principle(const ProblemSpec& problem, const ScalarField& u) {
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  const std::vector<Vec2> grad = recovered_gradient(dom, u, problem.phi);
  GradientBound b;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const auto v = m.node_vertex[k];
    if (v < 0 || !grad[k].allFinite()) continue;
    const double s = grad[k].norm();
    b.sup_interior = std::max(b.sup_interior, s);
    if (m.boundary_adjacent[v] || m.vertices[v].role != Mesh::Role::unknown) b.sup_boundary = std::max(b.sup_boundary, s);
    b.sup_f = std::max(b.sup_f, problem.f(dom.grid().node(k)).norm());
  }
  b.margin = check_gradient_max_principle(b.sup_interior, b.sup_boundary, b.sup_f);
  return b;
}

HeightAudit height_audit(const ProblemSpec& problem, const ScalarField& u, const DistanceField& dist, double k) {
  HeightAudit a;
  a.k = k;
  for (std::size_t n = 0; n < u.values.size(); ++n) {
    if (std::isfinite(u[n])) a.sup_u = std::max(a.sup_u, std::abs(u[n]));
    if (std::isfinite(dist.values[n])) a.max_d = std::max(a.max_d, dist.values[n]);
  }
  const RadialBoundary& bd = problem.domain->boundary();
  constexpr int kSamples = 4096;
  for (int i = 0; i < kSamples; ++i)
    a.sup_phi = std::max(a.sup_phi, std::abs(problem.phi(bd.point(kTwoPi * i / kSamples))));
  a.bound = a.sup_phi + k * a.max_d;
  a.pass = a.sup_u <= a.bound * (1.0 + 1e-12);
  return a;
}

double weak_residual(const ProblemSpec& problem, const ScalarField& u, const ScalarField& testfield, double tau) {
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  const std::vector<double> uv = vertex_values(dom, u, problem.phi);
  const std::vector<double> tv = vertex_values(dom, testfield, [](const Vec2&) { return 0.0; });
  double total = 0.0;
  for (const auto& t : m.triangles) {
    const Vec2 gv = triangle_gradient(t, tv);
    const double mv = triangle_mean(t, tv);
    if (gv.squaredNorm() == 0.0 && mv == 0.0) continue;
    const Vec2 q = triangle_gradient(t, uv) + problem.F(t.centroid);
    double term = q.norm() <= tau ? dual_norm(problem.body, gv) : project(problem.body, q).dot(gv);
    term += problem.H(t.centroid) * mv;
    total += t.weight * term;
  }
  return total;
}

WeakResidualAudit weak_residual_audit(const ProblemSpec& problem, const ScalarField& u,
                                      const std::vector<TestField>& basket, double tau) {
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  WeakResidualAudit a;
  a.min_value = std::numeric_limits<double>::infinity();
  for (const auto& f : basket) {
    const std::vector<double> tv = vertex_values(dom, f.values, [](const Vec2&) { return 0.0; });
    double mass = 0.0;
    for (const auto& t : m.triangles) mass += t.weight * dual_norm(problem.body, triangle_gradient(t, tv));
    if (!(mass > 0)) continue;
    ScalarField v = f.values;
    for (double& x : v.values) x /= mass;
    for (double sign : {1.0, -1.0}) {
      ScalarField s = v;
      for (double& x : s.values) x *= sign;
      const double r = weak_residual(problem, u, s, tau);
      if (r < a.min_value) {
        a.min_value = r;
        a.worst_field = (sign > 0 ? "+" : "-") + f.label;
      }
    }
    ++a.fields;
  }
  if (a.fields == 0) a.min_value = 0.0;
  return a;
}

}  // namespace sfpmc
