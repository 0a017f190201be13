#include <cmath>

#include "doctest.h"
#include "sfpmc/analysis.hpp"
#include "sfpmc/errors.hpp"

using namespace sfpmc;

namespace {

ProblemSpec disk_problem(int n, double H) {
  ProblemSpec p;
  p.body = ConvexBody::disk(1.0);
  p.domain = std::make_shared<const Domain>(Domain::disk(2.0, Vec2::Zero(), GridSpec{n, n, 1}));
  p.set_constant_H(H);
  return p;
}

const ScalarFn kZero = [](const Vec2&) { return 0.0; };

}  // namespace

TEST_CASE("lipschitz norm of affine fields and scaling") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{21, 21, 1});
  const ScalarField u = d.sample([](const Vec2& z) { return 3.0 * z.x() - 4.0 * z.y(); });
  CHECK(lipschitz_norm(u) == doctest::Approx(5.0).epsilon(1e-12));
  ScalarField v = u;
  for (double& x : v.values) x *= -2.5;
  CHECK(lipschitz_norm(v) == doctest::Approx(2.5 * lipschitz_norm(u)));
}

TEST_CASE("lipschitz norm of the disk distance is about one") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{41, 41, 1});
  const DistanceField f = finsler_distance(ConvexBody::disk(1.0), d);
  CHECK(lipschitz_norm(f.values) == doctest::Approx(1.0).epsilon(2 * d.grid().h));
}

TEST_CASE("singular set of the field alone is a disk of radius tau") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{41, 41, 1});
  const ScalarField u = d.sample([](const Vec2&) { return 0.0; });
  const double h = d.grid().h;
  const VectorFn F = [](const Vec2& z) { return Vec2(-z.y(), z.x()); };
  const SingularSetMask s = singular_set(d, u, kZero, F, 2.5 * h);
  const Grid& g = d.grid();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (d.inside(k)) CHECK(static_cast<bool>(s.mask[k]) == (g.node(k).norm() <= 2.5 * h + 1e-12));
  CHECK(s.count > 0);
  const VectorFn none = [](const Vec2&) { return Vec2(0, 0); };
  const ScalarField affine = d.sample([](const Vec2& z) { return z.x() + z.y(); });
  CHECK(singular_set(d, affine, [](const Vec2& z) { return z.x() + z.y(); }, none, 0.1).count == 0);
  CHECK(singular_set(d, u, kZero, F, 0.0).count <= 1);
}

TEST_CASE("gradient max principle margin") {
  CHECK(check_gradient_max_principle(2.0, 2.0, 0.5) == doctest::Approx(-1.0));
  ProblemSpec p = disk_problem(21, 0.0);
  p.phi = [](const Vec2& z) { return 0.5 * z.x() + 0.2 * z.y(); };
  const ScalarField u = p.domain->sample(p.phi);
  const GradientBound b = check_gradient_max_principle(p, u);
  CHECK(b.sup_interior == doctest::Approx(b.sup_boundary));
  CHECK(b.margin == doctest::Approx(-2.0 * b.sup_f));
}

TEST_CASE("barrier check on the H = 0.3 disk") {
  ProblemSpec p = disk_problem(33, 0.3);
  SolverConfig c;
  c.epsilon = 1e-3;
  c.eta = 1e-3;
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  CHECK(barrier_slope_threshold(p) == doctest::Approx(2.0).epsilon(0.05));
  CHECK_THROWS_AS(barrier_check(p, c, dist, 1.0, 0.2), ParameterError);
  const BarrierReport r = find_barrier_slope(p, c, dist, 0.2);
  CHECK(r.pass);
  CHECK(r.upper_margin > 0);
  CHECK(r.lower_margin > 0);
  CHECK(r.tube_nodes > 0);
}

TEST_CASE("w+ = k d is a subsolution for H = 0 and zero data") {
  ProblemSpec p = disk_problem(33, 0.0);
  p.set_zero_field();
  SolverConfig c;
  c.epsilon = 1e-3;
  c.eta = 1e-3;
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  for (double k : {0.5, 2.0, 50.0}) {
    const BarrierReport r = barrier_check(p, c, dist, k, 0.5);
    CHECK(r.upper_margin > 0);
  }
}

TEST_CASE("barrier sweep fails when the curvature condition fails") {
  ProblemSpec p = disk_problem(33, 0.8);
  p.set_zero_field();
  SolverConfig c;
  c.epsilon = 1e-3;
  c.eta = 1e-3;
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  CHECK_FALSE(find_barrier_slope(p, c, dist, 0.2, 1000.0).pass);
}

TEST_CASE("weak residual basics") {
  ProblemSpec p = disk_problem(25, 0.0);
  p.set_zero_field();
  p.phi = [](const Vec2& z) { return 0.4 * z.x() - 0.3 * z.y(); };
  const ScalarField u = p.domain->sample(p.phi);
  const ScalarField zero = p.domain->sample([](const Vec2&) { return 0.0; });
  CHECK(weak_residual(p, u, zero, 0.01) == 0.0);
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  for (const auto& f : test_field_basket(*p.domain, dist, 20, 1))
    CHECK(std::abs(weak_residual(p, u, f.values, 0.01)) < 1e-12);
}

TEST_CASE("weak residual detects a corrupted solution") {
  ProblemSpec p = disk_problem(33, 0.3);
  SolverConfig c;
  const SolveResult r = continuation_solve(p, c);
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  const auto basket = test_field_basket(*p.domain, dist, 50, 0);
  const double tau = default_singular_tau(r.u);
  const WeakResidualAudit good = weak_residual_audit(p, r.u, basket, tau);
  CHECK(good.fields == 50);
  CHECK(good.min_value >= -1e-3);
  ScalarField bad = r.u;
  const Grid& g = p.domain->grid();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (p.domain->kind(k) == NodeKind::interior) {
      const double q = 1.0 - (g.node(k) - Vec2(0.5, 0.3)).squaredNorm();
      if (q > 0) bad[k] += 2.0 * q * q;
    }
  CHECK(weak_residual_audit(p, bad, basket, tau).min_value < -1e-2);
}

TEST_CASE("height audit") {
  ProblemSpec p = disk_problem(21, 0.3);
  const DistanceField dist = finsler_distance(p.body, *p.domain);
  ScalarField u = p.domain->sample([](const Vec2&) { return -0.4; });
  const HeightAudit a = height_audit(p, u, dist, 3.0);
  CHECK(a.sup_u == doctest::Approx(0.4));
  CHECK(a.sup_phi == 0.0);
  CHECK(a.bound == doctest::Approx(3.0 * a.max_d));
  CHECK(a.pass);
  CHECK_FALSE(height_audit(p, u, dist, 0.01).pass);
}
