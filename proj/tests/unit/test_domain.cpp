#include <cmath>
#include <random>

#include "doctest.h"
#include "sfpmc/domain.hpp"
#include "sfpmc/errors.hpp"

using namespace sfpmc;

TEST_CASE("disk boundary geometry") {
  const Domain d = Domain::disk(2.0, Vec2(0.5, -0.25), GridSpec{33, 33, 1});
  const RadialBoundary& b = d.boundary();
  for (double s : {0.0, 1.0, 2.5, 4.0}) {
    CHECK((b.point(s) - Vec2(0.5, -0.25)).norm() == doctest::Approx(2.0));
    CHECK(b.curvature(s) == doctest::Approx(0.5));
    CHECK(b.inner_normal(s).dot(b.point(s) - Vec2(0.5, -0.25)) == doctest::Approx(-2.0));
    CHECK(std::abs(b.tangent(s).dot(b.inner_normal(s))) < 1e-12);
  }
  CHECK(b.area() == doctest::Approx(4.0 * kPi).epsilon(1e-8));
  CHECK(b.level(Vec2(0.5, -0.25)) > 0);
  CHECK(b.level(Vec2(3.0, 0)) < 0);
}

TEST_CASE("grid covers the domain with padding") {
  const Domain d = Domain::ellipse(2.0, 1.0, Vec2::Zero(), GridSpec{41, 41, 2});
  const Grid& g = d.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j : {0, 1, g.ny - 2, g.ny - 1}) CHECK_FALSE(d.inside(g.index(i, j)));
  CHECK(g.h == doctest::Approx(4.0 / 36.0));
}

TEST_CASE("mesh area converges to the domain area") {
  double prev = INFINITY;
  for (int n : {17, 33, 65}) {
    const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{n, n, 1});
    const double err = std::abs(d.mesh().area() - kPi);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("mesh triangles reproduce affine functions") {
  const Domain d = Domain::rounded_square(1.0, 6.0, Vec2(0.1, 0.2), GridSpec{29, 29, 1});
  const Mesh& m = d.mesh();
  const Vec2 g(0.7, -1.3);
  std::vector<double> vv(m.vertices.size());
  for (std::size_t k = 0; k < vv.size(); ++k) vv[k] = 2.0 + g.dot(m.vertices[k].x);
  double volume = 0.0;
  for (const auto& t : m.triangles) {
    CHECK((triangle_gradient(t, vv) - g).norm() < 1e-9);
    CHECK(t.weight > 0);
    volume += t.weight;
  }
  CHECK(volume == doctest::Approx(m.area()));
}

TEST_CASE("vertex volumes partition the mesh area") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{25, 25, 1});
  const Mesh& m = d.mesh();
  double total = 0.0;
  for (double v : m.vertex_volume) total += v;
  CHECK(total == doctest::Approx(m.area()));
}

TEST_CASE("every inside node has a mesh vertex and unknown nodes are interior") {
  const Domain d = Domain::ellipse(1.5, 1.0, Vec2::Zero(), GridSpec{37, 37, 1});
  const Mesh& m = d.mesh();
  const Grid& g = d.grid();
  std::size_t unknown = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!d.inside(k)) {
      CHECK(m.node_vertex[k] == -1);
      continue;
    }
    REQUIRE(m.node_vertex[k] >= 0);
    const auto& v = m.vertices[static_cast<std::size_t>(m.node_vertex[k])];
    CHECK(d.boundary().level(v.x) > 0);
    if (d.kind(k) == NodeKind::interior) {
      CHECK(v.role == Mesh::Role::unknown);
      ++unknown;
    } else {
      CHECK(v.role == Mesh::Role::pinned);
    }
  }
  CHECK(unknown == d.unknown_count());
}

TEST_CASE("foot points lie on the boundary") {
  const Domain d = Domain::ellipse(1.5, 1.0, Vec2::Zero(), GridSpec{37, 37, 1});
  for (const auto& v : d.mesh().vertices)
    if (v.role == Mesh::Role::foot) CHECK(std::abs(d.boundary().level(v.x)) < 1e-10);
}

TEST_CASE("mesh is symmetric under quarter turns of a centred disk") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{31, 31, 1});
  const Grid& g = d.grid();
  const Mesh& m = d.mesh();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t a = g.index(i, j), b = g.index(g.nx - 1 - j, i);
      CHECK(d.inside(a) == d.inside(b));
      if (d.inside(a) && m.node_vertex[a] >= 0 && m.node_vertex[b] >= 0)
        CHECK(m.vertex_volume[static_cast<std::size_t>(m.node_vertex[a])] ==
              doctest::Approx(m.vertex_volume[static_cast<std::size_t>(m.node_vertex[b])]).epsilon(1e-9));
    }
}

TEST_CASE("domain parameter errors") {
  CHECK_THROWS_AS(Domain::disk(-1.0, Vec2::Zero(), GridSpec{}), ParameterError);
  CHECK_THROWS_AS(Domain::rounded_square(1.0, 2.0, Vec2::Zero(), GridSpec{}), ParameterError);
  CHECK_THROWS_AS(Domain::disk(1.0, Vec2::Zero(), GridSpec{2, 2, 0}), ParameterError);
  CHECK_THROWS_AS(Domain::radial({1.0, -1.0, 1.0, 1.0}, Vec2::Zero(), GridSpec{}), ValidationError);
}

TEST_CASE("body ball of the Euclidean disk is the disk") {
  const Domain d = Domain::body_ball(ConvexBody::disk(1.0), 2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  for (double s : {0.0, 0.9, 3.3}) CHECK(d.boundary().point(s).norm() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sample fills inside nodes and leaves NaN outside") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{17, 17, 1});
  const ScalarField f = d.sample([](const Vec2& z) { return z.x(); });
  for (std::size_t k = 0; k < f.values.size(); ++k) CHECK(std::isnan(f[k]) == !d.inside(k));
}
