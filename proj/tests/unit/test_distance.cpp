#include <cmath>

#include "doctest.h"
#include "sfpmc/distance.hpp"
#include "sfpmc/errors.hpp"

using namespace sfpmc;

TEST_CASE("Euclidean distance on the unit disk") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{41, 41, 1});
  const DistanceField f = finsler_distance(ConvexBody::disk(1.0), d);
  const Grid& g = d.grid();
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (d.inside(k)) err = std::max(err, std::abs(f.values[k] - (1.0 - g.node(k).norm())));
  CHECK(err <= 3 * g.h);
  const std::size_t c = g.index(20, 20);
  CHECK(f.ridge_mask[c] == 1);
}

TEST_CASE("gauge distance on a ball of an ellipse body") {
  Mat2 A;
  A << 4, 0, 0, 1;
  const ConvexBody K = ConvexBody::ellipse(A);
  const Domain d = Domain::body_ball(K, 1.0, Vec2::Zero(), GridSpec{67, 35, 1});
  const DistanceField f = finsler_distance(K, d);
  const Grid& g = d.grid();
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (d.inside(k)) err = std::max(err, std::abs(f.values[k] - (1.0 - gauge(K, g.node(k)))));
  CHECK(err <= 3 * g.h);
}

TEST_CASE("direct boundary minimisation on the disk") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{17, 17, 1});
  const auto [dist, s] = boundary_distance(ConvexBody::disk(1.0), d, Vec2(0.6, 0.8));
  CHECK(dist == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((d.boundary().point(s) - Vec2(1.2, 1.6)).norm() < 1e-6);
}

TEST_CASE("distance for an asymmetric body is measured from the point to the boundary") {
  // K = disk of radius 1 shifted by (0.5, 0): ||v||_K is not even, so d uses p - q.
  const ConvexBody K = ConvexBody::from_support_function([](double t) { return 1.0 + 0.5 * std::cos(t); }, 512);
  REQUIRE(K.valid());
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{17, 17, 1});
  const auto [dist, s] = boundary_distance(K, d, Vec2::Zero());
  // min over |q| = 1 of ||-q||_K; ||(-1, 0)||_K = 1 / 0.5 = 2 and ||(1, 0)||_K = 1 / 1.5.
  CHECK(dist == doctest::Approx(1.0 / 1.5).epsilon(1e-6));
  CHECK(d.boundary().point(s).x() == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("ridge of a rounded square follows the diagonals") {
  const Domain d = Domain::rounded_square(1.0, 8.0, Vec2::Zero(), GridSpec{41, 41, 1});
  const DistanceField f = finsler_distance(ConvexBody::disk(1.0), d);
  const Grid& g = d.grid();
  int ridge = 0, near_diagonal = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!f.ridge_mask[k]) continue;
    ++ridge;
    const Vec2 z = g.node(k);
    if (std::min(std::abs(std::abs(z.x()) - std::abs(z.y())), std::min(std::abs(z.x()), std::abs(z.y()))) < 3 * g.h)
      ++near_diagonal;
  }
  CHECK(ridge > 10);
  CHECK(near_diagonal >= 0.8 * ridge);
}

TEST_CASE("distance values are nonnegative and 1-Lipschitz for the gauge") {
  const ConvexBody K = ConvexBody::from_support_function(
      [](double t) { return 1.0 + 0.1 * std::cos(3 * t) + 0.05 * std::sin(t); }, 512);
  const Domain d = Domain::ellipse(1.5, 1.0, Vec2::Zero(), GridSpec{41, 41, 1});
  const DistanceField f = finsler_distance(K, d);
  const Grid& g = d.grid();
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const std::size_t a = g.index(i, j);
      if (!d.inside(a)) continue;
      CHECK(f.values[a] >= 0);
      for (const std::size_t b : {g.index(i + 1, j), g.index(i, j + 1)}) {
        if (!d.inside(b)) continue;
        // d(p) <= d(q) + ||p - q||_K.
        CHECK(f.values[a] <= f.values[b] + gauge(K, g.node(a) - g.node(b)) + 1e-9);
        CHECK(f.values[b] <= f.values[a] + gauge(K, g.node(b) - g.node(a)) + 1e-9);
      }
    }
}

TEST_CASE("sweep cap raises IterationError") {
  const Domain d = Domain::disk(1.0, Vec2::Zero(), GridSpec{33, 33, 1});
  DistanceOptions opt;
  opt.max_iterations = 1;
  opt.band_layers = 0;
  CHECK_THROWS_AS(finsler_distance(ConvexBody::disk(1.0), d, opt), IterationError);
}
