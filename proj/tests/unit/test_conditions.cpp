#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sfpmc/conditions.hpp"
#include "sfpmc/errors.hpp"

using namespace sfpmc;

TEST_CASE("anisotropic curvature of a circle") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  for (double s : {0.0, 0.4, 2.0, 5.0})
    CHECK(boundary_finsler_curvature(ConvexBody::disk(1.0), d, s) == doctest::Approx(0.5).epsilon(1e-9));
  Mat2 A;
  A << 4, 1, 1, 2;
  const ConvexBody K = ConvexBody::ellipse(A);
  for (double s : {0.0, 0.4, 2.0, 5.0}) {
    const Vec2 N = -d.boundary().point(s).normalized();
    CHECK(boundary_finsler_curvature(K, d, s) ==
          doctest::Approx(oracle::circle_ellipse_curvature(A, 2.0, N)).epsilon(1e-6));
  }
}

TEST_CASE("curvature condition on the radius-2 disk") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  const ConvexBody K = ConvexBody::disk(1.0);
  const auto pass = check_curvature_condition(K, d, 0.3);
  CHECK(pass.curvcond_pass);
  CHECK(pass.curvcond_margin == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(pass.c3 == doctest::Approx(0.2 / 3));
  const auto edge = check_curvature_condition(K, d, 0.5);
  CHECK_FALSE(edge.curvcond_pass);
  CHECK(std::abs(edge.curvcond_margin) < 1e-9);
  CHECK_FALSE(check_curvature_condition(K, d, -0.7).curvcond_pass);
}

TEST_CASE("parallel curvature and focal points") {
  CHECK(parallel_curvature({0.5}, 0.0) == doctest::Approx(0.5));
  CHECK(parallel_curvature({0.5}, 1.0) == doctest::Approx(1.0));
  CHECK(parallel_curvature({0.5, 0.25}, 1.0) == doctest::Approx(1.0 + 1.0 / 3.0));
  CHECK_THROWS_AS(parallel_curvature({0.5}, 2.0), FocalPointError);
}

TEST_CASE("test-field basket composition") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  const DistanceField dist = finsler_distance(ConvexBody::disk(1.0), d);
  const auto basket = test_field_basket(d, dist, 50, 3);
  REQUIRE(basket.size() == 50);
  std::set<std::string> labels;
  int tents = 0, bumps = 0;
  for (const auto& f : basket) {
    labels.insert(f.label);
    tents += f.label.rfind("tent", 0) == 0;
    bumps += f.label.rfind("bump", 0) == 0;
    for (std::size_t k = 0; k < f.values.values.size(); ++k) {
      if (!d.inside(k)) continue;
      CHECK(f.values[k] >= 0);
      if (d.kind(k) == NodeKind::pinned) CHECK(f.values[k] == 0.0);
    }
  }
  CHECK(labels.size() == 50);
  CHECK(tents == 27);
  CHECK(bumps == 21);
  CHECK(labels.count("d^1") == 1);
  CHECK(labels.count("d^2") == 1);
  // Same seed, same basket.
  const auto again = test_field_basket(d, dist, 50, 3);
  for (std::size_t i = 0; i < basket.size(); ++i) {
    CHECK(again[i].label == basket[i].label);
    const auto& x = again[i].values.values;
    const auto& y = basket[i].values.values;
    REQUIRE(x.size() == y.size());
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(((std::isnan(x[k]) && std::isnan(y[k])) || x[k] == y[k]));
  }
}

TEST_CASE("integral condition") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  const ConvexBody K = ConvexBody::disk(1.0);
  const auto zero = check_integral_condition(K, d, 0.0);
  CHECK(zero.hip_pass);
  CHECK(zero.hip_delta == doctest::Approx(1.0));
  // For v = d on the radius-2 disk: int H d / int |grad d| = H (8 pi / 3) / (4 pi) = 2H / 3.
  const DistanceField dist = finsler_distance(K, d);
  const auto basket = test_field_basket(d, dist, 29, 0);
  const ScalarField& dv = basket[27].values;
  REQUIRE(basket[27].label == "d^1");
  CHECK(integral_ratio(K, d, [](const Vec2&) { return 0.3; }, dv) == doctest::Approx(0.2).epsilon(0.02));
  // The basket only sees ratios up to 2H/3 via d^1, so H = 1.6 is needed to trip it.
  const auto big = check_integral_condition(K, d, [](const Vec2&) { return 1.6; }, basket);
  CHECK_FALSE(big.hip_pass);
  CHECK(big.hip_delta < 0);
}

TEST_CASE("tube bounds on the disk") {
  const Domain d = Domain::disk(2.0, Vec2::Zero(), GridSpec{33, 33, 1});
  const auto t = tube_bounds(ConvexBody::disk(1.0), d, 2.0);
  CHECK(t.kappa_max == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(t.mu0 == doctest::Approx(1.0).epsilon(1e-9));
  // Parallel circle at distance 1 has radius 1: curvature 1.
  CHECK(t.c4 == doctest::Approx(1.0).epsilon(1e-9));
}
