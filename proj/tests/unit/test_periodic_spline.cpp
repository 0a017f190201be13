#include <cmath>
#include <vector>

#include "doctest.h"
#include "sfpmc/periodic_spline.hpp"
#include "sfpmc/types.hpp"

using namespace sfpmc;

TEST_CASE("spline interpolates its knots") {
  std::vector<double> y(37);
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::sin(3.0 * k) + 0.2 * static_cast<double>(k % 5);
  const PeriodicSpline s(y);
  for (std::size_t k = 0; k < y.size(); ++k) CHECK(s(kTwoPi * k / y.size()) == doctest::Approx(y[k]).epsilon(1e-12));
}

TEST_CASE("spline reproduces trigonometric data with derivatives") {
  const int n = 256;
  std::vector<double> y(n);
  for (int k = 0; k < n; ++k) y[k] = 2.0 + std::cos(2.0 * kTwoPi * k / n) + 0.5 * std::sin(kTwoPi * k / n);
  const PeriodicSpline s(y);
  for (double t : {0.1, 1.3, 2.7, 4.4, 6.2}) {
    const auto v = s.eval(t);
    CHECK(v.f == doctest::Approx(2.0 + std::cos(2 * t) + 0.5 * std::sin(t)).epsilon(1e-7));
    CHECK(v.df == doctest::Approx(-2 * std::sin(2 * t) + 0.5 * std::cos(t)).epsilon(1e-5));
    CHECK(v.d2f == doctest::Approx(-4 * std::cos(2 * t) - 0.5 * std::sin(t)).epsilon(1e-3));
  }
}

TEST_CASE("spline is periodic") {
  std::vector<double> y{1.0, 2.0, 0.5, 1.5, 3.0, 1.0};
  const PeriodicSpline s(y);
  for (double t : {0.3, 1.9, 5.5}) {
    CHECK(s(t) == doctest::Approx(s(t + kTwoPi)));
    CHECK(s(t) == doctest::Approx(s(t - 2 * kTwoPi)));
  }
}

TEST_CASE("constant data gives a constant spline") {
  const PeriodicSpline s(std::vector<double>(16, 4.25));
  for (double t : {0.0, 0.7, 3.0}) {
    const auto v = s.eval(t);
    CHECK(v.f == doctest::Approx(4.25));
    CHECK(std::abs(v.df) < 1e-12);
    CHECK(std::abs(v.d2f) < 1e-12);
  }
}
