#pragma once

#include <vector>

namespace sfpmc {

/// Periodic cubic interpolating spline on a uniform grid over [0, 2pi).
class PeriodicSpline {
 public:
  struct Value {
    double f, df, d2f;
  };

  PeriodicSpline() = default;
  explicit PeriodicSpline(std::vector<double> samples);

  Value eval(double theta) const;
  double operator()(double theta) const { return eval(theta).f; }

  const std::vector<double>& samples() const { return y_; }
  /// Spline second derivative at the knots.
  const std::vector<double>& knot_second_derivatives() const { return m_; }
  std::size_t size() const { return y_.size(); }
  double spacing() const { return dx_; }

 private:
  std::vector<double> y_;
  std::vector<double> m_;
  double dx_ = 0.0;
};

}  // namespace sfpmc
