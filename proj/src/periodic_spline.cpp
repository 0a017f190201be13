#include "sfpmc/periodic_spline.hpp"

#include <cmath>

#include "sfpmc/errors.hpp"
#include "sfpmc/types.hpp"

namespace sfpmc {

PeriodicSpline::PeriodicSpline(std::vector<double> samples) : y_(std::move(samples)) {
  const std::size_t n = y_.size();
  if (n < 4) throw ParameterError("periodic spline needs at least 4 samples");
  dx_ = kTwoPi / static_cast<double>(n);

  // Cyclic system M[k-1] + 4 M[k] + M[k+1] = 6 (y[k+1] - 2 y[k] + y[k-1]) / dx^2.
  // Strict diagonal dominance makes Gauss-Seidel contract by at least 1/2 per pass.
  std::vector<double> rhs(n);
  double scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ym = y_[(k + n - 1) % n], yp = y_[(k + 1) % n];
    rhs[k] = 6.0 * (yp - 2.0 * y_[k] + ym) / (dx_ * dx_);
    scale = std::max(scale, std::abs(rhs[k]));
  }
  m_.assign(n, 0.0);
  if (scale == 0.0) return;
  for (int pass = 0; pass < 400; ++pass) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double next = (rhs[k] - m_[(k + n - 1) % n] - m_[(k + 1) % n]) / 4.0;
      change = std::max(change, std::abs(next - m_[k]));
      m_[k] = next;
    }
    if (change <= 1e-16 * scale) break;
  }
}

PeriodicSpline::Value PeriodicSpline::eval(double theta) const {
  const std::size_t n = y_.size();
  const double x = wrap_angle(theta) / dx_;
  std::size_t k = static_cast<std::size_t>(std::floor(x));
  if (k >= n) k = n - 1;
  const double t = (x - static_cast<double>(k)) * dx_;
  const double s = dx_ - t;
  const std::size_t k1 = (k + 1) % n;
  const double mk = m_[k], m1 = m_[k1];
  const double a = y_[k] / dx_ - mk * dx_ / 6.0;
  const double b = y_[k1] / dx_ - m1 * dx_ / 6.0;
  Value v;
  v.f = mk * s * s * s / (6.0 * dx_) + m1 * t * t * t / (6.0 * dx_) + a * s + b * t;
  v.df = -mk * s * s / (2.0 * dx_) + m1 * t * t / (2.0 * dx_) - a + b;
  v.d2f = (mk * s + m1 * t) / dx_;
  return v;
}

}  // namespace sfpmc
