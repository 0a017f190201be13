#include "sfpmc/convex_body.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "sfpmc/errors.hpp"

namespace sfpmc {

ConvexBody ConvexBody::ellipse(const Mat2& A, double margin) {
  ConvexBody b;
  b.kind_ = Kind::ellipse;
  b.A_ = A;
  b.validate(margin);
  if (b.valid()) b.A_inv_ = A.inverse();
  return b;
}

ConvexBody ConvexBody::disk(double radius) {
  return ellipse(radius * radius * Mat2::Identity());
}

ConvexBody ConvexBody::from_support_samples(std::vector<double> samples, double margin) {
  ConvexBody b;
  b.kind_ = Kind::support_function;
  b.h_ = PeriodicSpline(std::move(samples));
  b.validate(margin);
  return b;
}

ConvexBody ConvexBody::from_support_function(const std::function<double(double)>& h, int count,
                                             double margin) {
  if (count < 4) throw ParameterError("support table needs at least 4 samples");
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) s[static_cast<std::size_t>(k)] = h(kTwoPi * k / count);
  return from_support_samples(std::move(s), margin);
}

ConvexBody ConvexBody::scaled(double lambda) const {
  if (!(lambda > 0)) throw ParameterError("scale factor must be positive");
  if (kind_ == Kind::ellipse) return ellipse(lambda * lambda * A_);
  std::vector<double> s = h_.samples();
  for (double& v : s) v *= lambda;
  return from_support_samples(std::move(s));
}

void ConvexBody::validate(double margin) {
  BodyValidation& v = validation_;
  v = BodyValidation{};
  if (kind_ == Kind::ellipse) {
    if (!A_.allFinite()) {
      v.failure_reason = "matrix has non-finite entries";
      return;
    }
    if (std::abs(A_(0, 1) - A_(1, 0)) > 1e-12 * (1.0 + A_.cwiseAbs().maxCoeff())) {
      v.failure_reason = "matrix not symmetric";
      return;
    }
    Eigen::SelfAdjointEigenSolver<Mat2> es(A_);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
    v.min_curvature = lo;
    if (!(lo > margin)) {
      v.failure_reason = "matrix not positive definite";
      return;
    }
    v.norm_equivalence = {std::sqrt(lo), std::sqrt(hi)};
    v.gauge_equivalence = {1.0 / std::sqrt(hi), 1.0 / std::sqrt(lo)};
    v.is_valid = true;
    return;
  }

  const auto& y = h_.samples();
  const auto& m = h_.knot_second_derivatives();
  double min_h = std::numeric_limits<double>::infinity();
  double min_r = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (!std::isfinite(y[k])) {
      v.failure_reason = "support samples not finite";
      return;
    }
    min_h = std::min(min_h, y[k]);
    min_r = std::min(min_r, y[k] + m[k]);
  }
  v.min_curvature = min_r;
  if (!(min_h > margin)) {
    v.failure_reason = "origin not interior";
    return;
  }
  if (!(min_r > margin)) {
    v.failure_reason = "not C2+";
    return;
  }
  // Dense evaluation catches extrema of h between knots.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const int dense = static_cast<int>(8 * y.size());
  for (int k = 0; k < dense; ++k) {
    const double hv = h_(kTwoPi * k / dense);
    lo = std::min(lo, hv);
    hi = std::max(hi, hv);
  }
  if (!(lo > 0)) {
    v.failure_reason = "origin not interior";
    return;
  }
  v.norm_equivalence = {lo, hi};
  v.gauge_equivalence = {1.0 / hi, 1.0 / lo};

  const std::size_t n = y.size();
  boundary_angle_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double th = h_.spacing() * static_cast<double>(k % n);
    const auto s = h_.eval(th);
    const Vec2 nn = unit_at(th), t{-nn.y(), nn.x()};
    const Vec2 x = s.df * t + s.f * nn;
    double psi = std::atan2(x.y(), x.x());
    if (k > 0) {
      while (psi <= boundary_angle_[k - 1]) psi += kTwoPi;
      while (psi > boundary_angle_[k - 1] + kPi) psi -= kTwoPi;
      if (psi <= boundary_angle_[k - 1]) {
        v.failure_reason = "not C2+";
        return;
      }
    }
    boundary_angle_[k] = psi;
  }
  if (std::abs(boundary_angle_[n] - boundary_angle_[0] - kTwoPi) > 1e-9) {
    v.failure_reason = "not C2+";
    return;
  }
  v.is_valid = true;
}

void ConvexBody::require_valid() const {
  if (!validation_.is_valid) throw ValidationError("invalid convex body: " + validation_.failure_reason);
}

PeriodicSpline::Value ConvexBody::support(double theta) const {
  if (kind_ == Kind::support_function) return h_.eval(theta);
  const Vec2 n = unit_at(theta), t{-n.y(), n.x()};
  const double q = n.dot(A_ * n);
  const double q1 = 2.0 * n.dot(A_ * t);
  const double q2 = 2.0 * (t.dot(A_ * t) - q);
  const double h = std::sqrt(q);
  return {h, q1 / (2.0 * h), q2 / (2.0 * h) - q1 * q1 / (4.0 * h * h * h)};
}

// Normal angle theta of the boundary point lying in direction psi.
double ConvexBody::angle_of_boundary_normal(double psi) const {
  const std::size_t n = h_.size();
  const double base = boundary_angle_[0];
  double target = base + wrap_angle(psi - base);
  auto it = std::upper_bound(boundary_angle_.begin(), boundary_angle_.end(), target);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - boundary_angle_.begin() - 1, 0));
  if (k >= n) k = n - 1;
  double lo = h_.spacing() * static_cast<double>(k);
  double hi = lo + h_.spacing();
  const Vec2 dir = unit_at(target);

  auto residual = [&](double th, double* deriv) {
    const auto s = h_.eval(th);
    const Vec2 nn = unit_at(th), t{-nn.y(), nn.x()};
    const Vec2 x = s.df * t + s.f * nn;
    if (deriv) *deriv = (s.f + s.d2f) * cross(x, t) / x.squaredNorm();
    return std::atan2(cross(dir, x), dir.dot(x));
  };

  double th = 0.5 * (lo + hi);
  for (int it_count = 0; it_count < 60; ++it_count) {
    double d = 0.0;
    const double g = residual(th, &d);
    if (g > 0) hi = th; else lo = th;
    double next = (d > 0) ? th - g / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - th) < 1e-15 || hi - lo < 1e-15) {
      th = next;
      break;
    }
    th = next;
  }
  return th;
}

double gauge(const ConvexBody& body, const Vec2& v) {
  body.require_valid();
  if (v.x() == 0.0 && v.y() == 0.0) return 0.0;
  if (body.kind() == ConvexBody::Kind::ellipse) return std::sqrt(std::max(0.0, v.dot(body.A_inv_ * v)));
  const double th = body.angle_of_boundary_normal(std::atan2(v.y(), v.x()));
  return v.dot(unit_at(th)) / body.h_(th);
}

double dual_norm(const ConvexBody& body, const Vec2& u) {
  body.require_valid();
  if (u.x() == 0.0 && u.y() == 0.0) return 0.0;
  if (body.kind() == ConvexBody::Kind::ellipse) return std::sqrt(std::max(0.0, u.dot(body.ellipse_matrix() * u)));
  return u.norm() * body.support_spline()(std::atan2(u.y(), u.x()));
}

Vec2 project(const ConvexBody& body, const Vec2& u) {
  body.require_valid();
  if (u.x() == 0.0 && u.y() == 0.0) throw DomainError("projection undefined at the origin");
  if (body.kind() == ConvexBody::Kind::ellipse) {
    const Vec2 Au = body.ellipse_matrix() * u;
    return Au / std::sqrt(u.dot(Au));
  }
  const double th = std::atan2(u.y(), u.x());
  const auto s = body.support_spline().eval(th);
  const Vec2 n = unit_at(th), t{-n.y(), n.x()};
  return s.df * t + s.f * n;
}

Mat2 project_jacobian(const ConvexBody& body, const Vec2& u) {
  body.require_valid();
  if (u.x() == 0.0 && u.y() == 0.0) throw DomainError("projection Jacobian undefined at the origin");
  if (body.kind() == ConvexBody::Kind::ellipse) {
    const Mat2& A = body.ellipse_matrix();
    const Vec2 Au = A * u;
    const double s2 = u.dot(Au), s = std::sqrt(s2);
    return (A * s2 - Au * Au.transpose()) / (s2 * s);
  }
  const double th = std::atan2(u.y(), u.x());
  const auto s = body.support_spline().eval(th);
  const Vec2 t{-std::sin(th), std::cos(th)};
  return (s.f + s.d2f) / u.norm() * (t * t.transpose());
}

double boundary_curvature(const ConvexBody& body, const Vec2& n) {
  body.require_valid();
  const double th = std::atan2(n.y(), n.x());
  if (body.kind() == ConvexBody::Kind::ellipse) {
    const Vec2 nn = unit_at(th);
    const double h = std::sqrt(nn.dot(body.ellipse_matrix() * nn));
    return h * h * h / body.ellipse_matrix().determinant();
  }
  const auto s = body.support_spline().eval(th);
  return 1.0 / (s.f + s.d2f);
}

BodyValidation validate_body(const ConvexBody& body) { return body.validation(); }

std::vector<BodyBoundarySample> sample_body_boundary(const ConvexBody& body, int count) {
  body.require_valid();
  if (count < 1) throw ParameterError("sample count must be positive");
  std::vector<BodyBoundarySample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double th = kTwoPi * k / count;
    const Vec2 n = unit_at(th);
    out.push_back({th, project(body, n), boundary_curvature(body, n)});
  }
  return out;
}

}  // namespace sfpmc
