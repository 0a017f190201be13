#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sfpmc/periodic_spline.hpp"
#include "sfpmc/types.hpp"

namespace sfpmc {

struct BodyValidation {
  bool is_valid = false;
  /// min of h + h'' over the samples (support kind) or min eigenvalue of A (ellipse kind).
  double min_curvature = 0.0;
  /// (c, C) with c|u| <= ||u||_* <= C|u|.
  std::pair<double, double> norm_equivalence{0.0, 0.0};
  /// (c, C) with c|v| <= ||v||_K <= C|v|.
  std::pair<double, double> gauge_equivalence{0.0, 0.0};
  std::string failure_reason;
};

/// Planar convex body with the origin in its interior.
///
/// Two representations: an ellipse {v : v A^{-1} v^T <= 1} with closed-form
/// queries, or a periodic table of support-function samples h(theta)
/// interpolated by a periodic cubic spline. Immutable after construction.
class ConvexBody {
 public:
  enum class Kind { ellipse, support_function };

  static ConvexBody ellipse(const Mat2& A, double margin = 1e-8);
  static ConvexBody disk(double radius);
  static ConvexBody from_support_samples(std::vector<double> samples, double margin = 1e-8);
  static ConvexBody from_support_function(const std::function<double(double)>& h, int count,
                                          double margin = 1e-8);

  Kind kind() const { return kind_; }
  const Mat2& ellipse_matrix() const { return A_; }
  const PeriodicSpline& support_spline() const { return h_; }
  const BodyValidation& validation() const { return validation_; }
  bool valid() const { return validation_.is_valid; }

  /// Support function and its first two derivatives at angle theta.
  PeriodicSpline::Value support(double theta) const;

  /// Throws ValidationError if the body is invalid.
  void require_valid() const;

  /// Returns a copy scaled by lambda (h -> lambda h).
  ConvexBody scaled(double lambda) const;

 private:
  ConvexBody() = default;
  void validate(double margin);
  double angle_of_boundary_normal(double psi) const;

  friend double gauge(const ConvexBody&, const Vec2&);

  Kind kind_ = Kind::ellipse;
  Mat2 A_ = Mat2::Identity();
  Mat2 A_inv_ = Mat2::Identity();
  PeriodicSpline h_;
  // Support kind: polar angle (unwrapped, increasing) of the boundary point with normal angle theta_k.
  std::vector<double> boundary_angle_;
  BodyValidation validation_;
};

/// Minkowski gauge ||v||_K.
double gauge(const ConvexBody& body, const Vec2& v);

/// Dual norm ||u||_* = max over K of <u, .> (the support function of K).
double dual_norm(const ConvexBody& body, const Vec2& u);

/// Boundary point of K maximizing <u, .>; throws DomainError for u = 0.
Vec2 project(const ConvexBody& body, const Vec2& u);

/// Jacobian of project at u (symmetric, annihilates u); throws DomainError for u = 0.
Mat2 project_jacobian(const ConvexBody& body, const Vec2& u);

/// Curvature of the boundary of K at the point whose outer normal is n.
double boundary_curvature(const ConvexBody& body, const Vec2& n);

BodyValidation validate_body(const ConvexBody& body);

struct BodyBoundarySample {
  double theta;  ///< outer normal angle
  Vec2 point;
  double curvature;
};

/// Samples the boundary of K at `count` equally spaced normal angles.
std::vector<BodyBoundarySample> sample_body_boundary(const ConvexBody& body, int count);

}  // namespace sfpmc
