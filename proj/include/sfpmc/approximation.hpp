#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "sfpmc/convex_body.hpp"
#include "sfpmc/domain.hpp"

namespace sfpmc {

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

/// Horizontal part of the projection onto the regularised body K_eps:
/// pi(p) ||p||_*^2 / (eps^3 + ||p||_*^3)^(2/3), extended by 0 at p = 0.
Vec2 pi_eps_h(const ConvexBody& body, double eps, const Vec2& p);

/// Dual norm of (p, -1) for K_eps: (eps^3 + ||p||_*^3)^(1/3).
double keps_dual_norm(const ConvexBody& body, double eps, const Vec2& p);

/// A p / sqrt(eps^2 + p A p), the smoothed flux for ellipse bodies.
Vec2 riemannian_project(const Mat2& A, double eps, const Vec2& p);

/// K_eps regularisation of a base body; eps in (0, 1).
struct RegularizedBody {
  RegularizedBody(const ConvexBody& base, double epsilon);
  const ConvexBody* base;
  double epsilon;
};

/// Pointwise integrand f(q) of the area functional, q = grad u + F.
///   finsler:        (eps^3 + ||q||_*^3)^(1/3) + eta sqrt(1 + |q|^2)   (eps = 0 gives ||q||_*)
///   subriemannian:  sqrt(eps^2 + q A q)
class Integrand {
 public:
  static Integrand finsler(const ConvexBody& body, double eps, double eta);
  static Integrand subriemannian(const Mat2& A, double eps);

  double value(const Vec2& q) const;
  Vec2 flux(const Vec2& q) const;     ///< gradient of value
  Mat2 hessian(const Vec2& q) const;  ///< derivative of flux (the coefficient matrix)

  bool is_finsler() const { return body_ != nullptr; }
  double eps() const { return eps_; }
  double eta() const { return eta_; }

 private:
  Integrand() = default;
  const ConvexBody* body_ = nullptr;
  Mat2 A_ = Mat2::Identity();
  double eps_ = 0.0, eta_ = 0.0;
};

/// Data of a discrete energy: integrand and the (sigma-scaled) H, F and phi.
struct EnergySpec {
  const ConvexBody* body = nullptr;
  const Domain* domain = nullptr;
  double epsilon = 0.0;
  double eta = 0.0;
  ScalarFn H = [](const Vec2&) { return 0.0; };
  VectorFn F = [](const Vec2&) { return Vec2(0.0, 0.0); };
  ScalarFn phi = [](const Vec2&) { return 0.0; };
  double sigma = 1.0;
};

/// Piecewise-linear discretisation of  u -> int f(grad u + sigma F) + sigma int H u
/// on the domain mesh, with u = sigma phi at boundary foot points and pinned nodes.
/// The gradient is assembled from the same triangles, so it is exactly the
/// derivative of the discrete energy.
class DiscreteFunctional {
 public:
  DiscreteFunctional(const Domain& domain, Integrand integrand, const ScalarFn& H, const VectorFn& F,
                     const ScalarFn& phi, double sigma = 1.0);

  std::size_t size() const { return unknown_count_; }
  const Domain& domain() const { return *domain_; }
  const Integrand& integrand() const { return integrand_; }

  double energy(const Eigen::VectorXd& x) const;
  /// d energy / d x (integrated form).
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  /// Pointwise residual div(flux) - sigma H at unknown nodes: -gradient / nodal volume.
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
  Eigen::SparseMatrix<double> hessian(const Eigen::VectorXd& x, double* min_ellipticity = nullptr) const;

  /// Per-vertex values: unknowns from x, fixed vertices from the boundary datum.
  std::vector<double> vertex_values(const Eigen::VectorXd& x) const;
  /// Unknown vector from a grid field (inside nodes only).
  Eigen::VectorXd restrict(const ScalarField& u) const;
  /// Grid field from unknowns, with fixed values at pinned nodes and NaN outside.
  ScalarField prolong(const Eigen::VectorXd& x) const;
  /// sigma-scaled boundary value at a vertex.
  double fixed_value(std::size_t vertex) const { return fixed_[vertex]; }

  const std::vector<Vec2>& triangle_F() const { return F_; }
  const std::vector<double>& triangle_H() const { return H_; }

 private:
  const Domain* domain_;
  Integrand integrand_;
  std::size_t unknown_count_;
  std::vector<Vec2> F_;       ///< sigma F at triangle centroids
  std::vector<double> H_;     ///< sigma H at triangle centroids
  std::vector<double> fixed_; ///< sigma phi at fixed vertices
};

/// Energy of u (inside-node values; boundary values from spec.phi) under the finsler integrand.
double energy(const EnergySpec& spec, const ScalarField& u);

}  // namespace sfpmc
