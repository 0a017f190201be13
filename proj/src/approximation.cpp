#include "sfpmc/approximation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "sfpmc/errors.hpp"

namespace sfpmc {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
}

void require_spd(const Mat2& A) {
  if (!A.allFinite() || std::abs(A(0, 1) - A(1, 0)) > 1e-12 * (1.0 + A.cwiseAbs().maxCoeff()))
    throw ParameterError("matrix must be symmetric");
  if (!(A(0, 0) > 0 && A.determinant() > 0)) throw ParameterError("matrix must be positive definite");
}

double min_eigenvalue(const Mat2& M) {
  const double a = M(0, 0), b = 0.5 * (M(0, 1) + M(1, 0)), c = M(1, 1);
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

}  // namespace

Vec2 pi_eps_h(const ConvexBody& body, double eps, const Vec2& p) {
  require_eps(eps);
  body.require_valid();
  if (p.x() == 0.0 && p.y() == 0.0) return Vec2::Zero();
  const double s = dual_norm(body, p);
  const double c = std::cbrt(eps * eps * eps + s * s * s);
  return project(body, p) * (s * s / (c * c));
}

double keps_dual_norm(const ConvexBody& body, double eps, const Vec2& p) {
  require_eps(eps);
  const double s = dual_norm(body, p);
  return std::cbrt(eps * eps * eps + s * s * s);
}

Vec2 riemannian_project(const Mat2& A, double eps, const Vec2& p) {
  require_spd(A);
  if (!(eps >= 0.0)) throw ParameterError("epsilon must be nonnegative");
  const Vec2 Ap = A * p;
  const double w = std::sqrt(eps * eps + p.dot(Ap));
  if (w == 0.0) return Vec2::Zero();
  return Ap / w;
}

RegularizedBody::RegularizedBody(const ConvexBody& b, double epsilon) : base(&b), epsilon(epsilon) {
  require_eps(epsilon);
  b.require_valid();
}

Integrand Integrand::finsler(const ConvexBody& body, double eps, double eta) {
  body.require_valid();
  if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in [0, 1)");
  if (!(eta >= 0.0)) throw ParameterError("eta must be nonnegative");
  Integrand f;
  f.body_ = &body;
  f.eps_ = eps;
  f.eta_ = eta;
  return f;
}

Integrand Integrand::subriemannian(const Mat2& A, double eps) {
  require_spd(A);
  if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
  Integrand f;
  f.A_ = A;
  f.eps_ = eps;
  return f;
}

double Integrand::value(const Vec2& q) const {
  if (!body_) return std::sqrt(eps_ * eps_ + q.dot(A_ * q));
  const double s = dual_norm(*body_, q);
  const double base = eps_ == 0.0 ? s : std::cbrt(eps_ * eps_ * eps_ + s * s * s);
  return eta_ == 0.0 ? base : base + eta_ * std::sqrt(1.0 + q.squaredNorm());
}

Vec2 Integrand::flux(const Vec2& q) const {
  if (!body_) {
    const Vec2 Aq = A_ * q;
    return Aq / std::sqrt(eps_ * eps_ + q.dot(Aq));
  }
  Vec2 out = Vec2::Zero();
  if (q.x() != 0.0 || q.y() != 0.0) {
    const double s = dual_norm(*body_, q);
    const double c = eps_ == 0.0 ? s : std::cbrt(eps_ * eps_ * eps_ + s * s * s);
    out = project(*body_, q) * (s * s / (c * c));
  }
  if (eta_ != 0.0) out += eta_ * q / std::sqrt(1.0 + q.squaredNorm());
  return out;
}

Mat2 Integrand::hessian(const Vec2& q) const {
  if (!body_) {
    const Vec2 Aq = A_ * q;
    const double w = std::sqrt(eps_ * eps_ + q.dot(Aq));
    return A_ / w - Aq * Aq.transpose() / (w * w * w);
  }
  Mat2 out = Mat2::Zero();
  if (q.x() != 0.0 || q.y() != 0.0) {
    // D_j G_i / D^(2/3) - 2 G_i G_j / D^(5/3) with G = pi s^2, D = eps^3 + s^3, rearranged
    // as s^2 Dpi / D^(2/3) + 2 s eps^3 pi pi^T / D^(5/3) to avoid cancellation.
    const double s = dual_norm(*body_, q);
    const Vec2 pi = project(*body_, q);
    const Mat2 dpi = project_jacobian(*body_, q);
    if (eps_ == 0.0) {
      out = dpi;
    } else {
      const double e3 = eps_ * eps_ * eps_;
      const double c = std::cbrt(e3 + s * s * s);  // D^(1/3)
      const double c2 = c * c, c5 = c2 * c2 * c;
      out = (s * s / c2) * dpi + (2.0 * s * e3 / c5) * (pi * pi.transpose());
    }
  }
  if (eta_ != 0.0) {
    const double r2 = 1.0 + q.squaredNorm(), r = std::sqrt(r2);
    out += eta_ * (Mat2::Identity() / r - q * q.transpose() / (r2 * r));
  }
  return out;
}

DiscreteFunctional::DiscreteFunctional(const Domain& domain, Integrand integrand, const ScalarFn& H,
                                       const VectorFn& F, const ScalarFn& phi, double sigma)
    : domain_(&domain), integrand_(integrand), unknown_count_(domain.unknown_count()) {
  const Mesh& m = domain.mesh();
  F_.resize(m.triangles.size());
  H_.resize(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    F_[t] = sigma * F(m.triangles[t].centroid);
    H_[t] = sigma * H(m.triangles[t].centroid);
  }
  fixed_.assign(m.vertices.size(), 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (m.vertices[v].role != Mesh::Role::unknown) fixed_[v] = sigma * phi(m.vertices[v].x);
}

std::vector<double> DiscreteFunctional::vertex_values(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != unknown_count_) throw DimensionError("unknown vector has wrong size");
  const Mesh& m = domain_->mesh();
  std::vector<double> vv(fixed_);
  for (std::size_t k = 0; k < unknown_count_; ++k) vv[m.unknown_vertex[k]] = x[static_cast<Eigen::Index>(k)];
  return vv;
}

double DiscreteFunctional::energy(const Eigen::VectorXd& x) const {
  const Mesh& m = domain_->mesh();
  const auto vv = vertex_values(x);
  double e = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& T = m.triangles[t];
    e += T.weight * (integrand_.value(triangle_gradient(T, vv) + F_[t]) + H_[t] * triangle_mean(T, vv));
  }
  return e;
}

Eigen::VectorXd DiscreteFunctional::gradient(const Eigen::VectorXd& x) const {
  const Mesh& m = domain_->mesh();
  const auto vv = vertex_values(x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknown_count_));
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& T = m.triangles[t];
    const Vec2 flux = integrand_.flux(triangle_gradient(T, vv) + F_[t]);
    for (int q = 0; q < 3; ++q) {
      const auto u = m.vertices[T.v[q]].unknown;
      if (u >= 0) g[u] += T.weight * (flux.dot(T.grad[q]) + H_[t] / 3.0);
    }
  }
  return g;
}

Eigen::VectorXd DiscreteFunctional::residual(const Eigen::VectorXd& x) const {
  const Mesh& m = domain_->mesh();
  Eigen::VectorXd r = gradient(x);
  for (std::size_t k = 0; k < unknown_count_; ++k)
    r[static_cast<Eigen::Index>(k)] = -r[static_cast<Eigen::Index>(k)] / m.vertex_volume[m.unknown_vertex[k]];
  return r;
}

Eigen::SparseMatrix<double> DiscreteFunctional::hessian(const Eigen::VectorXd& x, double* min_ellipticity) const {
  const Mesh& m = domain_->mesh();
  const auto vv = vertex_values(x);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * m.triangles.size());
  double floor_val = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& T = m.triangles[t];
    const Mat2 A = integrand_.hessian(triangle_gradient(T, vv) + F_[t]);
    if (min_ellipticity) floor_val = std::min(floor_val, min_eigenvalue(A));
    for (int a = 0; a < 3; ++a) {
      const auto ua = m.vertices[T.v[a]].unknown;
      if (ua < 0) continue;
      const Vec2 Aga = A * T.grad[a];
      for (int b = 0; b < 3; ++b) {
        const auto ub = m.vertices[T.v[b]].unknown;
        if (ub < 0) continue;
        trip.emplace_back(static_cast<int>(ub), static_cast<int>(ua), T.weight * T.grad[b].dot(Aga));
      }
    }
  }
  if (min_ellipticity) *min_ellipticity = floor_val;
  const auto n = static_cast<Eigen::Index>(unknown_count_);
  Eigen::SparseMatrix<double> Hm(n, n);
  Hm.setFromTriplets(trip.begin(), trip.end());
  return Hm;
}

Eigen::VectorXd DiscreteFunctional::restrict(const ScalarField& u) const {
  if (!(u.grid == domain_->grid())) throw DimensionError("field grid does not match the domain");
  const Mesh& m = domain_->mesh();
  Eigen::VectorXd x(static_cast<Eigen::Index>(unknown_count_));
  for (std::size_t k = 0; k < unknown_count_; ++k)
    x[static_cast<Eigen::Index>(k)] = u[static_cast<std::size_t>(m.vertices[m.unknown_vertex[k]].node)];
  return x;
}

ScalarField DiscreteFunctional::prolong(const Eigen::VectorXd& x) const {
  const Mesh& m = domain_->mesh();
  const auto vv = vertex_values(x);
  ScalarField u(domain_->grid(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (m.vertices[v].node >= 0) u[static_cast<std::size_t>(m.vertices[v].node)] = vv[v];
  return u;
}

double energy(const EnergySpec& spec, const ScalarField& u) {
  if (!spec.body || !spec.domain) throw ParameterError("energy spec needs a body and a domain");
  if (!(spec.epsilon >= 0.0)) throw ParameterError("epsilon must be nonnegative");
  DiscreteFunctional fn(*spec.domain, Integrand::finsler(*spec.body, spec.epsilon, spec.eta), spec.H, spec.F,
                        spec.phi, spec.sigma);
  return fn.energy(fn.restrict(u));
}

}  // namespace sfpmc
