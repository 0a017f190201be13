#include "sfpmc/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "sfpmc/errors.hpp"

namespace sfpmc {

double boundary_finsler_curvature(const ConvexBody& body, const Domain& domain, double s) {
  const RadialBoundary& b = domain.boundary();
  return b.curvature(s) / boundary_curvature(body, b.inner_normal(s));
}

double parallel_curvature(const std::vector<double>& kappas, double t) {
  double sum = 0.0;
  for (double k : kappas) {
    const double den = 1.0 - t * k;
    if (!(den > 0)) throw FocalPointError("parallel curve reaches a focal point");
    sum += k / den;
  }
  return sum;
}

ConditionReport check_curvature_condition(const ConvexBody& body, const Domain& domain, const ScalarFn& H,
                                          int samples) {
  body.require_valid();
  if (samples < 8) throw ParameterError("boundary sample count too small");
  ConditionReport r;
  r.curvcond_margin = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double s = kTwoPi * k / samples;
    const double hk = boundary_finsler_curvature(body, domain, s);
    const double m = hk - std::abs(H(domain.boundary().point(s)));
    scale = std::max(scale, std::abs(hk));
    if (m < r.curvcond_margin) {
      r.curvcond_margin = m;
      r.curvcond_at = s;
    }
  }
  // A margin at rounding level counts as equality, which fails the strict inequality.
  r.curvcond_pass = r.curvcond_margin > 1e-10 * (1.0 + scale);
  r.c3 = r.curvcond_margin / 3.0;
  return r;
}

ConditionReport check_curvature_condition(const ConvexBody& body, const Domain& domain, double H, int samples) {
  return check_curvature_condition(body, domain, [H](const Vec2&) { return H; }, samples);
}

std::vector<TestField> test_field_basket(const Domain& domain, const DistanceField& dist, int count,
                                         std::uint64_t seed) {
  const Grid& g = domain.grid();
  const RadialBoundary& b = domain.boundary();
  double rho = std::numeric_limits<double>::infinity();
  for (double r : b.radius().samples()) rho = std::min(rho, r);

  auto finish = [&](std::string label, auto&& fn) {
    ScalarField f(g, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!domain.inside(k)) continue;
      f[k] = domain.kind(k) == NodeKind::pinned ? 0.0 : fn(g.node(k), k);
    }
    return TestField{std::move(label), std::move(f)};
  };
  auto snap = [&](const Vec2& z) {
    return Vec2{g.x0 + std::round((z.x() - g.x0) / g.h) * g.h, g.y0 + std::round((z.y() - g.y0) / g.h) * g.h};
  };

  std::vector<TestField> out;
  const double widths[3] = {0.2, 0.35, 0.5};
  for (int a = -1; a <= 1; ++a) {
    for (int c = -1; c <= 1; ++c) {
      const Vec2 center = snap(b.anchor() + 0.5 * rho * Vec2(a, c));
      for (double wf : widths) {
        const double w = std::max(2.0, std::round(wf * rho / g.h)) * g.h;
        char label[96];
        std::snprintf(label, sizeof label, "tent(%+d,%+d;w=%.4g)", a, c, w);
        out.push_back(finish(label, [&](const Vec2& z, std::size_t) {
          const Vec2 d = (z - center).cwiseAbs();
          return std::max(0.0, 1.0 - std::max(d.x(), d.y()) / w);
        }));
      }
    }
  }
  out.push_back(finish("d^1", [&](const Vec2&, std::size_t k) { return dist.values[k]; }));
  out.push_back(finish("d^2", [&](const Vec2&, std::size_t k) { return dist.values[k] * dist.values[k]; }));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 0; static_cast<int>(out.size()) < count; ++n) {
    const double th = kTwoPi * unit(rng);
    const Vec2 center = b.anchor() + 0.8 * unit(rng) * b.radius()(th) * unit_at(th);
    const double radius = rho * (0.15 + 0.35 * unit(rng));
    char label[96];
    std::snprintf(label, sizeof label, "bump%d", n);
    out.push_back(finish(label, [&](const Vec2& z, std::size_t) {
      const double q = 1.0 - (z - center).squaredNorm() / (radius * radius);
      return q > 0 ? q * q : 0.0;
    }));
  }
  if (static_cast<int>(out.size()) > count) out.resize(static_cast<std::size_t>(std::max(count, 0)));
  return out;
}

double integral_ratio(const ConvexBody& body, const Domain& domain, const ScalarFn& H, const ScalarField& v) {
  const Mesh& m = domain.mesh();
  const auto vv = vertex_values(domain, v, [](const Vec2&) { return 0.0; });
  double num = 0.0, den = 0.0;
  for (const auto& t : m.triangles) {
    num += t.weight * H(t.centroid) * triangle_mean(t, vv);
    den += t.weight * dual_norm(body, triangle_gradient(t, vv));
  }
  if (den == 0.0) return 0.0;
  return std::abs(num) / den;
}

ConditionReport check_integral_condition(const ConvexBody& body, const Domain& domain, const ScalarFn& H,
                                         const std::vector<TestField>& basket, double delta_min) {
  body.require_valid();
  ConditionReport r;
  r.hip_evaluated = true;
  double worst = 0.0;
  for (const auto& f : basket) {
    const double q = integral_ratio(body, domain, H, f.values);
    if (r.hip_worst_field.empty() || q > worst) {
      worst = q;
      r.hip_worst_field = f.label;
    }
  }
  r.hip_fields = static_cast<int>(basket.size());
  r.hip_delta = 1.0 - worst;
  r.hip_pass = r.hip_delta >= delta_min;
  return r;
}

ConditionReport check_integral_condition(const ConvexBody& body, const Domain& domain, double H,
                                         double delta_min) {
  const DistanceField dist = finsler_distance(body, domain);
  const auto basket = test_field_basket(domain, dist, 29, 0);
  return check_integral_condition(body, domain, [H](const Vec2&) { return H; }, basket, delta_min);
}

TubeBounds tube_bounds(const ConvexBody& body, const Domain& domain, double max_distance, int samples) {
  body.require_valid();
  TubeBounds tb;
  tb.kappa_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k)
    tb.kappa_max = std::max(tb.kappa_max, boundary_finsler_curvature(body, domain, kTwoPi * k / samples));
  const double focal = max_distance > 0 ? 1.0 / max_distance : 0.0;
  tb.mu0 = 0.5 / std::max(tb.kappa_max, focal);
  for (int k = 0; k < samples; ++k) {
    const double s = kTwoPi * k / samples;
    const double kappa = boundary_finsler_curvature(body, domain, s);
    const double kk = boundary_curvature(body, domain.boundary().inner_normal(s));
    for (double t : {0.0, tb.mu0}) tb.c4 = std::max(tb.c4, std::abs(kk * parallel_curvature({kappa}, t)));
  }
  return tb;
}

}  // namespace sfpmc
