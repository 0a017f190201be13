#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sfpmc/convex_body.hpp"
#include "sfpmc/distance.hpp"
#include "sfpmc/domain.hpp"

namespace sfpmc {

using ScalarFn = std::function<double(const Vec2&)>;

/// Anisotropic mean curvature of the boundary at parameter s: k(s) / k_K(pi_K(N(s))).
double boundary_finsler_curvature(const ConvexBody& body, const Domain& domain, double s);

/// Mean curvature of the parallel curve at distance t: sum k_i / (1 - t k_i).
double parallel_curvature(const std::vector<double>& kappas, double t);

struct ConditionReport {
  double curvcond_margin = 0.0;  ///< min over the boundary of H_K - |H|
  double curvcond_at = 0.0;      ///< boundary parameter attaining the margin
  bool curvcond_pass = false;
  double c3 = 0.0;               ///< margin / 3

  bool hip_evaluated = false;
  double hip_delta = 0.0;        ///< 1 - sup |int H v| / int ||grad v||_*
  bool hip_pass = false;
  std::string hip_worst_field;
  int hip_fields = 0;
};

ConditionReport check_curvature_condition(const ConvexBody& body, const Domain& domain, const ScalarFn& H,
                                          int samples = 4096);
ConditionReport check_curvature_condition(const ConvexBody& body, const Domain& domain, double H,
                                          int samples = 4096);

struct TestField {
  std::string label;
  ScalarField values;  ///< zero at pinned nodes; zero boundary values implied
};

/// Tents at 9 anchors and 3 widths, d and d^2, then smooth random bumps up to `count` fields.
std::vector<TestField> test_field_basket(const Domain& domain, const DistanceField& dist, int count,
                                         std::uint64_t seed);

/// Heuristic (necessary-only) check of the integral condition over the basket.
ConditionReport check_integral_condition(const ConvexBody& body, const Domain& domain, const ScalarFn& H,
                                         const std::vector<TestField>& basket, double delta_min = 0.05);
ConditionReport check_integral_condition(const ConvexBody& body, const Domain& domain, double H,
                                         double delta_min = 0.05);

/// Ratio |int H v| / int ||grad v||_* for one test field.
double integral_ratio(const ConvexBody& body, const Domain& domain, const ScalarFn& H, const ScalarField& v);

struct TubeBounds {
  double kappa_max = 0.0;  ///< max of the boundary anisotropic curvature
  double mu0 = 0.0;        ///< tube width 0.5 / max(kappa_max, 1 / max d)
  double c4 = 0.0;         ///< max Euclidean curvature of parallel curves within the tube
};

TubeBounds tube_bounds(const ConvexBody& body, const Domain& domain, double max_distance, int samples = 4096);

}  // namespace sfpmc
