#pragma once

#include <cstdint>
#include <vector>

#include "sfpmc/convex_body.hpp"
#include "sfpmc/domain.hpp"

namespace sfpmc {

struct DistanceOptions {
  double tolerance = 1e-8;       ///< max update per sweep iteration
  int max_iterations = 500;
  int band_layers = 2;           ///< node layers next to the boundary initialised by direct minimisation
  int boundary_samples = 2048;   ///< boundary samples for direct minimisation
  double ridge_factor = 10.0;    ///< ridge threshold in units of h
};

struct DistanceField {
  ScalarField values;                  ///< d >= 0 at inside nodes, NaN outside
  std::vector<std::uint8_t> ridge_mask;///< per grid node
  ScalarField residual;                ///< | ||grad d||_* - 1 | at inside nodes
  double threshold = 0.0;              ///< ridge threshold used
  int iterations = 0;
};

/// Distance from the boundary measured with the gauge: d(p) = min_q ||p - q||_K.
/// Fast sweeping with the Hopf-Lax update over the four grid quadrants.
DistanceField finsler_distance(const ConvexBody& body, const Domain& domain, const DistanceOptions& opt = {});

/// Direct minimisation of ||p - gamma(s)||_K over the boundary; returns (distance, foot parameter s).
std::pair<double, double> boundary_distance(const ConvexBody& body, const Domain& domain, const Vec2& p,
                                            int samples = 2048);

/// Fills the eikonal residual and ridge mask of `dist` from its values and returns the mask.
/// A node is on the ridge when the residual or the kink between one-sided
/// differences exceeds factor * h.
std::vector<std::uint8_t> detect_ridge(const ConvexBody& body, const Domain& domain, DistanceField& dist, double factor = 10.0);

}  // namespace sfpmc
