#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfpmc/distance.hpp"
#include "sfpmc/pde_solver.hpp"

namespace sfpmc {

struct SingularSetMask {
  std::vector<std::uint8_t> mask;  ///< per grid node
  double tau = 0.0;
  double area_fraction = 0.0;
  int count = 0;
};

/// Per-node gradient recovered as the weighted mean of incident triangle gradients;
/// NaN at outside nodes. Foot-point values come from `boundary`.
std::vector<Vec2> recovered_gradient(const Domain& domain, const ScalarField& u, const ScalarFn& boundary);

/// Nodes where |grad u + F| <= tau.
SingularSetMask singular_set(const Domain& domain, const ScalarField& u, const ScalarFn& boundary,
                             const VectorFn& F, double tau);

/// Default threshold 5 h (1 + Lip(u)).
double default_singular_tau(const ScalarField& u);

/// Largest |grad u| over grid triangles whose three nodes carry finite values.
double lipschitz_norm(const ScalarField& u);

struct BarrierReport {
  double k = 0.0;
  double mu = 0.0;
  double upper_margin = 0.0;  ///< -max residual of k d + phi on the tube
  double lower_margin = 0.0;  ///< min residual of -k d + phi on the tube
  int tube_nodes = 0;
  bool pass = false;
};

/// Evaluates the discrete residual at w+ = k d + phi and w- = -k d + phi on tube nodes
/// (d < mu, off the ridge, away from cut cells) at (config.epsilon, config.eta).
BarrierReport barrier_check(const ProblemSpec& problem, const SolverConfig& config, const DistanceField& dist,
                            double k, double mu);

/// sup over inside nodes of ||-F||_*.
double barrier_slope_threshold(const ProblemSpec& problem);

/// Sweeps k = k0 2^i, k0 = threshold + 1, up to k_max; returns the first passing report or the last one.
BarrierReport find_barrier_slope(const ProblemSpec& problem, const SolverConfig& config,
                                 const DistanceField& dist, double mu, double k_max = 1048576.0);

struct GradientBound {
  double sup_interior = 0.0;
  double sup_boundary = 0.0;
  double sup_f = 0.0;
  double margin = 0.0;  ///< sup_interior - sup_boundary - 2 sup_f
};

double check_gradient_max_principle(double sup_interior, double sup_boundary, double sup_f);
GradientBound check_gradient_max_principle(const ProblemSpec& problem, const ScalarField& u);

struct HeightAudit {
  double sup_u = 0.0, sup_phi = 0.0, k = 0.0, max_d = 0.0, bound = 0.0;
  bool pass = false;
};

HeightAudit height_audit(const ProblemSpec& problem, const ScalarField& u, const DistanceField& dist, double k);

/// int_{|q| <= tau} ||grad v||_* + int_{|q| > tau} <pi(q), grad v> + int H v with q = grad u + F.
double weak_residual(const ProblemSpec& problem, const ScalarField& u, const ScalarField& testfield, double tau);

}  // namespace sfpmc

namespace sfpmc {

struct WeakResidualAudit {
  double min_value = 0.0;  ///< min over fields and signs of the normalised weak residual
  std::string worst_field;
  int fields = 0;
};

/// weak_residual over +-v for every basket field, each scaled so that int ||grad v||_* = 1.
WeakResidualAudit weak_residual_audit(const ProblemSpec& problem, const ScalarField& u,
                                      const std::vector<TestField>& basket, double tau);

}  // namespace sfpmc
