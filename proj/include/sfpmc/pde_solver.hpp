#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfpmc/approximation.hpp"
#include "sfpmc/conditions.hpp"
#include "sfpmc/convex_body.hpp"
#include "sfpmc/domain.hpp"

namespace sfpmc {

enum class Scheme { finsler_eta, subriemannian };

/// Dirichlet problem div(flux(grad u + F)) = H in the domain, u = phi on its boundary.
struct ProblemSpec {
  ConvexBody body = ConvexBody::disk(1.0);
  std::shared_ptr<const Domain> domain;
  ScalarFn H = [](const Vec2&) { return 0.0; };
  std::optional<double> H_constant = 0.0;  ///< set when H is constant
  ScalarFn phi = [](const Vec2&) { return 0.0; };
  VectorFn F = [](const Vec2& z) { return Vec2(-z.y(), z.x()); };
  VectorFn f = [](const Vec2& z) { return Vec2(z.y(), -z.x()); };  ///< D_k F_i = D_i f_k
  Scheme scheme = Scheme::finsler_eta;

  void set_constant_H(double value);
  void set_zero_field();  ///< F = f = 0
  /// Throws ValidationError on an invalid body, a scheme/body mismatch or incompatible (F, f).
  void validate() const;
  double max_abs_H() const;
};

struct Schedule {
  double eps0 = 0.5;
  double eps_floor = 1e-3;
  std::optional<double> eta0;  ///< unset: min(0.1, C3 / C4)
  double eta_floor = 1e-3;
  double ratio = 0.5;
};

struct ContinuationState {
  int step = 0;
  double eps = 0.0, eta = 0.0;
  ScalarField u;
};

struct SolverConfig {
  double epsilon = 0.1;
  double eta = 0.01;
  double sigma = 1.0;
  double newton_tol = 1e-8;  ///< on the residual sup norm, scaled by 1 + sup|H|
  int max_newton = 100;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int max_backtracks = 40;
  double cg_tol = 1e-10;
  int cg_max_iterations = 0;  ///< 0: automatic
  Schedule schedule;
  int sigma_steps = 4;
  double continuation_tol = 1e-4;
  double growth_tolerance = 0.05;  ///< allowed growth of M = sup|u| + Lip after the first steps, relative to 1 + M
  int uniform_window = 3;

  std::function<void(const ContinuationState&)> on_step;  ///< called after each continuation step
  std::optional<ContinuationState> resume;
  bool verbose = false;
};

struct StepSummary {
  double eps = 0.0, eta = 0.0;
  int newton_iterations = 0;
  double residual = 0.0;
  double energy = 0.0;  ///< regularised energy at this step
  double sup_norm = 0.0;
  double lipschitz = 0.0;
  double change = 0.0;  ///< sup-norm difference from the previous step
  bool sigma_homotopy = false;
};

struct SolveReport {
  std::string scheme;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  double residual_tolerance = 0.0;
  std::vector<double> energy_history;
  double sup_norm = 0.0;
  double lipschitz_norm = 0.0;
  double ellipticity_floor = 0.0;
  std::vector<std::string> warnings;

  // Continuation.
  std::vector<StepSummary> steps;
  ConditionReport conditions;
  TubeBounds tube;
  double eta0_cap = 0.0;
  double uniform_bound = 0.0;  ///< max over steps of sup|u| + Lip
  bool blowup_flag = false;
  double final_change = 0.0;
  double limit_energy = 0.0;  ///< energy at eps = eta = 0
};

struct SolveResult {
  ScalarField u;
  SolveReport report;
};

struct Coefficients {
  Mat2 A;
  double B = 0.0;  ///< sum_ij A_ij d_i F_j
};

/// Coefficients of the non-divergence form sum A_ij u_ij + B = H.
/// DF(i, j) = d F_j / d x_i.
Coefficients coefficients(const ConvexBody& body, double eps, double eta, const Vec2& F_value, const Vec2& p,
                          const Mat2& DF = Mat2::Zero());

/// Integrand for the problem's scheme at (eps, eta).
Integrand make_integrand(const ProblemSpec& problem, double eps, double eta);

DiscreteFunctional make_functional(const ProblemSpec& problem, double eps, double eta, double sigma = 1.0);

/// Pointwise residual div(flux) - H at unknown nodes (NaN elsewhere). Pinned nodes must carry phi.
ScalarField residual(const ProblemSpec& problem, const SolverConfig& config, const ScalarField& u);

/// Damped Newton at (config.epsilon, config.eta, config.sigma), starting from `initial` or phi.
SolveResult solve_dirichlet(const ProblemSpec& problem, const SolverConfig& config,
                            const ScalarField* initial = nullptr);

/// Solves along the geometric (eps_j, eta_j) schedule with warm starts.
SolveResult continuation_solve(const ProblemSpec& problem, const SolverConfig& config);

/// Continuation in eps for the smoothed flux A q / sqrt(eps^2 + q A q); requires an ellipse body.
SolveResult solve_subriemannian(const ProblemSpec& problem, const SolverConfig& config);

/// Discrete harmonic function with boundary values phi.
ScalarField harmonic_extension(const ProblemSpec& problem);

/// Energy with eps = eta = 0 of u.
double limit_energy(const ProblemSpec& problem, const ScalarField& u);

void save_checkpoint(const std::string& path, const ContinuationState& state);
ContinuationState load_checkpoint(const std::string& path);

}  // namespace sfpmc
