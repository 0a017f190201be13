#include "sfpmc/pde_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sfpmc/analysis.hpp"
#include "sfpmc/distance.hpp"
#include "sfpmc/errors.hpp"

namespace sfpmc {

void ProblemSpec::set_constant_H(double value) {
  H = [value](const Vec2&) { return value; };
  H_constant = value;
}

void ProblemSpec::set_zero_field() {
  F = [](const Vec2&) { return Vec2(0.0, 0.0); };
  f = F;
}

double ProblemSpec::max_abs_H() const {
  if (H_constant) return std::abs(*H_constant);
  double m = 0.0;
  const Grid& g = domain->grid();
  for (std::size_t k = 0; k < g.size(); ++k)
    if (domain->inside(k)) m = std::max(m, std::abs(H(g.node(k))));
  return m;
}

void ProblemSpec::validate() const {
  body.require_valid();
  if (!domain) throw ValidationError("problem has no domain");
  if (scheme == Scheme::subriemannian && body.kind() != ConvexBody::Kind::ellipse)
    throw ValidationError("the sub-Riemannian scheme requires an ellipse body");
  const Grid& g = domain->grid();
  double worst = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!domain->inside(k)) continue;
    const Vec2 z = g.node(k);
    const double d = 1e-5 * std::max(1.0, z.norm());
    Mat2 DF, Df;  // (k, i) -> d_k F_i and d_i f_k
    for (int a = 0; a < 2; ++a) {
      Vec2 e = Vec2::Zero();
      e[a] = d;
      const Vec2 dF = (F(z + e) - F(z - e)) / (2 * d);
      const Vec2 df = (f(z + e) - f(z - e)) / (2 * d);
      DF.row(a) = dF.transpose();
      Df.col(a) = df;
    }
    scale = std::max(scale, DF.cwiseAbs().maxCoeff());
    worst = std::max(worst, (DF - Df).cwiseAbs().maxCoeff());
  }
  if (worst > 1e-5 * scale) throw ValidationError("F and f violate the compatibility D_k F_i = D_i f_k");
}

Coefficients coefficients(const ConvexBody& body, double eps, double eta, const Vec2& F_value, const Vec2& p,
                          const Mat2& DF) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(eta >= 0.0)) throw ParameterError("eta must be nonnegative");
  Coefficients c;
  c.A = Integrand::finsler(body, eps, eta).hessian(p + F_value);
  c.B = (c.A.array() * DF.array()).sum();
  return c;
}

Integrand make_integrand(const ProblemSpec& problem, double eps, double eta) {
  if (problem.scheme == Scheme::subriemannian)
    return Integrand::subriemannian(problem.body.ellipse_matrix(), eps);
  return Integrand::finsler(problem.body, eps, eta);
}

DiscreteFunctional make_functional(const ProblemSpec& problem, double eps, double eta, double sigma) {
  return DiscreteFunctional(*problem.domain, make_integrand(problem, eps, eta), problem.H, problem.F, problem.phi,
                            sigma);
}

ScalarField residual(const ProblemSpec& problem, const SolverConfig& config, const ScalarField& u) {
  const DiscreteFunctional fn = make_functional(problem, config.epsilon, config.eta, config.sigma);
  const Domain& dom = *problem.domain;
  if (!(u.grid == dom.grid())) throw DimensionError("field grid does not match the domain");
  const Mesh& m = dom.mesh();
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (m.vertices[v].role != Mesh::Role::pinned) continue;
    const double want = fn.fixed_value(v), got = u[static_cast<std::size_t>(m.vertices[v].node)];
    if (!(std::abs(want - got) <= 1e-9 * (1.0 + std::abs(want))))
      throw ConstraintError("field disagrees with the boundary datum at a cut-cell node");
  }
  const Eigen::VectorXd r = fn.residual(fn.restrict(u));
  ScalarField out(dom.grid(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < fn.size(); ++k)
    out[static_cast<std::size_t>(m.vertices[m.unknown_vertex[k]].node)] = r[static_cast<Eigen::Index>(k)];
  return out;
}

namespace {

struct NewtonOutcome {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
  double ellipticity_floor = 0.0;
  std::vector<double> energies;
};

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

NewtonOutcome newton(const DiscreteFunctional& fn, Eigen::VectorXd x, const SolverConfig& cfg, double tol) {
  NewtonOutcome out;
  const auto n = static_cast<Eigen::Index>(fn.size());
  double E = fn.energy(x);
  out.energies.push_back(E);
  Eigen::VectorXd r = fn.residual(x);
  double rn = sup_norm(r);
  if (!std::isfinite(E) || !std::isfinite(rn)) throw ConvergenceError("non-finite initial energy", rn, 0);

  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(cfg.cg_tol);
  cg.setMaxIterations(cfg.cg_max_iterations > 0 ? cfg.cg_max_iterations : std::max<int>(1000, 4 * static_cast<int>(n)));

  int it = 0;
  for (; it < cfg.max_newton && rn >= tol; ++it) {
    const Eigen::VectorXd g = fn.gradient(x);
    Eigen::SparseMatrix<double> Hm = fn.hessian(x, &out.ellipticity_floor);
    const double shift = 1e-13 * (n ? Hm.diagonal().cwiseAbs().mean() : 0.0);
    for (Eigen::Index k = 0; k < n; ++k) Hm.coeffRef(k, k) += shift;
    cg.compute(Hm);
    Eigen::VectorXd d = cg.solve(-g);
    double slope = g.dot(d);
    if (!d.allFinite() || !(slope < 0)) {
      d = -g.cwiseQuotient(Hm.diagonal().cwiseMax(1e-300));
      slope = g.dot(d);
    }
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn;
    double En = E;
    for (int b = 0; b <= cfg.max_backtracks; ++b, alpha *= cfg.backtrack) {
      xn = x + alpha * d;
      En = fn.energy(xn);
      if (!std::isfinite(En)) continue;
      if (En <= E + cfg.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      // Near the solution energy differences drop below rounding; accept when the
      // energy is unchanged to rounding and the residual decreases.
      if (En - E <= 16 * DBL_EPSILON * std::abs(E) && sup_norm(fn.residual(xn)) < rn) {
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("line search stagnated", rn, it);
    x = std::move(xn);
    E = En;
    out.energies.push_back(E);
    r = fn.residual(x);
    rn = sup_norm(r);
    if (cfg.verbose) std::fprintf(stderr, "  newton %3d  residual %.3e  energy %.12g  step %.3g\n", it + 1, rn, E, alpha);
  }
  if (rn >= tol) throw ConvergenceError("newton iteration limit reached", rn, it);
  if (n) fn.hessian(x, &out.ellipticity_floor);
  out.x = std::move(x);
  out.iterations = it;
  out.residual = rn;
  return out;
}

double residual_tolerance(const ProblemSpec& problem, const SolverConfig& cfg, double sigma) {
  return cfg.newton_tol * (1.0 + sigma * problem.max_abs_H());
}

// Newton with a sigma-homotopy fallback when the direct solve stalls.
NewtonOutcome solve_level(const ProblemSpec& problem, const SolverConfig& cfg, double eps, double eta,
                          const Eigen::VectorXd& x0, bool* used_homotopy) {
  const double tol = residual_tolerance(problem, cfg, 1.0);
  const DiscreteFunctional fn = make_functional(problem, eps, eta, 1.0);
  if (used_homotopy) *used_homotopy = false;
  try {
    return newton(fn, x0, cfg, tol);
  } catch (const ConvergenceError& e) {
    if (cfg.sigma_steps <= 0) throw;
    if (cfg.verbose) std::fprintf(stderr, "  direct newton failed (%s); sigma homotopy\n", e.what());
  }
  if (used_homotopy) *used_homotopy = true;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(x0.size());
  NewtonOutcome last;
  int total = 0;
  for (int k = 1; k <= cfg.sigma_steps; ++k) {
    const double sigma = static_cast<double>(k) / cfg.sigma_steps;
    const DiscreteFunctional fs = make_functional(problem, eps, eta, sigma);
    last = newton(fs, x, cfg, residual_tolerance(problem, cfg, sigma));
    total += last.iterations;
    x = last.x;
  }
  last.iterations = total;
  return last;
}

Eigen::VectorXd initial_guess(const DiscreteFunctional& fn, const ProblemSpec& problem, double sigma,
                              const ScalarField* initial) {
  if (initial) return fn.restrict(*initial);
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  Eigen::VectorXd x(static_cast<Eigen::Index>(fn.size()));
  for (std::size_t k = 0; k < fn.size(); ++k)
    x[static_cast<Eigen::Index>(k)] = sigma * problem.phi(m.vertices[m.unknown_vertex[k]].x);
  return x;
}

double field_sup(const ScalarField& u) {
  double s = 0.0;
  for (double v : u.values)
    if (std::isfinite(v)) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

SolveResult solve_dirichlet(const ProblemSpec& problem, const SolverConfig& config, const ScalarField* initial) {
  problem.validate();
  if (problem.scheme == Scheme::finsler_eta && !(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw ParameterError("epsilon must lie in (0, 1)");
  if (!(config.sigma >= 0.0 && config.sigma <= 1.0)) throw ParameterError("sigma must lie in [0, 1]");
  const DiscreteFunctional fn = make_functional(problem, config.epsilon, config.eta, config.sigma);
  const double tol = residual_tolerance(problem, config, config.sigma);
  const NewtonOutcome out = newton(fn, initial_guess(fn, problem, config.sigma, initial), config, tol);

  SolveResult res;
  res.u = fn.prolong(out.x);
  SolveReport& rep = res.report;
  rep.scheme = problem.scheme == Scheme::finsler_eta ? "finsler-eta" : "subriemannian";
  rep.converged = true;
  rep.iterations = out.iterations;
  rep.final_residual = out.residual;
  rep.residual_tolerance = tol;
  rep.energy_history = out.energies;
  rep.sup_norm = field_sup(res.u);
  rep.lipschitz_norm = lipschitz_norm(res.u);
  rep.ellipticity_floor = out.ellipticity_floor;
  if (problem.scheme == Scheme::finsler_eta && out.ellipticity_floor < 1e-12)
    rep.warnings.push_back("ellipticity floor below 1e-12; linear systems are poorly conditioned");
  return res;
}

namespace {

SolveResult run_continuation(const ProblemSpec& problem, const SolverConfig& config) {
  problem.validate();
  const bool sr = problem.scheme == Scheme::subriemannian;
  const Schedule& sch = config.schedule;
  if (!(sch.ratio > 0.0 && sch.ratio < 1.0)) throw ParameterError("schedule ratio must lie in (0, 1)");
  if (!(sch.eps0 > 0.0 && sch.eps0 < 1.0)) throw ParameterError("eps0 must lie in (0, 1)");
  if (!(sch.eps_floor > 0.0 && sch.eps_floor <= sch.eps0)) throw ParameterError("eps floor must lie in (0, eps0]");
  if (!(sch.eta_floor >= 0.0)) throw ParameterError("eta floor must be nonnegative");

  const Domain& dom = *problem.domain;
  SolveResult res;
  SolveReport& rep = res.report;
  rep.scheme = sr ? "subriemannian" : "finsler-eta";
  rep.conditions = check_curvature_condition(problem.body, dom, problem.H);
  if (!rep.conditions.curvcond_pass)
    rep.warnings.push_back("curvature condition fails; boundary data may not be attained in the limit");
  if (!problem.H_constant)
    rep.warnings.push_back("H is not constant; the interior gradient bound is measured, not guaranteed");

  const DistanceField dist = finsler_distance(problem.body, dom);
  double max_d = 0.0;
  for (double v : dist.values.values)
    if (std::isfinite(v)) max_d = std::max(max_d, v);
  rep.tube = tube_bounds(problem.body, dom, max_d);

  double eta0 = 0.0;
  if (!sr) {
    if (sch.eta0) {
      eta0 = *sch.eta0;
    } else if (rep.conditions.c3 > 0 && rep.tube.c4 > 0) {
      eta0 = std::min(0.1, rep.conditions.c3 / rep.tube.c4);
    } else {
      eta0 = 0.1;
      rep.warnings.push_back("no positive curvature margin; eta0 defaults to 0.1");
    }
    if (!(eta0 > 0.0)) throw ParameterError("eta0 must be positive");
  }
  rep.eta0_cap = eta0;
  const double eta_floor = std::min(sch.eta_floor, eta0);

  std::vector<std::pair<double, double>> schedule;
  for (double eps = sch.eps0, eta = eta0;; eps *= sch.ratio, eta *= sch.ratio) {
    const double e = std::max(eps, sch.eps_floor), h = sr ? 0.0 : std::max(eta, eta_floor);
    schedule.emplace_back(e, h);
    if (e == sch.eps_floor && (sr || h == eta_floor)) break;
  }

  const DiscreteFunctional fn0 = make_functional(problem, schedule[0].first, schedule[0].second, 1.0);
  Eigen::VectorXd x = initial_guess(fn0, problem, 1.0, nullptr);
  std::size_t start = 0;
  if (config.resume) {
    if (!(config.resume->u.grid == dom.grid())) throw DimensionError("checkpoint grid does not match the domain");
    x = fn0.restrict(config.resume->u);
    start = static_cast<std::size_t>(std::max(0, config.resume->step + 1));
  }

  bool all_ok = true;
  std::size_t failed_at = schedule.size();
  double first_window = 0.0, later = 0.0;
  Eigen::VectorXd prev = x;
  NewtonOutcome last;
  for (std::size_t j = start; j < schedule.size(); ++j) {
    const auto [eps, eta] = schedule[j];
    if (config.verbose) std::fprintf(stderr, "step %zu  eps %.4g  eta %.4g\n", j, eps, eta);
    bool homotopy = false;
    try {
      last = solve_level(problem, config, eps, eta, x, &homotopy);
    } catch (const ConvergenceError& e) {
      if (rep.steps.empty()) throw;
      // No regularised minimiser at this level: keep the last solution and flag it.
      char buf[200];
      std::snprintf(buf, sizeof buf, "solve failed at eps %.3g, eta %.3g (%s); stopping continuation", eps, eta,
                    e.what());
      rep.warnings.emplace_back(buf);
      rep.blowup_flag = true;
      failed_at = j;
      break;
    }
    x = last.x;
    const DiscreteFunctional fj = make_functional(problem, eps, eta, 1.0);
    const ScalarField uj = fj.prolong(x);
    StepSummary s;
    s.eps = eps;
    s.eta = eta;
    s.newton_iterations = last.iterations;
    s.residual = last.residual;
    s.energy = last.energies.back();
    s.sup_norm = field_sup(uj);
    s.lipschitz = lipschitz_norm(uj);
    s.change = (j == start && !config.resume) ? std::numeric_limits<double>::infinity() : sup_norm(x - prev);
    s.sigma_homotopy = homotopy;
    rep.steps.push_back(s);
    rep.iterations += last.iterations;
    const double Mj = s.sup_norm + s.lipschitz;
    if (static_cast<int>(j) < config.uniform_window) first_window = std::max(first_window, Mj);
    else later = std::max(later, Mj);
    rep.uniform_bound = std::max(rep.uniform_bound, Mj);
    prev = x;
    if (config.on_step) config.on_step(ContinuationState{static_cast<int>(j), eps, eta, uj});
  }
  if (rep.steps.empty()) throw ParameterError("checkpoint already covers the whole schedule");

  if (failed_at < schedule.size()) all_ok = false;
  const auto [eps_last, eta_last] = schedule[std::min(failed_at, schedule.size()) - 1];
  const DiscreteFunctional fl = make_functional(problem, eps_last, eta_last, 1.0);
  res.u = fl.prolong(x);
  rep.final_change = rep.steps.size() > 1 ? rep.steps.back().change : 0.0;
  rep.final_residual = last.residual;
  rep.residual_tolerance = residual_tolerance(problem, config, 1.0);
  rep.energy_history = last.energies;
  rep.ellipticity_floor = last.ellipticity_floor;
  rep.sup_norm = field_sup(res.u);
  rep.lipschitz_norm = lipschitz_norm(res.u);
  rep.limit_energy = limit_energy(problem, res.u);
  if (later > first_window + config.growth_tolerance * (1.0 + first_window)) {
    rep.blowup_flag = true;
    rep.warnings.push_back("sup|u| + Lip grows along the schedule; curvature or integral condition may fail");
  }
  if (rep.final_change >= config.continuation_tol) {
    all_ok = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "last continuation step changed u by %.3e (tolerance %.1e)", rep.final_change,
                  config.continuation_tol);
    rep.warnings.emplace_back(buf);
  }
  if (!sr && last.ellipticity_floor < 1e-12)
    rep.warnings.push_back("ellipticity floor below 1e-12; linear systems are poorly conditioned");
  rep.converged = all_ok;
  return res;
}

}  // namespace

SolveResult continuation_solve(const ProblemSpec& problem, const SolverConfig& config) {
  if (problem.scheme != Scheme::finsler_eta) throw ParameterError("continuation_solve expects the finsler-eta scheme");
  return run_continuation(problem, config);
}

SolveResult solve_subriemannian(const ProblemSpec& problem, const SolverConfig& config) {
  if (problem.body.kind() != ConvexBody::Kind::ellipse)
    throw ValidationError("the sub-Riemannian scheme requires an ellipse body");
  ProblemSpec p = problem;
  p.scheme = Scheme::subriemannian;
  return run_continuation(p, config);
}

double limit_energy(const ProblemSpec& problem, const ScalarField& u) {
  const DiscreteFunctional fn(*problem.domain, Integrand::finsler(problem.body, 0.0, 0.0), problem.H, problem.F,
                              problem.phi, 1.0);
  return fn.energy(fn.restrict(u));
}

ScalarField harmonic_extension(const ProblemSpec& problem) {
  const Domain& dom = *problem.domain;
  const Mesh& m = dom.mesh();
  const auto n = static_cast<Eigen::Index>(dom.unknown_count());
  std::vector<double> fixed(m.vertices.size(), 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (m.vertices[v].role != Mesh::Role::unknown) fixed[v] = problem.phi(m.vertices[v].x);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& t : m.triangles) {
    for (int a = 0; a < 3; ++a) {
      const auto ua = m.vertices[t.v[a]].unknown;
      if (ua < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const double k = t.weight * t.grad[a].dot(t.grad[b]);
        const auto ub = m.vertices[t.v[b]].unknown;
        if (ub >= 0) trip.emplace_back(static_cast<int>(ua), static_cast<int>(ub), k);
        else rhs[ua] -= k * fixed[t.v[b]];
      }
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(std::max<int>(1000, 10 * static_cast<int>(n)));
  cg.compute(K);
  const Eigen::VectorXd x = cg.solve(rhs);
  ScalarField u(dom.grid(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const auto& vx = m.vertices[v];
    if (vx.node < 0) continue;
    u[static_cast<std::size_t>(vx.node)] = vx.unknown >= 0 ? x[vx.unknown] : fixed[v];
  }
  return u;
}

void save_checkpoint(const std::string& path, const ContinuationState& state) {
  std::ostringstream os;
  os.precision(17);
  const Grid& g = state.u.grid;
  os << "sfpmc-checkpoint 1\n";
  os << "step " << state.step << "\n";
  os << "eps " << state.eps << "\neta " << state.eta << "\n";
  os << "grid " << g.nx << " " << g.ny << " " << g.x0 << " " << g.y0 << " " << g.h << "\n";
  os << "values\n";
  for (double v : state.u.values) {
    if (std::isfinite(v)) os << v << "\n";
    else os << "nan\n";
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write checkpoint " + tmp);
    f << os.str();
    if (!f) throw std::runtime_error("cannot write checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot rename checkpoint to " + path);
}

ContinuationState load_checkpoint(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open checkpoint " + path);
  std::string tag, key;
  int version = 0;
  f >> tag >> version;
  if (tag != "sfpmc-checkpoint" || version != 1) throw ValidationError("unsupported checkpoint format in " + path);
  ContinuationState s;
  Grid g;
  f >> key >> s.step >> key >> s.eps >> key >> s.eta >> key >> g.nx >> g.ny >> g.x0 >> g.y0 >> g.h >> key;
  if (!f || key != "values") throw ValidationError("malformed checkpoint header in " + path);
  s.u = ScalarField(g);
  for (auto& v : s.u.values) {
    std::string tok;
    if (!(f >> tok)) throw ValidationError("truncated checkpoint " + path);
    v = tok == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(tok);
  }
  return s;
}

}  // namespace sfpmc
