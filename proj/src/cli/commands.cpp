#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <thread>

#include "sfpmc/analysis.hpp"
#include "sfpmc/cli.hpp"
#include "sfpmc/io.hpp"

namespace sfpmc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string out_dir(const RunConfig& c, const RunOptions& o) {
  const std::string dir = o.out ? *o.out : c.outputs.directory;
  fs::create_directories(dir);
  return dir;
}

void write_json(const RunConfig& c, const std::string& path, const json& j) {
  if (c.outputs.json) io::write_atomic(path, j.dump(2) + "\n");
}

void write_csv(const RunConfig& c, const std::string& path, const io::CsvTable& t) {
  if (c.outputs.csv) io::write_atomic(path, t.str());
}

json grid_json(const Grid& g) {
  return {{"nx", g.nx}, {"ny", g.ny}, {"x0", g.x0}, {"y0", g.y0}, {"h", g.h}};
}

void log(const RunOptions& o, const char* fmt, const std::string& arg) {
  if (o.verbose) std::fprintf(stderr, fmt, arg.c_str());
}

struct SolveOutcome {
  int exit_code = kOk;
  SolveReport report;
  double h = 0.0;
};

// Continuation solve plus audits, written to `dir`.
SolveOutcome solve_into(const RunConfig& c, const ProblemSpec& problem, SolverConfig solver, const std::string& dir,
                        const RunOptions& o) {
  SolveOutcome out;
  const Domain& dom = *problem.domain;
  const Grid& g = dom.grid();
  out.h = g.h;
  solver.verbose = o.verbose;
  if (c.outputs.checkpoint) {
    const std::string cp = dir + "/checkpoint.txt";
    solver.on_step = [cp](const ContinuationState& s) { save_checkpoint(cp, s); };
  }
  if (o.resume) solver.resume = load_checkpoint(*o.resume);

  SolveResult res;
  try {
    res = problem.scheme == Scheme::subriemannian ? solve_subriemannian(problem, solver)
                                                  : continuation_solve(problem, solver);
  } catch (const ConvergenceError& e) {
    json j = {{"converged", false}, {"error", e.what()}, {"residual", io::number(e.residual)},
              {"iterations", e.iterations}};
    write_json(c, dir + "/report.json", j);
    std::fprintf(stderr, "solve failed: %s\n", e.what());
    out.exit_code = kFail;
    return out;
  }
  out.report = res.report;
  const SolveReport& rep = res.report;

  // Audits.
  const DistanceField dist = finsler_distance(problem.body, dom);
  SolverConfig at_floor = solver;
  at_floor.epsilon = rep.steps.back().eps;
  at_floor.eta = rep.steps.back().eta;
  const BarrierReport barrier = find_barrier_slope(problem, at_floor, dist, rep.tube.mu0, c.analysis.barrier_k_max);
  const bool constant_H = problem.H_constant.has_value();
  const GradientBound gb = check_gradient_max_principle(problem, res.u);
  const HeightAudit height = height_audit(problem, res.u, dist, barrier.k);
  const double tau = c.analysis.tau ? *c.analysis.tau : default_singular_tau(res.u);
  const auto basket = test_field_basket(dom, dist, c.analysis.basket, o.seed);
  const WeakResidualAudit weak = weak_residual_audit(problem, res.u, basket, tau);
  const SingularSetMask sing = singular_set(dom, res.u, problem.phi, problem.F, tau);

  const bool gradient_applies = constant_H;
  const bool height_applies = constant_H && rep.conditions.curvcond_pass;
  const bool gradient_pass = !gradient_applies || gb.margin <= c.analysis.gradient_slack * g.h;
  const bool height_pass = !height_applies || (barrier.pass && height.pass);
  const bool weak_pass = weak.min_value >= -c.analysis.weak_tolerance;
  const bool audits_pass = gradient_pass && height_pass && weak_pass;

  json audit = {{"barrier", io::to_json(barrier)},
                {"gradient_max_principle",
                 {{"applies", gradient_applies}, {"bound", io::to_json(gb)},
                  {"slack", c.analysis.gradient_slack * g.h}, {"pass", gradient_pass}}},
                {"height", {{"applies", height_applies}, {"audit", io::to_json(height)}, {"pass", height_pass}}},
                {"weak_residual",
                 {{"tau", tau}, {"tolerance", c.analysis.weak_tolerance}, {"seed", o.seed},
                  {"result", io::to_json(weak)}, {"pass", weak_pass}}},
                {"singular_set", {{"tau", tau}, {"count", sing.count}, {"area_fraction", sing.area_fraction}}},
                {"pass", audits_pass}};
  json report = io::to_json(rep);
  report["grid"] = grid_json(g);
  write_json(c, dir + "/report.json", report);
  write_json(c, dir + "/audit.json", audit);

  const std::vector<Vec2> grad = recovered_gradient(dom, res.u, problem.phi);
  io::CsvTable t({"x", "y", "u", "grad_norm", "singular"});
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!dom.inside(k)) continue;
    const Vec2 z = g.node(k);
    t.add_row({z.x(), z.y(), res.u[k], (grad[k] + problem.F(z)).norm(), static_cast<double>(sing.mask[k])});
  }
  write_csv(c, dir + "/solution.csv", t);

  if (!rep.converged) out.exit_code = kFail;
  else if (!audits_pass || rep.blowup_flag) out.exit_code = kConditional;
  return out;
}

}  // namespace

int run_geometry(const RunConfig& c, const RunOptions& o) {
  c.body.require_valid();
  const std::string dir = out_dir(c, o);
  const Domain& dom = *c.problem.domain;
  const Grid& g = dom.grid();
  log(o, "geometry: distance field on %s\n", std::to_string(g.nx) + "x" + std::to_string(g.ny));
  const DistanceField dist = finsler_distance(c.body, dom);

  io::CsvTable dt({"x", "y", "d", "ridge", "eikonal_residual"});
  io::CsvTable rt({"x", "y", "d"});
  double max_d = 0.0;
  int ridge = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!dom.inside(k)) continue;
    const Vec2 z = g.node(k);
    dt.add_row({z.x(), z.y(), dist.values[k], static_cast<double>(dist.ridge_mask[k]), dist.residual[k]});
    max_d = std::max(max_d, dist.values[k]);
    if (dist.ridge_mask[k]) {
      rt.add_row({z.x(), z.y(), dist.values[k]});
      ++ridge;
    }
  }

  constexpr int kProfile = 512;
  io::CsvTable ct({"s", "x", "y", "euclidean_curvature", "finsler_curvature"});
  double cmin = INFINITY, cmax = -INFINITY;
  for (int i = 0; i < kProfile; ++i) {
    const double s = kTwoPi * i / kProfile;
    const Vec2 z = dom.boundary().point(s);
    const double hk = boundary_finsler_curvature(c.body, dom, s);
    ct.add_row({s, z.x(), z.y(), dom.boundary().curvature(s), hk});
    cmin = std::min(cmin, hk);
    cmax = std::max(cmax, hk);
  }
  const TubeBounds tube = tube_bounds(c.body, dom, max_d);

  write_csv(c, dir + "/distance.csv", dt);
  write_csv(c, dir + "/ridge.csv", rt);
  write_csv(c, dir + "/curvature.csv", ct);
  json summary = {{"body", io::to_json(c.body.validation())},
                  {"grid", grid_json(g)},
                  {"domain_area", dom.boundary().area()},
                  {"distance", {{"iterations", dist.iterations}, {"max", max_d}, {"ridge_nodes", ridge},
                                {"ridge_threshold", dist.threshold}}},
                  {"finsler_curvature", {{"min", cmin}, {"max", cmax}}},
                  {"tube", io::to_json(tube)}};
  write_json(c, dir + "/summary.json", summary);
  return kOk;
}

int run_check(const RunConfig& c, const RunOptions& o) {
  c.body.require_valid();
  const std::string dir = out_dir(c, o);
  const ProblemSpec& p = c.problem;
  const Domain& dom = *p.domain;
  ConditionReport cur = check_curvature_condition(p.body, dom, p.H);
  const DistanceField dist = finsler_distance(p.body, dom);
  const auto basket = test_field_basket(dom, dist, c.analysis.basket, o.seed);
  const ConditionReport hip = check_integral_condition(p.body, dom, p.H, basket);
  cur.hip_evaluated = true;
  cur.hip_delta = hip.hip_delta;
  cur.hip_pass = hip.hip_pass;
  cur.hip_worst_field = hip.hip_worst_field;
  cur.hip_fields = hip.hip_fields;

  int code = kOk;
  std::string verdict = "pass";
  if (!cur.curvcond_pass) {
    code = kFail;
    verdict = "fail";
  } else if (!p.H_constant) {
    code = cur.hip_pass ? kConditional : kFail;
    verdict = cur.hip_pass ? "conditional" : "fail";
  }
  json j = io::to_json(cur);
  j["H_constant"] = p.H_constant.has_value();
  j["seed"] = o.seed;
  j["verdict"] = verdict;
  write_json(c, dir + "/conditions.json", j);
  log(o, "check: %s\n", verdict);
  return code;
}

int run_solve(const RunConfig& c, const RunOptions& o) {
  c.body.require_valid();
  const std::string dir = out_dir(c, o);
  return solve_into(c, c.problem, c.solver, dir, o).exit_code;
}

int run_sweep(const RunConfig& c, const RunOptions& o) {
  c.body.require_valid();
  const std::string dir = out_dir(c, o);
  struct Cell {
    int grid;
    double eps_floor;
    std::string dir;
    SolveOutcome outcome;
    std::string error;
  };
  std::vector<Cell> cells;
  for (int n : c.sweep.grids)
    for (double e : c.sweep.eps_floors) {
      char name[64];
      std::snprintf(name, sizeof name, "grid%d_eps%g", n, e);
      cells.push_back({n, e, dir + "/" + name, {}, {}});
    }

  const int workers = std::max(1, std::min<int>(o.workers ? *o.workers : c.sweep.workers, static_cast<int>(cells.size())));
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next++) < cells.size();) {
      Cell& cell = cells[i];
      try {
        fs::create_directories(cell.dir);
        ProblemSpec p = c.problem;
        GridSpec gs = c.grid;
        gs.nx = gs.ny = cell.grid;
        p.domain = std::make_shared<const Domain>(c.make_domain(gs));
        SolverConfig s = c.solver;
        s.schedule.eps_floor = std::min(cell.eps_floor, s.schedule.eps0);
        RunOptions co = o;
        co.verbose = false;
        co.resume.reset();
        cell.outcome = solve_into(c, p, s, cell.dir, co);
      } catch (const std::exception& e) {
        cell.error = e.what();
        cell.outcome.exit_code = kFail;
      }
      if (o.verbose) {
        std::lock_guard lock(log_mutex);
        std::fprintf(stderr, "sweep: %s done (exit %d)\n", cell.dir.c_str(), cell.outcome.exit_code);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  io::CsvTable t({"grid", "h", "eps_floor", "sup_u", "lipschitz", "energy", "limit_energy", "residual", "converged"});
  json rows = json::array();
  int code = kOk;
  for (const auto& cell : cells) {
    const SolveReport& r = cell.outcome.report;
    const double energy = r.steps.empty() ? NAN : r.steps.back().energy;
    t.add_row({static_cast<double>(cell.grid), cell.outcome.h, cell.eps_floor, r.sup_norm, r.lipschitz_norm, energy,
               r.limit_energy, r.final_residual, r.converged ? 1.0 : 0.0});
    rows.push_back({{"grid", cell.grid}, {"h", io::number(cell.outcome.h)}, {"eps_floor", cell.eps_floor},
                    {"sup_u", io::number(r.sup_norm)}, {"lipschitz", io::number(r.lipschitz_norm)},
                    {"energy", io::number(energy)}, {"limit_energy", io::number(r.limit_energy)},
                    {"residual", io::number(r.final_residual)}, {"converged", r.converged},
                    {"exit_code", cell.outcome.exit_code}, {"error", cell.error}});
    code = std::max(code, cell.outcome.exit_code);
  }
  write_csv(c, dir + "/table.csv", t);
  write_json(c, dir + "/table.json", json{{"rows", rows}});
  return code;
}

int run_command(const std::string& command, const std::string& config_path, const RunOptions& options) {
  try {
    const RunConfig c = load_config(config_path);
    if (command == "geometry") return run_geometry(c, options);
    if (command == "check") return run_check(c, options);
    if (command == "solve") return run_solve(c, options);
    if (command == "sweep") return run_sweep(c, options);
    std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {  // ParameterError, DimensionError
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}

}  // namespace sfpmc::cli
