#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "sfpmc/cli.hpp"
#include "sfpmc/expression.hpp"

namespace sfpmc::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1 << ":" << node.Mark().column + 1;
    os << ": " << field << ": " << msg;
    throw ConfigError(os.str());
  }

  void allow(const YAML::Node& block, const std::string& field, std::set<std::string> keys) const {
    if (!block.IsDefined() || block.IsNull()) return;
    if (!block.IsMap()) fail(block, field, "expected a mapping");
    for (const auto& kv : block) {
      const std::string k = kv.first.as<std::string>();
      if (!keys.count(k)) fail(kv.first, field.empty() ? k : field + "." + k, "unknown key");
    }
  }

  template <class T>
  T get(const YAML::Node& block, const std::string& key, const std::string& field, T fallback) const {
    const YAML::Node n = block[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return as<T>(n, field + "." + key);
  }

  template <class T>
  T as(const YAML::Node& n, const std::string& field) const {
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, field, "wrong type");
    }
  }

  /// Number or expression string.
  Expression expression(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number or an expression");
    try {
      return Expression(n.as<std::string>());
    } catch (const ParameterError& e) {
      fail(n, field, e.what());
    }
  }

  Vec2 vec2(const YAML::Node& n, const std::string& field) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, field, "expected [x, y]");
    return {as<double>(n[0], field + "[0]"), as<double>(n[1], field + "[1]")};
  }

 private:
  std::string source_;
};

ScalarFn scalar_fn(const Expression& e) {
  return [e](const Vec2& z) { return e(z.x(), z.y()); };
}

ConvexBody parse_body(const Reader& r, const YAML::Node& b) {
  r.allow(b, "body", {"kind", "radius", "matrix", "support", "samples"});
  if (!b.IsDefined()) return ConvexBody::disk(1.0);
  const std::string kind = r.get<std::string>(b, "kind", "body", "disk");
  if (kind == "disk") {
    const double radius = r.get<double>(b, "radius", "body", 1.0);
    if (!(radius > 0)) r.fail(b["radius"], "body.radius", "must be positive");
    return ConvexBody::disk(radius);
  }
  if (kind == "ellipse") {
    const YAML::Node m = b["matrix"];
    if (!m.IsSequence() || m.size() != 2) r.fail(m.IsDefined() ? m : b, "body.matrix", "expected a 2x2 matrix");
    Mat2 A;
    for (int i = 0; i < 2; ++i) {
      const Vec2 row = r.vec2(m[i], "body.matrix[" + std::to_string(i) + "]");
      A.row(i) = row.transpose();
    }
    return ConvexBody::ellipse(A);
  }
  if (kind == "support") {
    if (!b["support"].IsDefined()) r.fail(b, "body.support", "missing support function of t");
    const Expression h = r.expression(b["support"], "body.support");
    const int samples = r.get<int>(b, "samples", "body", 512);
    if (samples < 16) r.fail(b["samples"], "body.samples", "need at least 16 samples");
    return ConvexBody::from_support_function([h](double t) { return h(0.0, 0.0, t); }, samples);
  }
  r.fail(b["kind"], "body.kind", "expected disk, ellipse or support");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root.IsMap()) throw ConfigError(source + ": expected a mapping at the top level");
  r.allow(root, "", {"body", "domain", "problem", "solver", "analysis", "outputs", "sweep"});

  RunConfig c;
  c.source = source;
  c.body = parse_body(r, root["body"]);
  if (!c.body.valid()) r.fail(root["body"], "body", "invalid convex body: " + c.body.validation().failure_reason);

  // Domain.
  const YAML::Node d = root["domain"];
  r.allow(d, "domain", {"shape", "radius", "center", "semi_axes", "half_side", "exponent", "radial", "samples",
                        "grid", "padding"});
  if (!d.IsDefined()) r.fail(root, "domain", "missing block");
  const std::string shape = r.get<std::string>(d, "shape", "domain", "disk");
  const Vec2 center = d["center"].IsDefined() ? r.vec2(d["center"], "domain.center") : Vec2::Zero();
  if (d["grid"].IsDefined()) {
    if (d["grid"].IsSequence()) {
      const Vec2 g = r.vec2(d["grid"], "domain.grid");
      c.grid.nx = static_cast<int>(g.x());
      c.grid.ny = static_cast<int>(g.y());
    } else {
      c.grid.nx = c.grid.ny = r.as<int>(d["grid"], "domain.grid");
    }
  }
  c.grid.padding = r.get<int>(d, "padding", "domain", 1);
  if (c.grid.nx < 8 || c.grid.ny < 8) r.fail(d["grid"], "domain.grid", "need at least 8 nodes per direction");
  if (c.grid.padding < 1) r.fail(d["padding"], "domain.padding", "must be at least 1");
  if (shape == "disk") {
    const double radius = r.get<double>(d, "radius", "domain", 1.0);
    if (!(radius > 0)) r.fail(d["radius"], "domain.radius", "must be positive");
    c.make_domain = [=](const GridSpec& g) { return Domain::disk(radius, center, g); };
  } else if (shape == "ellipse") {
    if (!d["semi_axes"].IsDefined()) r.fail(d, "domain.semi_axes", "missing");
    const Vec2 ab = r.vec2(d["semi_axes"], "domain.semi_axes");
    if (!(ab.x() > 0 && ab.y() > 0)) r.fail(d["semi_axes"], "domain.semi_axes", "must be positive");
    c.make_domain = [=](const GridSpec& g) { return Domain::ellipse(ab.x(), ab.y(), center, g); };
  } else if (shape == "rounded_square") {
    const double half = r.get<double>(d, "half_side", "domain", 1.0);
    const double p = r.get<double>(d, "exponent", "domain", 8.0);
    if (!(half > 0)) r.fail(d["half_side"], "domain.half_side", "must be positive");
    if (!(p > 2)) r.fail(d["exponent"], "domain.exponent", "must exceed 2");
    c.make_domain = [=](const GridSpec& g) { return Domain::rounded_square(half, p, center, g); };
  } else if (shape == "body_ball") {
    const double radius = r.get<double>(d, "radius", "domain", 1.0);
    if (!(radius > 0)) r.fail(d["radius"], "domain.radius", "must be positive");
    const ConvexBody body = c.body;
    c.make_domain = [=](const GridSpec& g) { return Domain::body_ball(body, radius, center, g); };
  } else if (shape == "radial") {
    if (!d["radial"].IsDefined()) r.fail(d, "domain.radial", "missing radius function of t");
    const Expression rho = r.expression(d["radial"], "domain.radial");
    const int samples = r.get<int>(d, "samples", "domain", Domain::kDefaultBoundarySamples);
    if (samples < 16) r.fail(d["samples"], "domain.samples", "need at least 16 samples");
    std::vector<double> radii(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) radii[static_cast<std::size_t>(i)] = rho(0.0, 0.0, kTwoPi * i / samples);
    c.make_domain = [=](const GridSpec& g) { return Domain::radial(radii, center, g); };
  } else {
    r.fail(d["shape"], "domain.shape", "expected disk, ellipse, rounded_square, body_ball or radial");
  }

  // Problem.
  const YAML::Node p = root["problem"];
  r.allow(p, "problem", {"H", "phi", "field", "scheme"});
  c.problem.body = c.body;
  if (p["H"].IsDefined()) {
    const Expression H = r.expression(p["H"], "problem.H");
    if (H.is_constant()) c.problem.set_constant_H(H(0, 0));
    else {
      c.problem.H = scalar_fn(H);
      c.problem.H_constant.reset();
    }
  }
  if (p["phi"].IsDefined()) c.problem.phi = scalar_fn(r.expression(p["phi"], "problem.phi"));
  const YAML::Node f = p["field"];
  if (f.IsDefined() && !f.IsNull()) {
    if (f.IsScalar()) {
      const std::string kind = f.as<std::string>();
      if (kind == "zero") c.problem.set_zero_field();
      else if (kind != "heisenberg") r.fail(f, "problem.field", "expected heisenberg, zero or {F, f}");
    } else {
      r.allow(f, "problem.field", {"F", "f"});
      auto pair = [&](const char* key) {
        const YAML::Node n = f[key];
        const std::string field = std::string("problem.field.") + key;
        if (!n.IsSequence() || n.size() != 2) r.fail(n.IsDefined() ? n : f, field, "expected [expr_x, expr_y]");
        const Expression ex = r.expression(n[0], field + "[0]"), ey = r.expression(n[1], field + "[1]");
        return VectorFn([ex, ey](const Vec2& z) { return Vec2(ex(z.x(), z.y()), ey(z.x(), z.y())); });
      };
      c.problem.F = pair("F");
      c.problem.f = pair("f");
    }
  }
  const std::string scheme = r.get<std::string>(p, "scheme", "problem", "finsler-eta");
  if (scheme == "finsler-eta") c.problem.scheme = Scheme::finsler_eta;
  else if (scheme == "subriemannian") {
    c.problem.scheme = Scheme::subriemannian;
    if (c.body.kind() != ConvexBody::Kind::ellipse)
      r.fail(p["scheme"], "problem.scheme", "subriemannian requires an ellipse or disk body");
  } else {
    r.fail(p["scheme"], "problem.scheme", "expected finsler-eta or subriemannian");
  }

  // Solver.
  const YAML::Node s = root["solver"];
  r.allow(s, "solver", {"newton_tol", "max_newton", "sigma_steps", "continuation_tol", "growth_tolerance",
                        "cg_tol", "schedule"});
  SolverConfig& sc = c.solver;
  sc.newton_tol = r.get<double>(s, "newton_tol", "solver", sc.newton_tol);
  sc.max_newton = r.get<int>(s, "max_newton", "solver", sc.max_newton);
  sc.sigma_steps = r.get<int>(s, "sigma_steps", "solver", sc.sigma_steps);
  sc.continuation_tol = r.get<double>(s, "continuation_tol", "solver", sc.continuation_tol);
  sc.growth_tolerance = r.get<double>(s, "growth_tolerance", "solver", sc.growth_tolerance);
  sc.cg_tol = r.get<double>(s, "cg_tol", "solver", sc.cg_tol);
  if (!(sc.newton_tol > 0)) r.fail(s["newton_tol"], "solver.newton_tol", "must be positive");
  if (sc.max_newton < 1) r.fail(s["max_newton"], "solver.max_newton", "must be at least 1");
  const YAML::Node sch = s["schedule"];
  r.allow(sch, "solver.schedule", {"eps0", "eps_floor", "eta0", "eta_floor", "ratio"});
  if (sch.IsDefined()) {
    Schedule& q = sc.schedule;
    q.eps0 = r.get<double>(sch, "eps0", "solver.schedule", q.eps0);
    q.eps_floor = r.get<double>(sch, "eps_floor", "solver.schedule", q.eps_floor);
    q.eta_floor = r.get<double>(sch, "eta_floor", "solver.schedule", q.eta_floor);
    q.ratio = r.get<double>(sch, "ratio", "solver.schedule", q.ratio);
    if (sch["eta0"].IsDefined() && !sch["eta0"].IsNull()) q.eta0 = r.as<double>(sch["eta0"], "solver.schedule.eta0");
    if (!(q.eps0 > 0 && q.eps0 < 1)) r.fail(sch["eps0"], "solver.schedule.eps0", "must lie in (0, 1)");
    if (!(q.eps_floor > 0 && q.eps_floor <= q.eps0))
      r.fail(sch["eps_floor"], "solver.schedule.eps_floor", "must lie in (0, eps0]");
    if (!(q.ratio > 0 && q.ratio < 1)) r.fail(sch["ratio"], "solver.schedule.ratio", "must lie in (0, 1)");
    if (!(q.eta_floor >= 0)) r.fail(sch["eta_floor"], "solver.schedule.eta_floor", "must be nonnegative");
    if (q.eta0 && !(*q.eta0 > 0)) r.fail(sch["eta0"], "solver.schedule.eta0", "must be positive");
  }

  // Analysis.
  const YAML::Node a = root["analysis"];
  r.allow(a, "analysis", {"basket", "barrier_k_max", "tau", "weak_tolerance", "gradient_slack"});
  c.analysis.basket = r.get<int>(a, "basket", "analysis", c.analysis.basket);
  c.analysis.barrier_k_max = r.get<double>(a, "barrier_k_max", "analysis", c.analysis.barrier_k_max);
  if (a["tau"].IsDefined() && !a["tau"].IsNull()) c.analysis.tau = r.as<double>(a["tau"], "analysis.tau");
  c.analysis.weak_tolerance = r.get<double>(a, "weak_tolerance", "analysis", c.analysis.weak_tolerance);
  c.analysis.gradient_slack = r.get<double>(a, "gradient_slack", "analysis", c.analysis.gradient_slack);
  if (c.analysis.basket < 11) r.fail(a["basket"], "analysis.basket", "need at least 11 fields (tents and distance powers)");

  // Outputs.
  const YAML::Node o = root["outputs"];
  r.allow(o, "outputs", {"directory", "formats", "checkpoint"});
  c.outputs.directory = r.get<std::string>(o, "directory", "outputs", c.outputs.directory);
  c.outputs.checkpoint = r.get<bool>(o, "checkpoint", "outputs", false);
  if (o["formats"].IsDefined()) {
    c.outputs.csv = c.outputs.json = false;
    const YAML::Node fm = o["formats"];
    if (!fm.IsSequence()) r.fail(fm, "outputs.formats", "expected a list");
    for (std::size_t i = 0; i < fm.size(); ++i) {
      const std::string v = r.as<std::string>(fm[i], "outputs.formats");
      if (v == "csv") c.outputs.csv = true;
      else if (v == "json") c.outputs.json = true;
      else r.fail(fm[i], "outputs.formats", "expected csv or json");
    }
  }

  // Sweep.
  const YAML::Node w = root["sweep"];
  r.allow(w, "sweep", {"grids", "eps_floors", "workers"});
  if (w["grids"].IsDefined()) c.sweep.grids = r.as<std::vector<int>>(w["grids"], "sweep.grids");
  if (w["eps_floors"].IsDefined()) c.sweep.eps_floors = r.as<std::vector<double>>(w["eps_floors"], "sweep.eps_floors");
  c.sweep.workers = r.get<int>(w, "workers", "sweep", 1);
  if (c.sweep.grids.empty()) r.fail(w["grids"], "sweep.grids", "must not be empty");
  if (c.sweep.eps_floors.empty()) r.fail(w["eps_floors"], "sweep.eps_floors", "must not be empty");
  for (double e : c.sweep.eps_floors)
    if (!(e > 0 && e < 1)) r.fail(w["eps_floors"], "sweep.eps_floors", "entries must lie in (0, 1)");
  if (c.sweep.workers < 1) r.fail(w["workers"], "sweep.workers", "must be at least 1");

  c.problem.domain = std::make_shared<const Domain>(c.make_domain(c.grid));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace sfpmc::cli
