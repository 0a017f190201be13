#include "sfpmc/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfpmc/errors.hpp"

namespace sfpmc {

RadialBoundary::RadialBoundary(std::vector<double> radii, const Vec2& anchor)
    : anchor_(anchor), r_(std::move(radii)) {
  for (double r : r_.samples())
    if (!(r > 0) || !std::isfinite(r)) throw ValidationError("radial boundary samples must be positive");
}

Vec2 RadialBoundary::point(double s) const { return anchor_ + r_(s) * unit_at(s); }

Vec2 RadialBoundary::tangent(double s) const {
  const auto r = r_.eval(s);
  const Vec2 u = unit_at(s), up{-u.y(), u.x()};
  return (r.df * u + r.f * up).normalized();
}

Vec2 RadialBoundary::inner_normal(double s) const {
  const Vec2 t = tangent(s);
  return {-t.y(), t.x()};
}

double RadialBoundary::curvature(double s) const {
  const auto r = r_.eval(s);
  const double q = r.f * r.f + r.df * r.df;
  return (r.f * r.f + 2.0 * r.df * r.df - r.f * r.d2f) / (q * std::sqrt(q));
}

double RadialBoundary::level(const Vec2& z) const {
  const Vec2 d = z - anchor_;
  const double rho = d.norm();
  if (rho == 0.0) return r_(0.0);
  return r_(std::atan2(d.y(), d.x())) - rho;
}

double RadialBoundary::area() const {
  const int n = static_cast<int>(8 * r_.size());
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = r_(kTwoPi * k / n);
    sum += r * r;
  }
  return 0.5 * sum * kTwoPi / n;
}

double Mesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) a += t.weight;
  return a;
}

namespace {

std::vector<double> sample_radii(int n, const std::function<double(double)>& r) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = r(kTwoPi * k / n);
  return out;
}

}  // namespace

Domain Domain::disk(double radius, const Vec2& center, const GridSpec& grid) {
  if (!(radius > 0)) throw ParameterError("disk radius must be positive");
  return Domain(RadialBoundary(std::vector<double>(kDefaultBoundarySamples, radius), center), grid);
}

Domain Domain::ellipse(double a, double b, const Vec2& center, const GridSpec& grid) {
  if (!(a > 0 && b > 0)) throw ParameterError("ellipse semi-axes must be positive");
  auto r = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return a * b / std::sqrt(b * b * c * c + a * a * s * s);
  };
  return Domain(RadialBoundary(sample_radii(kDefaultBoundarySamples, r), center), grid);
}

Domain Domain::rounded_square(double half_side, double exponent, const Vec2& center, const GridSpec& grid) {
  if (!(half_side > 0)) throw ParameterError("rounded square half side must be positive");
  if (!(exponent > 2)) throw ParameterError("rounded square exponent must exceed 2");
  auto r = [&](double t) {
    const double c = std::abs(std::cos(t)), s = std::abs(std::sin(t));
    return half_side / std::pow(std::pow(c, exponent) + std::pow(s, exponent), 1.0 / exponent);
  };
  return Domain(RadialBoundary(sample_radii(4 * kDefaultBoundarySamples, r), center), grid);
}

Domain Domain::body_ball(const ConvexBody& body, double radius, const Vec2& center, const GridSpec& grid) {
  body.require_valid();
  if (!(radius > 0)) throw ParameterError("ball radius must be positive");
  auto r = [&](double t) { return radius / gauge(body, unit_at(t)); };
  return Domain(RadialBoundary(sample_radii(kDefaultBoundarySamples, r), center), grid);
}

Domain Domain::radial(std::vector<double> radii, const Vec2& anchor, const GridSpec& grid) {
  return Domain(RadialBoundary(std::move(radii), anchor), grid);
}

Domain::Domain(RadialBoundary boundary, const GridSpec& spec) : boundary_(std::move(boundary)) {
  if (spec.nx < 3 || spec.ny < 3) throw ParameterError("grid needs at least 3 nodes per direction");
  if (spec.padding < 0) throw ParameterError("grid padding must be nonnegative");
  if (spec.nx - 1 - 2 * spec.padding < 1 || spec.ny - 1 - 2 * spec.padding < 1)
    throw ParameterError("grid padding leaves no interior cells");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  const int n = static_cast<int>(16 * boundary_.radius().size());
  for (int k = 0; k < n; ++k) {
    const Vec2 p = boundary_.point(kTwoPi * k / n);
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const double h = std::max((xmax - xmin) / (spec.nx - 1 - 2 * spec.padding),
                            (ymax - ymin) / (spec.ny - 1 - 2 * spec.padding));
  Vec2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  // Keep the grid exactly symmetric about the anchor when the boundary is.
  if ((c - boundary_.anchor()).norm() < 1e-9 * (xmax - xmin + ymax - ymin)) c = boundary_.anchor();
  grid_.nx = spec.nx;
  grid_.ny = spec.ny;
  grid_.h = h;
  grid_.x0 = c.x() - 0.5 * (spec.nx - 1) * h;
  grid_.y0 = c.y() - 0.5 * (spec.ny - 1) * h;
  classify();
  build_mesh();
}

void Domain::classify() {
  const Grid& g = grid_;
  kind_.assign(g.size(), NodeKind::outside);
  arms_.assign(4 * g.size(), Arm{});
  // Nodes on the boundary up to roundoff count as outside, so symmetric domains classify symmetrically.
  const double on_boundary = 1e-9 * g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (boundary_.level(g.node(i, j)) > on_boundary) kind_[g.index(i, j)] = NodeKind::interior;

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t idx = g.index(i, j);
      if (kind_[idx] == NodeKind::outside) continue;
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1)
        throw ValidationError("grid does not cover the domain");
      const Vec2 z0 = g.node(i, j);
      double min_frac = 1.0;
      for (int d = 0; d < 4; ++d) {
        const int ii = i + kArmDirs[d][0], jj = j + kArmDirs[d][1];
        Arm& a = arms_[4 * idx + d];
        const Vec2 z1 = g.node(ii, jj);
        if (kind_[g.index(ii, jj)] != NodeKind::outside) {
          a = Arm{1.0, false, z1};
          continue;
        }
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (boundary_.level(z0 + mid * (z1 - z0)) > 0) lo = mid; else hi = mid;
        }
        const double t = 0.5 * (lo + hi);
        a = Arm{t, true, z0 + t * (z1 - z0)};
        min_frac = std::min(min_frac, t);
      }
      if (min_frac < kPinFraction) kind_[idx] = NodeKind::pinned;
    }
  }
}

void Domain::build_mesh() {
  auto mesh = std::make_shared<Mesh>();
  Mesh& m = *mesh;
  const Grid& g = grid_;
  m.node_vertex.assign(g.size(), -1);
  std::vector<std::int32_t> foot(4 * g.size(), -1);

  for (std::size_t k = 0; k < g.size(); ++k) {
    if (kind_[k] == NodeKind::outside) continue;
    Mesh::Vertex v{g.node(k), Mesh::Role::pinned, static_cast<std::int64_t>(k), -1};
    if (kind_[k] == NodeKind::interior) {
      v.role = Mesh::Role::unknown;
      v.unknown = static_cast<std::int64_t>(m.unknown_vertex.size());
      m.unknown_vertex.push_back(static_cast<std::int32_t>(m.vertices.size()));
    }
    m.node_vertex[k] = static_cast<std::int32_t>(m.vertices.size());
    m.vertices.push_back(v);
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (kind_[k] == NodeKind::outside) continue;
    for (int d = 0; d < 4; ++d) {
      const Arm& a = arms_[4 * k + d];
      if (!a.cut) continue;
      foot[4 * k + d] = static_cast<std::int32_t>(m.vertices.size());
      m.vertices.push_back({a.end, Mesh::Role::foot, -1, -1});
    }
  }

  const double min_area2 = 1e-14 * g.h * g.h;
  auto add = [&](std::int32_t a, std::int32_t b, std::int32_t c, double fan_weight) {
    const Vec2 x[3] = {m.vertices[a].x, m.vertices[b].x, m.vertices[c].x};
    const double area2 = cross(x[1] - x[0], x[2] - x[0]);
    if (std::abs(area2) < min_area2) return;
    Mesh::Triangle t;
    t.v = {a, b, c};
    for (int q = 0; q < 3; ++q) {
      const Vec2 e = x[(q + 2) % 3] - x[(q + 1) % 3];
      t.grad[q] = Vec2{-e.y(), e.x()} / area2;
    }
    t.weight = 0.5 * std::abs(area2) * fan_weight;
    t.centroid = (x[0] + x[1] + x[2]) / 3.0;
    m.triangles.push_back(t);
  };

  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const std::size_t c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
      bool in[4];
      int count = 0;
      for (int q = 0; q < 4; ++q) count += (in[q] = kind_[c[q]] != NodeKind::outside);
      if (count == 0) continue;
      if (count == 4) {
        for (int q = 0; q < 4; ++q)
          add(m.node_vertex[c[q]], m.node_vertex[c[(q + 1) % 4]], m.node_vertex[c[(q + 3) % 4]], 0.5);
        continue;
      }
      std::vector<std::int32_t> poly;
      std::vector<bool> corner;
      for (int q = 0; q < 4; ++q) {
        if (in[q]) {
          poly.push_back(m.node_vertex[c[q]]);
          corner.push_back(true);
        }
        const int q1 = (q + 1) % 4;
        if (in[q] == in[q1]) continue;
        const std::size_t from = in[q] ? c[q] : c[q1];
        const std::size_t to = in[q] ? c[q1] : c[q];
        const int di = static_cast<int>(to % g.nx) - static_cast<int>(from % g.nx);
        const int dj = static_cast<int>(to / g.nx) - static_cast<int>(from / g.nx);
        int dir = 0;
        while (kArmDirs[dir][0] != di || kArmDirs[dir][1] != dj) ++dir;
        poly.push_back(foot[4 * from + dir]);
        corner.push_back(false);
      }
      const int np = static_cast<int>(poly.size());
      const int feet = np - count;
      if (feet == 2) {
        for (int a = 0; a < np; ++a) {
          if (!corner[a]) continue;
          for (int q = 1; q + 1 < np; ++q) add(poly[a], poly[(a + q) % np], poly[(a + q + 1) % np], 1.0 / count);
        }
      } else {
        // Saddle pattern: each inside corner keeps the triangle with its two feet.
        for (int a = 0; a < np; ++a)
          if (corner[a]) add(poly[(a + np - 1) % np], poly[a], poly[(a + 1) % np], 1.0);
      }
    }
  }

  m.vertex_volume.assign(m.vertices.size(), 0.0);
  m.boundary_adjacent.assign(m.vertices.size(), 0);
  for (const auto& t : m.triangles) {
    bool fixed = false;
    for (int q = 0; q < 3; ++q) {
      m.vertex_volume[t.v[q]] += t.weight / 3.0;
      fixed = fixed || m.vertices[t.v[q]].role != Mesh::Role::unknown;
    }
    if (fixed)
      for (int q = 0; q < 3; ++q) m.boundary_adjacent[t.v[q]] = 1;
  }
  mesh_ = std::move(mesh);
}

}  // namespace sfpmc
