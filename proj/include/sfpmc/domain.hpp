#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "sfpmc/convex_body.hpp"
#include "sfpmc/periodic_spline.hpp"
#include "sfpmc/types.hpp"

namespace sfpmc {

struct GridSpec {
  int nx = 65;
  int ny = 65;
  int padding = 1;  ///< empty node layers around the bounding box
};

/// Uniform Cartesian node grid, row-major with index j * nx + i.
struct Grid {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, h = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Vec2 node(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
  Vec2 node(std::size_t idx) const { return node(static_cast<int>(idx % nx), static_cast<int>(idx / nx)); }
  bool operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && x0 == o.x0 && y0 == o.y0 && h == o.h;
  }
};

/// Grid-sampled scalar function; NaN marks nodes outside the domain.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
};

/// Star-shaped C^2 closed curve r(theta) about an anchor, counter-clockwise.
class RadialBoundary {
 public:
  RadialBoundary() = default;
  RadialBoundary(std::vector<double> radii, const Vec2& anchor);

  const Vec2& anchor() const { return anchor_; }
  const PeriodicSpline& radius() const { return r_; }

  Vec2 point(double s) const;
  Vec2 tangent(double s) const;        ///< unit tangent, counter-clockwise
  Vec2 inner_normal(double s) const;   ///< unit normal pointing into the domain
  double curvature(double s) const;    ///< positive where the domain is locally convex
  /// Positive inside, zero on the curve, negative outside.
  double level(const Vec2& z) const;
  double area() const;

 private:
  Vec2 anchor_ = Vec2::Zero();
  PeriodicSpline r_;
};

enum class NodeKind : std::uint8_t { outside, interior, pinned };

/// Grid-line arm from an inside node toward a neighbor; cut arms end on the boundary.
struct Arm {
  double frac = 1.0;  ///< arm length in units of h
  bool cut = false;
  Vec2 end = Vec2::Zero();
};

/// Direction order for arms: +x, +y, -x, -y.
inline constexpr std::array<std::array<int, 2>, 4> kArmDirs{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

/// Piecewise-linear mesh of the domain built from the grid. Full cells carry
/// both diagonal triangulations at half weight; cut cells are fanned from
/// each inside corner with equal weights, so every fan is conforming.
struct Mesh {
  enum class Role : std::uint8_t { unknown, pinned, foot };
  struct Vertex {
    Vec2 x;
    Role role;
    std::int64_t node;   ///< grid index, -1 for foot points
    std::int64_t unknown;///< unknown index, -1 unless role == unknown
  };
  struct Triangle {
    std::array<std::int32_t, 3> v;
    std::array<Vec2, 3> grad;  ///< gradients of the barycentric coordinates
    double weight;             ///< quadrature weight (area times fan weight)
    Vec2 centroid;
  };

  std::vector<Vertex> vertices;
  std::vector<Triangle> triangles;
  std::vector<double> vertex_volume;          ///< sum of weight/3 over incident triangles
  std::vector<std::int32_t> node_vertex;      ///< grid index -> vertex, -1 if none
  std::vector<std::int32_t> unknown_vertex;   ///< unknown index -> vertex
  std::vector<std::uint8_t> boundary_adjacent;///< per vertex: shares a triangle with a fixed vertex

  double area() const;
};

class Domain {
 public:
  static Domain disk(double radius, const Vec2& center, const GridSpec& grid);
  static Domain ellipse(double a, double b, const Vec2& center, const GridSpec& grid);
  /// Superellipse |x/a|^p + |y/a|^p = 1; large p approaches a square with rounded corners.
  static Domain rounded_square(double half_side, double exponent, const Vec2& center, const GridSpec& grid);
  /// Ball {z : ||z - center||_K < radius}.
  static Domain body_ball(const ConvexBody& body, double radius, const Vec2& center, const GridSpec& grid);
  static Domain radial(std::vector<double> radii, const Vec2& anchor, const GridSpec& grid);

  static constexpr int kDefaultBoundarySamples = 1024;
  /// Inside nodes whose nearest boundary crossing is closer than this fraction of h are pinned.
  static constexpr double kPinFraction = 1e-2;

  const RadialBoundary& boundary() const { return boundary_; }
  const Grid& grid() const { return grid_; }
  NodeKind kind(std::size_t idx) const { return kind_[idx]; }
  bool inside(std::size_t idx) const { return kind_[idx] != NodeKind::outside; }
  const Arm& arm(std::size_t idx, int dir) const { return arms_[4 * idx + static_cast<std::size_t>(dir)]; }
  const Mesh& mesh() const { return *mesh_; }
  std::size_t unknown_count() const { return mesh_->unknown_vertex.size(); }

  /// Field with `fn` at inside nodes and NaN elsewhere.
  template <class Fn>
  ScalarField sample(Fn&& fn) const {
    ScalarField f(grid_, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < grid_.size(); ++k)
      if (inside(k)) f[k] = fn(grid_.node(k));
    return f;
  }

 private:
  Domain(RadialBoundary boundary, const GridSpec& spec);
  void classify();
  void build_mesh();

  RadialBoundary boundary_;
  Grid grid_;
  std::vector<NodeKind> kind_;
  std::vector<Arm> arms_;
  std::shared_ptr<const Mesh> mesh_;
};

}  // namespace sfpmc

namespace sfpmc {

/// Values at every mesh vertex: grid nodes read `field`, foot points read `boundary`.
template <class Fn>
std::vector<double> vertex_values(const Domain& domain, const ScalarField& field, Fn&& boundary) {
  const Mesh& m = domain.mesh();
  std::vector<double> out(m.vertices.size());
  for (std::size_t k = 0; k < m.vertices.size(); ++k) {
    const auto& v = m.vertices[k];
    out[k] = v.role == Mesh::Role::foot ? boundary(v.x) : field[static_cast<std::size_t>(v.node)];
  }
  return out;
}

inline Vec2 triangle_gradient(const Mesh::Triangle& t, const std::vector<double>& vv) {
  return t.grad[0] * vv[t.v[0]] + t.grad[1] * vv[t.v[1]] + t.grad[2] * vv[t.v[2]];
}

inline double triangle_mean(const Mesh::Triangle& t, const std::vector<double>& vv) {
  return (vv[t.v[0]] + vv[t.v[1]] + vv[t.v[2]]) / 3.0;
}

}  // namespace sfpmc
