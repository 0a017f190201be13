#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's norm, projection or solver code.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
inline constexpr double kPi = 3.14159265358979323846;

/// Analytic support function with its first two derivatives.
struct Support {
  std::function<double(double)> h, dh, d2h;
};

/// h(t) = sqrt(n A n) for the ellipse {v A^{-1} v <= 1}.
inline Support ellipse_support(const Mat2& A) {
  auto q = [A](double t) {
    const Vec2 n(std::cos(t), std::sin(t));
    return n.dot(A * n);
  };
  auto dq = [A](double t) {
    const Vec2 n(std::cos(t), std::sin(t)), tt(-std::sin(t), std::cos(t));
    return 2.0 * tt.dot(A * n);
  };
  auto d2q = [A](double t) {
    const Vec2 n(std::cos(t), std::sin(t)), tt(-std::sin(t), std::cos(t));
    return 2.0 * (tt.dot(A * tt) - n.dot(A * n));
  };
  return {[=](double t) { return std::sqrt(q(t)); },
          [=](double t) { return dq(t) / (2.0 * std::sqrt(q(t))); },
          [=](double t) {
            const double s = std::sqrt(q(t));
            return d2q(t) / (2.0 * s) - dq(t) * dq(t) / (4.0 * s * s * s);
          }};
}

/// h = c0 + a1 cos t + b1 sin t + a2 cos 2t + b2 sin 2t + a3 cos 3t.
inline Support trig_support(double c0, double a1, double b1, double a2, double b2, double a3) {
  return {[=](double t) {
            return c0 + a1 * std::cos(t) + b1 * std::sin(t) + a2 * std::cos(2 * t) + b2 * std::sin(2 * t) +
                   a3 * std::cos(3 * t);
          },
          [=](double t) {
            return -a1 * std::sin(t) + b1 * std::cos(t) - 2 * a2 * std::sin(2 * t) + 2 * b2 * std::cos(2 * t) -
                   3 * a3 * std::sin(3 * t);
          },
          [=](double t) {
            return -a1 * std::cos(t) - b1 * std::sin(t) - 4 * a2 * std::cos(2 * t) - 4 * b2 * std::sin(2 * t) -
                   9 * a3 * std::cos(3 * t);
          }};
}

/// Boundary point of the body with outer normal angle t: h n + h' t.
inline Vec2 envelope_point(const Support& s, double t) {
  const Vec2 n(std::cos(t), std::sin(t)), tt(-std::sin(t), std::cos(t));
  return s.h(t) * n + s.dh(t) * tt;
}

/// max over a dense boundary sampling of <u, x>, refined by zooming on the best sample.
inline double brute_dual_norm(const Support& s, const Vec2& u, int samples = 4096) {
  double best = -INFINITY, at = 0.0, lo = 0.0, width = 2 * kPi;
  for (int level = 0; level < 4; ++level) {
    for (int i = 0; i <= samples; ++i) {
      const double t = lo + width * i / samples;
      const double v = u.dot(envelope_point(s, t));
      if (v > best) {
        best = v;
        at = t;
      }
    }
    width = 4.0 * width / samples;
    lo = at - width / 2;
  }
  return best;
}

/// Brute-force maximisation of <(p, -1), k> over the boundary of
/// K_eps = {(x, t) : (|t| / eps)^(3/2) + ||x||_K^(3/2) <= 1}, parametrised by the
/// normal angle of the horizontal slice and the slice scale r in [0, 1].
/// Each level samples about `per_level` points and zooms on the best one.
/// Returns (max value, horizontal part of the maximiser).
inline std::pair<double, Vec2> keps_bruteforce(const Support& s, double eps, const Vec2& p,
                                               int per_level = 100000, int levels = 4) {
  const int nt = static_cast<int>(std::sqrt(static_cast<double>(per_level)));
  const int nr = per_level / nt;
  double t_lo = 0.0, t_w = 2 * kPi, r_lo = 0.0, r_w = 1.0;
  double best = -INFINITY, bt = 0.0, br = 0.0;
  for (int level = 0; level < levels; ++level) {
    for (int i = 0; i <= nt; ++i) {
      const double t = t_lo + t_w * i / nt;
      const Vec2 b = envelope_point(s, t);
      const double pb = p.dot(b);
      for (int j = 0; j <= nr; ++j) {
        const double r = std::clamp(r_lo + r_w * j / nr, 0.0, 1.0);
        // Lower sheet t = -eps (1 - r^(3/2))^(2/3) pairs with the -1 component.
        const double height = eps * std::pow(1.0 - std::pow(r, 1.5), 2.0 / 3.0);
        const double v = r * pb + height;
        if (v > best) {
          best = v;
          bt = t;
          br = r;
        }
      }
    }
    t_w = 6.0 * t_w / nt;
    r_w = 6.0 * r_w / nr;
    t_lo = bt - t_w / 2;
    r_lo = br - r_w / 2;
  }
  return {best, br * envelope_point(s, bt)};
}

/// Radial profile of the constant-H solution on the disk of radius R with the
/// Euclidean body, Heisenberg field and zero boundary data:
/// u'(r) = H r^2 / (2 sqrt(1 - H^2 r^2 / 4)).
inline double disk_cmc_profile(double H, double R, double r) {
  const double a = H / 2.0;
  auto U = [a](double s) { return (std::asin(a * s) - a * s * std::sqrt(1.0 - a * a * s * s)) / (2.0 * a * a); };
  return U(r) - U(R);
}

inline double disk_cmc_slope(double H, double r) {
  return H * r * r / (2.0 * std::sqrt(1.0 - H * H * r * r / 4.0));
}

/// Anisotropic curvature of the circle of radius R for the ellipse body A where the
/// inner normal is N. The ellipse has radius of curvature det A / (N A N)^(3/2) at the
/// point with outer normal N, so the ratio of curvatures is det A / (R (N A N)^(3/2)).
inline double circle_ellipse_curvature(const Mat2& A, double R, const Vec2& N) {
  return A.determinant() / (R * std::pow(N.dot(A * N), 1.5));
}

}  // namespace oracle
