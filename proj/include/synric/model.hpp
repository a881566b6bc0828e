#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "synric/space.hpp"

namespace synric {

using Point = std::array<double, 2>;

/// Truncated Fourier series c0 + sum a_k cos(k u) + b_k sin(k u) with exact
/// derivatives. Coefficient index 0 of cos is the constant term.
struct FourierSeries {
  std::vector<double> cos_coef;  // cos_coef[k] multiplies cos(k u)
  std::vector<double> sin_coef;  // sin_coef[k] multiplies sin(k u), k >= 1

  bool zero() const {
    for (double c : cos_coef)
      if (c != 0.0) return false;
    for (double c : sin_coef)
      if (c != 0.0) return false;
    return true;
  }
  double eval(double u) const {
    double v = 0.0;
    for (size_t k = 0; k < cos_coef.size(); ++k) v += cos_coef[k] * std::cos(k * u);
    for (size_t k = 1; k < sin_coef.size(); ++k) v += sin_coef[k] * std::sin(k * u);
    return v;
  }
  double d1(double u) const {
    double v = 0.0;
    for (size_t k = 1; k < cos_coef.size(); ++k) v -= cos_coef[k] * k * std::sin(k * u);
    for (size_t k = 1; k < sin_coef.size(); ++k) v += sin_coef[k] * k * std::cos(k * u);
    return v;
  }
  double d2(double u) const {
    double v = 0.0;
    for (size_t k = 1; k < cos_coef.size(); ++k) v -= cos_coef[k] * k * k * std::cos(k * u);
    for (size_t k = 1; k < sin_coef.size(); ++k) v -= sin_coef[k] * k * k * std::sin(k * u);
    return v;
  }
};

/// Polynomial in cos(theta): sum c_k cos(theta)^k. Axially symmetric sphere
/// potentials keep the Hessian closed-form along meridians.
struct CosPolynomial {
  std::vector<double> coef;  // coef[k] multiplies cos(theta)^k

  bool zero() const {
    for (double c : coef)
      if (c != 0.0) return false;
    return true;
  }
  double eval(double theta) const {
    const double c = std::cos(theta);
    double v = 0.0, p = 1.0;
    for (size_t k = 0; k < coef.size(); ++k) {
      v += coef[k] * p;
      p *= c;
    }
    return v;
  }
  // d/dtheta sum c_k cos^k = -sin(theta) * sum k c_k cos^{k-1}
  double d1(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    double q = 0.0, p = 1.0;
    for (size_t k = 1; k < coef.size(); ++k) {
      q += coef[k] * k * p;
      p *= c;
    }
    return -s * q;
  }
  double d2(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    double q1 = 0.0, q2 = 0.0;
    double p1 = 1.0, p2 = 1.0;  // c^{k-1}, c^{k-2}
    for (size_t k = 1; k < coef.size(); ++k) {
      q1 += coef[k] * k * p1;
      if (k >= 2) {
        q2 += coef[k] * k * (k - 1) * p2;
        p2 *= c;
      }
      p1 *= c;
    }
    return -c * q1 + s * s * q2;
  }
};

enum class ModelKind { Circle, Sphere, Torus };

struct GeodesicPath {
  double length = 0.0;
  std::vector<Point> points;
  std::vector<Point> tangents;  // unit tangent in the orthonormal frame
};

/// Constant-sectional-curvature model manifold with an analytic weight
/// potential v. Geodesics, distances and curvature tensors are closed-form.
///
/// Coordinates: circle points are (theta, 0); sphere points are
/// (polar theta in (0,pi), azimuth phi); torus points are (x, y) in
/// [0,a) x [0,b). Tangents are components in the orthonormal frame
/// (e_theta, e_phi) on the sphere, (e_x, e_y) on the torus.
struct ModelManifold {
  ModelKind kind = ModelKind::Circle;
  double radius = 1.0;   // circle, sphere
  double side_a = 1.0;   // torus
  double side_b = 1.0;   // torus
  FourierSeries v_angle;     // circle: v(theta)
  CosPolynomial v_polar;     // sphere: v(theta), axially symmetric
  FourierSeries v_x, v_y;    // torus: v(x,y) = v_x(2pi x/a) + v_y(2pi y/b)

  int dimension() const { return kind == ModelKind::Circle ? 1 : 2; }

  bool weighted() const {
    switch (kind) {
      case ModelKind::Circle: return !v_angle.zero();
      case ModelKind::Sphere: return !v_polar.zero();
      case ModelKind::Torus: return !(v_x.zero() && v_y.zero());
    }
    return false;
  }

  double sectional() const {
    return kind == ModelKind::Sphere ? 1.0 / (radius * radius) : 0.0;
  }

  double injectivity_radius() const {
    switch (kind) {
      case ModelKind::Circle: return kPi * radius;
      case ModelKind::Sphere: return kPi * radius;
      case ModelKind::Torus: return 0.5 * std::min(side_a, side_b);
    }
    return 0.0;
  }

  double potential(const Point& p) const {
    switch (kind) {
      case ModelKind::Circle: return v_angle.eval(p[0]);
      case ModelKind::Sphere: return v_polar.eval(p[0]);
      case ModelKind::Torus:
        return v_x.eval(2.0 * kPi * p[0] / side_a) + v_y.eval(2.0 * kPi * p[1] / side_b);
    }
    return 0.0;
  }

  /// Gradient of v in the orthonormal frame at p.
  Point grad_potential(const Point& p) const {
    switch (kind) {
      case ModelKind::Circle:
        return {v_angle.d1(p[0]) / radius, 0.0};
      case ModelKind::Sphere:
        return {v_polar.d1(p[0]) / radius, 0.0};
      case ModelKind::Torus: {
        const double cx = 2.0 * kPi / side_a, cy = 2.0 * kPi / side_b;
        return {cx * v_x.d1(cx * p[0]), cy * v_y.d1(cy * p[1])};
      }
    }
    return {0.0, 0.0};
  }

  /// Hess v(xi, xi) for a unit tangent xi in the orthonormal frame at p.
  double hessian_potential(const Point& p, const Point& xi) const {
    switch (kind) {
      case ModelKind::Circle:
        return v_angle.d2(p[0]) / (radius * radius);
      case ModelKind::Sphere: {
        const double r2 = radius * radius;
        const double along = v_polar.d2(p[0]) / r2;
        const double theta = p[0];
        const double across = std::cos(theta) / std::sin(theta) * v_polar.d1(theta) / r2;
        return xi[0] * xi[0] * along + xi[1] * xi[1] * across;
      }
      case ModelKind::Torus: {
        const double cx = 2.0 * kPi / side_a, cy = 2.0 * kPi / side_b;
        return xi[0] * xi[0] * cx * cx * v_x.d2(cx * p[0]) +
               xi[1] * xi[1] * cy * cy * v_y.d2(cy * p[1]);
      }
    }
    return 0.0;
  }

  double distance(const Point& p, const Point& q) const {
    switch (kind) {
      case ModelKind::Circle: {
        double d = std::fmod(std::abs(p[0] - q[0]), 2.0 * kPi);
        if (d > kPi) d = 2.0 * kPi - d;
        return radius * d;
      }
      case ModelKind::Sphere: {
        double dot = std::cos(p[0]) * std::cos(q[0]) +
                     std::sin(p[0]) * std::sin(q[0]) * std::cos(p[1] - q[1]);
        dot = std::min(1.0, std::max(-1.0, dot));
        return radius * std::acos(dot);
      }
      case ModelKind::Torus: {
        double best = kInf;
        for (int sx = -1; sx <= 1; ++sx)
          for (int sy = -1; sy <= 1; ++sy) {
            const double dx = q[0] - p[0] + sx * side_a;
            const double dy = q[1] - p[1] + sy * side_b;
            best = std::min(best, std::hypot(dx, dy));
          }
        return best;
      }
    }
    return 0.0;
  }

  /// Point at arclength fraction u in [0,1] along the minimizing geodesic
  /// from x to y. Throws on cut-locus pairs.
  Point point_along(const Point& x, const Point& y, double u) const {
    const double d = distance(x, y);
    if (d == 0.0) return x;
    const double cut_tol = 1e-9 * injectivity_radius();
    switch (kind) {
      case ModelKind::Circle: {
        if (d >= kPi * radius - cut_tol)
          throw Error("point_along: no unique minimizing geodesic (antipodal pair)");
        const double delta = std::remainder(y[0] - x[0], 2.0 * kPi);
        return {x[0] + u * delta, 0.0};
      }
      case ModelKind::Sphere: {
        if (d >= kPi * radius - cut_tol)
          throw Error("point_along: no unique minimizing geodesic (antipodal pair)");
        const auto to3 = [&](const Point& p) -> std::array<double, 3> {
          return {std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]),
                  std::cos(p[0])};
        };
        const auto a = to3(x), b = to3(y);
        const double psi = d / radius, sp = std::sin(psi);
        const double ca = std::sin((1.0 - u) * psi) / sp, cb = std::sin(u * psi) / sp;
        std::array<double, 3> g;
        for (int c = 0; c < 3; ++c) g[c] = ca * a[c] + cb * b[c];
        return {std::acos(std::min(1.0, std::max(-1.0, g[2]))), std::atan2(g[1], g[0])};
      }
      case ModelKind::Torus: {
        double bx = 0.0, by = 0.0, best = kInf, second = kInf;
        for (int sx = -1; sx <= 1; ++sx)
          for (int sy = -1; sy <= 1; ++sy) {
            const double dx = y[0] - x[0] + sx * side_a;
            const double dy = y[1] - x[1] + sy * side_b;
            const double len = std::hypot(dx, dy);
            if (len < best) {
              second = best;
              best = len;
              bx = dx;
              by = dy;
            } else if (len < second) {
              second = len;
            }
          }
        if (second - best <= cut_tol)
          throw Error("point_along: no unique minimizing geodesic (cut locus pair)");
        double px = x[0] + u * bx, py = x[1] + u * by;
        px -= side_a * std::floor(px / side_a);
        py -= side_b * std::floor(py / side_b);
        return {px, py};
      }
    }
    throw Error("point_along: unknown model kind");
  }

  /// Unit-speed minimizing geodesic from x to y sampled at `samples` points
  /// equally spaced in arclength (endpoints included). Throws on cut-locus
  /// pairs, where no unique minimizer exists.
  GeodesicPath geodesic(const Point& x, const Point& y, int samples) const {
    if (samples < 2) throw Error("geodesic: need at least 2 samples");
    const double d = distance(x, y);
    if (d == 0.0) throw Error("geodesic: endpoints coincide");
    const double cut_tol = 1e-9 * injectivity_radius();

    GeodesicPath path;
    path.length = d;
    path.points.reserve(samples);
    path.tangents.reserve(samples);

    switch (kind) {
      case ModelKind::Circle: {
        if (d >= kPi * radius - cut_tol)
          throw Error("geodesic: no unique minimizing geodesic (antipodal pair)");
        double delta = std::remainder(y[0] - x[0], 2.0 * kPi);
        const double sgn = delta >= 0.0 ? 1.0 : -1.0;
        for (int k = 0; k < samples; ++k) {
          const double s = d * k / (samples - 1);
          path.points.push_back({x[0] + sgn * s / radius, 0.0});
          path.tangents.push_back({sgn, 0.0});
        }
        return path;
      }
      case ModelKind::Sphere: {
        if (d >= kPi * radius - cut_tol)
          throw Error("geodesic: no unique minimizing geodesic (antipodal pair)");
        const auto to3 = [&](const Point& p) -> std::array<double, 3> {
          return {std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]),
                  std::cos(p[0])};
        };
        const auto a = to3(x), b = to3(y);
        const double psi = d / radius;
        const double sp = std::sin(psi);
        for (int k = 0; k < samples; ++k) {
          const double u = static_cast<double>(k) / (samples - 1);
          std::array<double, 3> g, gdot;
          const double ca = std::sin((1.0 - u) * psi) / sp, cb = std::sin(u * psi) / sp;
          const double da = -psi * std::cos((1.0 - u) * psi) / sp,
                       db = psi * std::cos(u * psi) / sp;
          for (int c = 0; c < 3; ++c) {
            g[c] = ca * a[c] + cb * b[c];
            gdot[c] = da * a[c] + db * b[c];
          }
          const double theta = std::acos(std::min(1.0, std::max(-1.0, g[2])));
          const double phi = std::atan2(g[1], g[0]);
          // Orthonormal frame at g: e_theta, e_phi.
          const std::array<double, 3> et = {std::cos(theta) * std::cos(phi),
                                            std::cos(theta) * std::sin(phi), -std::sin(theta)};
          const std::array<double, 3> ep = {-std::sin(phi), std::cos(phi), 0.0};
          double tth = 0.0, tph = 0.0;
          for (int c = 0; c < 3; ++c) {
            tth += gdot[c] * et[c];
            tph += gdot[c] * ep[c];
          }
          const double norm = std::hypot(tth, tph);
          path.points.push_back({theta, phi});
          path.tangents.push_back(norm > 0 ? Point{tth / norm, tph / norm} : Point{1.0, 0.0});
        }
        return path;
      }
      case ModelKind::Torus: {
        double bx = 0.0, by = 0.0, best = kInf, second = kInf;
        for (int sx = -1; sx <= 1; ++sx)
          for (int sy = -1; sy <= 1; ++sy) {
            const double dx = y[0] - x[0] + sx * side_a;
            const double dy = y[1] - x[1] + sy * side_b;
            const double len = std::hypot(dx, dy);
            if (len < best) {
              second = best;
              best = len;
              bx = dx;
              by = dy;
            } else if (len < second) {
              second = len;
            }
          }
        if (second - best <= cut_tol)
          throw Error("geodesic: no unique minimizing geodesic (cut locus pair)");
        const Point tangent = {bx / best, by / best};
        for (int k = 0; k < samples; ++k) {
          const double u = static_cast<double>(k) / (samples - 1);
          double px = x[0] + u * bx, py = x[1] + u * by;
          px -= side_a * std::floor(px / side_a);
          py -= side_b * std::floor(py / side_b);
          path.points.push_back({px, py});
          path.tangents.push_back(tangent);
        }
        return path;
      }
    }
    throw Error("geodesic: unknown model kind");
  }
};

/// Samples the model uniformly in parameter space and assembles the finite
/// metric measure space: exact geodesic distances, midpoint-rule cell masses
/// e^{-v(x_i)} * cell volume, grid-neighbor adjacency.
///
/// Resolution: circle uses res_a points; the torus an res_a x res_a grid; the
/// sphere an res_a x res_b (polar x azimuth) grid, res_b defaulting to 2*res_a.
inline FiniteMMS discretize(const ModelManifold& model, int res_a, int res_b = 0) {
  FiniteMMS space;
  switch (model.kind) {
    case ModelKind::Circle: {
      const int n = res_a;
      if (n < 4) throw Error("discretize: circle resolution too small to resolve geometry");
      const double h = 2.0 * kPi * model.radius / n;
      space.dist = Mat::Zero(n, n);
      space.weight = Vec::Zero(n);
      space.labels.resize(n);
      for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * kPi * i / n;
        space.labels[i] = {theta, 0.0};
        space.weight[i] = std::exp(-model.v_angle.eval(theta)) * h;
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const int k = std::min(j - i, n - (j - i));
          const double d = model.radius * 2.0 * kPi * k / n;
          space.dist(i, j) = space.dist(j, i) = d;
        }
      for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        space.adjacency.push_back({i, j, space.dist(i, j)});
      }
      return space;
    }
    case ModelKind::Sphere: {
      const int nt = res_a;
      const int np = res_b > 0 ? res_b : 2 * res_a;
      if (nt < 4 || np < 8)
        throw Error("discretize: sphere resolution too small to resolve geometry");
      const int n = nt * np;
      const double r = model.radius;
      const double dth = kPi / nt, dph = 2.0 * kPi / np;
      space.dist = Mat::Zero(n, n);
      space.weight = Vec::Zero(n);
      space.labels.resize(n);
      for (int k = 0; k < nt; ++k) {
        const double theta = (k + 0.5) * dth;
        const double band = r * r * (std::cos(k * dth) - std::cos((k + 1) * dth)) * dph;
        for (int l = 0; l < np; ++l) {
          const int idx = k * np + l;
          space.labels[idx] = {theta, l * dph};
          space.weight[idx] = std::exp(-model.v_polar.eval(theta)) * band;
        }
      }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double d = model.distance(space.labels[i], space.labels[j]);
          space.dist(i, j) = space.dist(j, i) = d;
        }
      for (int k = 0; k < nt; ++k)
        for (int l = 0; l < np; ++l) {
          const int idx = k * np + l;
          const int right = k * np + (l + 1) % np;
          space.adjacency.push_back({idx, right, space.dist(idx, right)});
          if (k + 1 < nt) {
            const int down = (k + 1) * np + l;
            space.adjacency.push_back({idx, down, space.dist(idx, down)});
          }
        }
      return space;
    }
    case ModelKind::Torus: {
      const int nr = res_a;
      if (nr < 3) throw Error("discretize: torus resolution too small to resolve geometry");
      const int n = nr * nr;
      const double hx = model.side_a / nr, hy = model.side_b / nr;
      space.dist = Mat::Zero(n, n);
      space.weight = Vec::Zero(n);
      space.labels.resize(n);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) {
          const int idx = i * nr + j;
          const Point p = {i * hx, j * hy};
          space.labels[idx] = p;
          space.weight[idx] = std::exp(-model.potential(p)) * hx * hy;
        }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double d = model.distance(space.labels[i], space.labels[j]);
          space.dist(i, j) = space.dist(j, i) = d;
        }
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) {
          const int idx = i * nr + j;
          const int right = i * nr + (j + 1) % nr;
          const int down = ((i + 1) % nr) * nr + j;
          space.adjacency.push_back({idx, right, space.dist(idx, right)});
          space.adjacency.push_back({idx, down, space.dist(idx, down)});
        }
      return space;
    }
  }
  throw Error("discretize: unknown model kind");
}

/// Index of the sample point nearest to p in the model metric.
inline int nearest_sample(const ModelManifold& model, const FiniteMMS& space, const Point& p) {
  if (space.labels.empty()) throw Error("nearest_sample: space carries no coordinates");
  int best = 0;
  double bd = kInf;
  for (int i = 0; i < space.n(); ++i) {
    const double d = model.distance(space.labels[i], p);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

}  // namespace synric
