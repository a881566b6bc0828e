#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "synric/heat.hpp"
#include "synric/model.hpp"
#include "synric/transport.hpp"

namespace synric {

/// Extrapolated contraction-rate estimate with fit diagnostics. `value` is the
/// intercept of a linear-in-t least-squares fit over the finite-t quotients
/// raw[k] = -log(W_{t_k}/d)/t_k.
struct ThetaEstimate {
  double value = 0.0;
  std::vector<double> t_grid;
  std::vector<double> raw;
  double fit_residual = 0.0;
  int order = 1;  // 0: single point, 1: linear extrapolation
  bool low_confidence = false;
  int x = -1, y = -1;
  double d = 0.0;
};

namespace detail {

/// Least-squares line through (t, raw): returns (intercept, rms residual).
/// A single point degenerates to (raw[0], 0).
inline std::pair<double, double> linear_intercept(const std::vector<double>& ts,
                                                  const std::vector<double>& raw) {
  const int k = static_cast<int>(raw.size());
  if (k == 1) return {raw[0], 0.0};
  double mt = 0.0, mr = 0.0;
  for (int i = 0; i < k; ++i) {
    mt += ts[i];
    mr += raw[i];
  }
  mt /= k;
  mr /= k;
  double stt = 0.0, str = 0.0;
  for (int i = 0; i < k; ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    str += (ts[i] - mt) * (raw[i] - mr);
  }
  const double slope = str / stt;
  const double intercept = mr - slope * mt;
  KahanSum rss;
  for (int i = 0; i < k; ++i) {
    const double r = raw[i] - (intercept + slope * ts[i]);
    rss.add(r * r);
  }
  return {intercept, std::sqrt(rss.value() / k)};
}

}  // namespace detail

/// Geometric grid with k points from t0 to t1 inclusive.
inline std::vector<double> geometric_grid(double t0, double t1, int k) {
  if (k < 1 || t0 <= 0.0 || t1 < t0) throw Error("geometric_grid: bad parameters");
  std::vector<double> ts(k);
  if (k == 1) {
    ts[0] = t0;
    return ts;
  }
  const double ratio = std::pow(t1 / t0, 1.0 / (k - 1));
  double t = t0;
  for (int i = 0; i < k; ++i) {
    ts[i] = t;
    t *= ratio;
  }
  ts.back() = t1;
  return ts;
}

inline ThetaEstimate theta_plus(const FiniteMMS& space, const WittenOperator& op, int x, int y,
                                const std::vector<double>& t_grid,
                                const TransportOptions& topts = {}) {
  if (x == y) throw Error("theta_plus: x and y must differ");
  if (t_grid.empty()) throw Error("theta_plus: empty time grid");
  const double d = space.dist(x, y);
  const double h = op.mesh_h;
  const double lo = 2.0 * h * h, hi = d * d;
  if (t_grid.front() < lo * (1.0 - 1e-9) || t_grid.back() > hi * (1.0 + 1e-9))
    throw Error("theta_plus: time grid outside [2 mesh_h^2, d^2]");

  const auto curve = contraction_curve(space, op, x, y, t_grid, topts);
  ThetaEstimate est;
  est.x = x;
  est.y = y;
  est.d = d;
  est.t_grid = t_grid;
  est.raw.reserve(curve.size());
  for (const auto& [t, w] : curve) {
    if (w <= 0.0) throw Error("theta_plus: measures coalesced (W = 0)");
    est.raw.push_back(-std::log(w / d) / t);
  }

  if (est.raw.size() == 1) {
    est.value = est.raw[0];
    est.order = 0;
    return est;
  }
  const auto [intercept, residual] = detail::linear_intercept(est.t_grid, est.raw);
  est.value = intercept;
  est.fit_residual = residual;
  est.low_confidence = est.fit_residual > 0.1 * std::abs(est.value);
  return est;
}

/// Per-pair time grids for the theta sweeps: geometric from
/// max(2 h^2, lo_factor * h * d) to hi_factor * d^2.
struct ThetaGridPolicy {
  double lo_factor = 1.0;
  double hi_factor = 0.25;
  int count = 6;

  std::vector<double> grid(double h, double d) const {
    const double t0 = std::max(2.0 * h * h, lo_factor * h * d);
    const double t1 = hi_factor * d * d;
    if (t0 * (1.0 + 1e-9) >= t1) return {};  // pair too close to resolve
    return geometric_grid(t0, t1, count);
  }

  // Shared time lattice for pair sweeps: 2 h^2 * ratio^j. Pairs pick the
  // lattice points inside their window so evolved measures can be reused
  // across every pair touching the same endpoint. A pair with window span
  // at least ratio^2 is guaranteed two usable points.
  double lattice_ratio = 1.2;

  std::vector<double> lattice_grid(double h, double d, const std::vector<double>& lattice) const {
    const double t0 = std::max(2.0 * h * h, lo_factor * h * d);
    const double t1 = hi_factor * d * d;
    std::vector<double> out;
    for (double t : lattice)
      if (t >= t0 * (1.0 - 1e-12) && t <= t1 * (1.0 + 1e-12)) out.push_back(t);
    return out.size() >= 2 ? out : std::vector<double>{};
  }
};

struct ThetaStarRadius {
  double radius = 0.0;
  double value = 0.0;
  int pairs = 0;
  std::array<int, 2> argmax = {-1, -1};
};

struct ThetaStarResult {
  double value = 0.0;  // estimate at the smallest radius
  std::vector<ThetaStarRadius> sequence;
};

/// Localized contraction-rate sup: for each radius (descending) takes the max
/// of theta_plus over point pairs inside the ball around x, excluding pairs
/// too close to carry a valid time grid. The smallest radius supplies the
/// reported value; the whole sequence is kept for convergence inspection.
inline ThetaStarResult theta_star(const FiniteMMS& space, const WittenOperator& op, int x,
                                  const std::vector<double>& radii,
                                  const ThetaGridPolicy& policy = {},
                                  const TransportOptions& topts = {}, int workers = 1) {
  if (x < 0 || x >= space.n()) throw Error("theta_star: index out of range");
  if (radii.empty()) throw Error("theta_star: no radii given");
  for (size_t i = 1; i < radii.size(); ++i)
    if (radii[i] >= radii[i - 1]) throw Error("theta_star: radii must be strictly descending");
  const double h = op.mesh_h;
  if (radii.back() < 3.0 * h * (1.0 - 1e-12))
    throw Error("theta_star: smallest radius below 3 mesh_h");

  const double rmax = radii.front();
  std::vector<int> ball;
  for (int i = 0; i < space.n(); ++i)
    if (space.dist(x, i) <= rmax || i == x) ball.push_back(i);
  if (ball.size() < 2) throw Error("theta_star: ball contains fewer than 2 points");

  // Shared time lattice covering every admissible pair window.
  std::vector<double> lattice;
  {
    const double t_top = policy.hi_factor * (2.0 * rmax) * (2.0 * rmax);
    for (double t = 2.0 * h * h; t <= t_top * (1.0 + 1e-12); t *= policy.lattice_ratio)
      lattice.push_back(t);
  }

  struct PairTask {
    int y, z;
    double d;
    double sep;  // max distance to the center: pair lives in every r >= sep
    std::vector<double> grid;
  };
  std::vector<PairTask> tasks;
  for (size_t a = 0; a < ball.size(); ++a) {
    for (size_t b = a + 1; b < ball.size(); ++b) {
      const int y = ball[a], z = ball[b];
      const double d = space.dist(y, z);
      if (d < h) continue;  // sub-mesh separation is discretization noise
      auto grid = policy.lattice_grid(h, d, lattice);
      if (grid.empty()) continue;
      const double sep = std::max(space.dist(x, y), space.dist(x, z));
      tasks.push_back({y, z, d, sep, std::move(grid)});
    }
  }
  if (tasks.empty()) throw Error("theta_star: no resolvable pairs inside the ball");

  // Evolve each ball point once per lattice time; pairs only pay for the
  // transport solves.
  std::vector<int> ball_pos(space.n(), -1);
  for (size_t a = 0; a < ball.size(); ++a) ball_pos[ball[a]] = static_cast<int>(a);
  std::vector<std::vector<ProbVector>> evolved(ball.size());
  {
    std::atomic<size_t> next{0};
    const auto evolve_worker = [&]() {
      for (size_t a = next.fetch_add(1); a < ball.size(); a = next.fetch_add(1)) {
        evolved[a].resize(lattice.size());
        const auto d0 = dirac(space, ball[a]);
        for (size_t j = 0; j < lattice.size(); ++j)
          evolved[a][j] = heat_flow(op, d0, lattice[j]).density;
      }
    };
    std::vector<std::thread> pool;
    for (int wkr = 1; wkr < std::max(1, workers); ++wkr) pool.emplace_back(evolve_worker);
    evolve_worker();
    for (auto& th : pool) th.join();
  }
  const auto lattice_index = [&](double t) {
    size_t best = 0;
    for (size_t j = 1; j < lattice.size(); ++j)
      if (std::abs(lattice[j] - t) < std::abs(lattice[best] - t)) best = j;
    return best;
  };

  std::vector<double> values(tasks.size());
  {
    std::atomic<size_t> next{0};
    const auto pair_worker = [&]() {
      for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
        const auto& task = tasks[i];
        ThetaEstimate est;
        est.t_grid = task.grid;
        est.raw.reserve(task.grid.size());
        for (double t : task.grid) {
          const size_t j = lattice_index(t);
          const double c = w2_cost(space, evolved[ball_pos[task.y]][j],
                                   evolved[ball_pos[task.z]][j], topts);
          const double w = std::sqrt(std::max(0.0, c));
          if (w <= 0.0) throw Error("theta_star: measures coalesced (W = 0)");
          est.raw.push_back(-std::log(w / task.d) / t);
        }
        values[i] = detail::linear_intercept(task.grid, est.raw).first;
      }
    };
    std::vector<std::thread> pool;
    for (int wkr = 1; wkr < std::max(1, workers); ++wkr) pool.emplace_back(pair_worker);
    pair_worker();
    for (auto& th : pool) th.join();
  }

  ThetaStarResult res;
  for (double r : radii) {
    ThetaStarRadius row;
    row.radius = r;
    row.value = -kInf;
    for (size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].sep > r) continue;
      ++row.pairs;
      if (values[i] > row.value) {
        row.value = values[i];
        row.argmax = {tasks[i].y, tasks[i].z};
      }
    }
    if (row.pairs == 0)
      throw Error("theta_star: no resolvable pairs inside radius " + std::to_string(r));
    res.sequence.push_back(row);
  }
  res.value = res.sequence.back().value;
  return res;
}

/// Ric + Hess v evaluated on a unit tangent direction (orthonormal frame).
inline double ricci_infty(const ModelManifold& model, const Point& p, const Point& xi) {
  const double norm = std::hypot(xi[0], xi[1]);
  if (norm == 0.0) throw Error("ricci_infty: zero direction");
  if (std::abs(norm - 1.0) > 1e-9) throw Error("ricci_infty: direction not normalized");
  const double ric = model.dimension() == 2 ? model.sectional() : 0.0;
  return ric + model.hessian_potential(p, xi);
}

/// N-Bakry-Emery tensor: ricci_infty - <grad v, xi>^2 / (N - n). N = n is
/// admissible only for vanishing potential.
inline double ricci_N(const ModelManifold& model, const Point& p, const Point& xi, double N) {
  const int n = model.dimension();
  if (!(N >= n)) throw Error("ricci_N: N must satisfy N >= dimension");
  const double base = ricci_infty(model, p, xi);
  if (std::isinf(N)) return base;
  if (N == n) {
    if (model.weighted()) throw Error("ricci_N: N = n requires a vanishing potential");
    return base;
  }
  const Point g = model.grad_potential(p);
  const double dv = g[0] * xi[0] + g[1] * xi[1];
  return base - dv * dv / (N - n);
}

/// Average of ricci_infty along a sampled unit-speed geodesic (trapezoid).
inline double rho_gamma(const ModelManifold& model, const GeodesicPath& path) {
  const size_t r = path.points.size();
  if (r < 2) throw Error("rho_gamma: path needs at least 2 samples");
  KahanSum s;
  for (size_t i = 0; i < r; ++i) {
    const double f = ricci_infty(model, path.points[i], path.tangents[i]);
    s.add(i == 0 || i + 1 == r ? 0.5 * f : f);
  }
  return s.value() / (r - 1);
}

/// Frame norm of the curvature term in the two-sided contraction bound:
/// 0 on flat models, the constant curvature K on the round sphere.
inline double sigma_gamma(const ModelManifold& model, const GeodesicPath&) {
  return model.sectional();
}

struct SturmBounds {
  double lower = 0.0;  // rho(gamma)
  double upper = 0.0;  // rho + sigma tan^2(sqrt(sigma) d / 2); +inf past the cap
  double sigma = 0.0;
  double d = 0.0;
};

/// Two-sided bound bracket for the contraction rate of the pair (x, y).
inline SturmBounds sturm_bounds(const ModelManifold& model, const Point& x, const Point& y,
                                int samples = 257) {
  const auto path = model.geodesic(x, y, samples);
  SturmBounds b;
  b.d = path.length;
  b.lower = rho_gamma(model, path);
  b.sigma = sigma_gamma(model, path);
  if (b.sigma == 0.0) {
    b.upper = b.lower;
  } else {
    const double arg = std::sqrt(b.sigma) * b.d / 2.0;
    b.upper = arg >= kPi / 2.0 ? kInf : b.lower + b.sigma * std::tan(arg) * std::tan(arg);
  }
  return b;
}

/// Distortion coefficient of the curvature-dimension condition:
///   +inf                        K > 0, alpha > pi
///   (sin(t a)/(t sin a))^{N-1}  K > 0, alpha in [0, pi]
///   1                           K = 0
///   (sinh(t a)/(t sinh a))^{N-1}  K < 0
/// with alpha = sqrt(|K|/(N-1)) d. Removable limits at d = 0 and t = 0 are
/// evaluated through series for sin(x)/x.
inline double beta_distortion(double K, double N, double t, double d) {
  if (!(N > 1.0)) throw Error("beta_distortion: N must exceed 1");
  if (t < 0.0 || t > 1.0) throw Error("beta_distortion: t outside [0,1]");
  if (d < 0.0) throw Error("beta_distortion: negative distance");
  if (K == 0.0) return 1.0;
  const double alpha = std::sqrt(std::abs(K) / (N - 1.0)) * d;
  if (alpha == 0.0) return 1.0;
  if (K > 0.0) {
    if (alpha > kPi) return kInf;
    return std::exp((N - 1.0) * (log_sinc(t * alpha) - log_sinc(alpha)));
  }
  return std::exp((N - 1.0) * (log_sinch(t * alpha) - log_sinch(alpha)));
}

struct CdCheckPoint {
  double t = 0.0;
  double entropy_t = 0.0;
  double chord = 0.0;  // (1-t) Ent(mu0) + t Ent(mu1) - K/2 t(1-t) W^2
  double slack = 0.0;
  bool pass = false;
};

struct CdCheckReport {
  double w2 = 0.0;
  double entropy0 = 0.0, entropy1 = 0.0;
  std::vector<CdCheckPoint> points;
  double worst_violation = -kInf;  // max over t of entropy_t - chord
  bool pass = true;
};

// Entropy of the snapped interpolant wobbles at the cell scale; the check
// absorbs it with this allowance on top of the K-proportional slack.
inline double cd_discretization_allowance(double mesh_h) { return 2.0 * mesh_h; }

/// Evaluates the K-convexity inequality of the entropy along an approximate
/// displacement interpolation built from the optimal plan.
inline CdCheckReport cd_convexity_check(const FiniteMMS& space, const ModelManifold& model,
                                        const ProbVector& mu0, const ProbVector& mu1, double K,
                                        const std::vector<double>& ts,
                                        const TransportOptions& topts = {}) {
  CdCheckReport rep;
  auto [w, plan] = w2_exact(space, mu0, mu1, topts);
  rep.w2 = w;
  rep.entropy0 = entropy(space, mu0);
  rep.entropy1 = entropy(space, mu1);
  const double w2sq = w * w;
  const double slack = 0.05 * std::abs(K) * w2sq + cd_discretization_allowance(space.mesh_size());
  for (double t : ts) {
    if (t < 0.0 || t > 1.0) throw Error("cd_convexity_check: t outside [0,1]");
    CdCheckPoint pt;
    pt.t = t;
    const ProbVector mid = displacement_interpolate(space, plan, t, &model);
    pt.entropy_t = entropy(space, mid);
    pt.chord = (1.0 - t) * rep.entropy0 + t * rep.entropy1 - 0.5 * K * t * (1.0 - t) * w2sq;
    pt.slack = slack;
    pt.pass = pt.entropy_t <= pt.chord + slack;
    rep.worst_violation = std::max(rep.worst_violation, pt.entropy_t - pt.chord);
    rep.pass = rep.pass && pt.pass;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace synric
