#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <utility>
#include <vector>

#include "synric/space.hpp"
#include "synric/transport.hpp"

namespace synric {

/// Discrete Witten Laplacian acting on functions. Edge conductances
/// c_ij = sqrt(m_i m_j) / l_ij^2 make m_i L_ij symmetric, keep off-diagonal
/// entries nonnegative and row sums zero, and reduce to the (1,-2,1)/h^2
/// stencil on the uniform circle.
struct WittenOperator {
  Eigen::SparseMatrix<double> L;  // function-side generator
  Vec weight;                     // mass vector it is self-adjoint against
  double mesh_h = 0.0;            // characteristic cell size

  // Spectral factorization of S = D^{1/2} L D^{-1/2} (symmetric), computed at
  // build time for n <= spectral_threshold. exp(t L^T) mu then follows from
  // two basis changes, which is the dense-matrix-exponential path.
  bool has_spectral = false;
  Mat eigvecs;
  Vec eigvals;
  Vec sqrt_w, inv_sqrt_w;

  int n() const { return static_cast<int>(weight.size()); }
};

inline WittenOperator build_witten(const FiniteMMS& space, int spectral_threshold = 600) {
  if (space.adjacency.empty()) throw Error("build_witten: space has no adjacency");
  const int n = space.n();
  WittenOperator op;
  op.weight = space.weight;
  op.mesh_h = space.mesh_size();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(space.adjacency.size() * 4 + n);
  Vec diag = Vec::Zero(n);
  for (const auto& e : space.adjacency) {
    if (e.i == e.j) throw Error("build_witten: self loop in adjacency");
    const double c = std::sqrt(space.weight[e.i] * space.weight[e.j]) / (e.length * e.length);
    const double lij = c / space.weight[e.i];
    const double lji = c / space.weight[e.j];
    trip.emplace_back(e.i, e.j, lij);
    trip.emplace_back(e.j, e.i, lji);
    diag[e.i] -= lij;
    diag[e.j] -= lji;
  }
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);
  op.L.resize(n, n);
  op.L.setFromTriplets(trip.begin(), trip.end());  // duplicate edges sum

  if (n <= spectral_threshold) {
    op.sqrt_w = space.weight.cwiseSqrt();
    op.inv_sqrt_w = op.sqrt_w.cwiseInverse();
    Mat S = Mat::Zero(n, n);
    for (int col = 0; col < op.L.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op.L, col); it; ++it)
        S(it.row(), it.col()) = it.value() * op.sqrt_w[it.row()] * op.inv_sqrt_w[it.col()];
    // Symmetrize away rounding before factorizing.
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    if (es.info() != Eigen::Success) throw Error("build_witten: eigensolver failed");
    op.eigvecs = es.eigenvectors();
    op.eigvals = es.eigenvalues();
    op.has_spectral = true;
  }
  return op;
}

/// Probability measure evolved to time t.
struct HeatState {
  double t = 0.0;
  ProbVector density;
};

namespace detail {

inline Vec spectral_measure_flow(const WittenOperator& op, const Vec& mu, double t) {
  // exp(t L^T) = D^{1/2} U exp(t Lambda) U^T D^{-1/2} with D = diag(weight).
  Vec z = op.eigvecs.transpose() * (op.inv_sqrt_w.cwiseProduct(mu));
  z = (op.eigvals.array() * t).exp().matrix().cwiseProduct(z);
  return op.sqrt_w.cwiseProduct(op.eigvecs * z);
}

inline Vec spectral_function_flow(const WittenOperator& op, const Vec& f, double t) {
  Vec z = op.eigvecs.transpose() * (op.sqrt_w.cwiseProduct(f));
  z = (op.eigvals.array() * t).exp().matrix().cwiseProduct(z);
  return op.inv_sqrt_w.cwiseProduct(op.eigvecs * z);
}

/// Crank-Nicolson evolution of the measure-side generator A = L^T from time 0
/// to t. Rannacher start-up (four backward-Euler half steps) damps the
/// oscillatory response to Dirac data. Mass is renormalized every step.
/// A nonpositive dt_cap selects the default step bound mesh_h^2/4.
inline Vec cn_measure_flow(const WittenOperator& op, Vec mu, double t, double dt_cap = -1.0) {
  if (t <= 0.0) return mu;
  if (dt_cap <= 0.0) dt_cap = op.mesh_h * op.mesh_h / 4.0;
  const int steps = std::max(16, static_cast<int>(std::ceil(t / dt_cap)));
  const double dt = t / steps;
  const int n = op.n();

  Eigen::SparseMatrix<double> A = op.L.transpose();
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SparseMatrix<double> left = I - (dt / 2.0) * A;
  Eigen::SparseMatrix<double> right = I + (dt / 2.0) * A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(left);
  if (lu.info() != Eigen::Success) throw Error("heat_flow: time-step factorization failed");

  const double total = mu.sum();
  // Two implicit-Euler steps of size dt/2 cover the first full dt.
  for (int s = 0; s < 4; ++s) {
    mu = lu.solve(mu);
    mu *= total / mu.sum();
  }
  for (int s = 2; s < steps; ++s) {
    mu = lu.solve((right * mu).eval());
    mu *= total / mu.sum();
  }
  return mu;
}

}  // namespace detail

/// Evolves a probability measure under the heat semigroup: density(t) =
/// exp(t L^T) initial. Dense matrix exponential (spectral) when available,
/// Crank-Nicolson time stepping with step <= mesh_h^2/4 otherwise.
inline HeatState heat_flow(const WittenOperator& op, const ProbVector& initial, double t) {
  if (t < 0.0) throw Error("heat_flow: negative time");
  if (initial.size() != op.n()) throw Error("heat_flow: measure size mismatch");
  HeatState out;
  out.t = t;
  if (t == 0.0) {
    out.density = initial;
    return out;
  }
  Vec mu = op.has_spectral ? detail::spectral_measure_flow(op, initial.p, t)
                           : detail::cn_measure_flow(op, initial.p, t);
  // Clamp the rounding-level negatives the semigroup cannot produce exactly.
  for (int i = 0; i < mu.size(); ++i)
    if (mu[i] < 0.0) mu[i] = 0.0;
  mu /= mu.sum();
  out.density.p = std::move(mu);
  return out;
}

/// Function-side semigroup H_t f, the adjoint of the measure evolution.
inline Vec heat_flow_function(const WittenOperator& op, const Vec& f, double t) {
  if (t < 0.0) throw Error("heat_flow_function: negative time");
  if (f.size() != op.n()) throw Error("heat_flow_function: size mismatch");
  if (t == 0.0) return f;
  if (op.has_spectral) return detail::spectral_function_flow(op, f, t);
  // Same rational approximation as the measure side, applied to L.
  const double dt_cap = op.mesh_h * op.mesh_h / 4.0;
  const int steps = std::max(16, static_cast<int>(std::ceil(t / dt_cap)));
  const double dt = t / steps;
  const int n = op.n();
  Eigen::SparseMatrix<double> I(n, n);
  I.setIdentity();
  Eigen::SparseMatrix<double> left = I - (dt / 2.0) * op.L;
  Eigen::SparseMatrix<double> right = I + (dt / 2.0) * op.L;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(left);
  if (lu.info() != Eigen::Success) throw Error("heat_flow_function: factorization failed");
  Vec g = f;
  for (int s = 0; s < 4; ++s) g = lu.solve(g);
  for (int s = 2; s < steps; ++s) g = lu.solve((right * g).eval());
  return g;
}

/// Relative entropy sum mu_i log(mu_i / weight_i) with 0 log 0 = 0.
inline double entropy(const FiniteMMS& space, const ProbVector& mu) {
  if (mu.size() != space.n()) throw Error("entropy: size mismatch");
  KahanSum s;
  for (int i = 0; i < space.n(); ++i) {
    const double p = mu.p[i];
    if (p > 0.0) s.add(p * std::log(p / space.weight[i]));
  }
  return s.value();
}

/// W(H_t delta_x, H_t delta_y) sampled over an ascending positive time grid.
inline std::vector<std::pair<double, double>> contraction_curve(
    const FiniteMMS& space, const WittenOperator& op, int x, int y,
    const std::vector<double>& ts, const TransportOptions& topts = {}) {
  if (x < 0 || x >= space.n() || y < 0 || y >= space.n())
    throw Error("contraction_curve: index out of range");
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= 0.0) throw Error("contraction_curve: times must be positive");
    if (i > 0 && ts[i] <= ts[i - 1]) throw Error("contraction_curve: times must ascend");
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(ts.size());
  if (x == y) {
    for (double t : ts) curve.emplace_back(t, 0.0);
    return curve;
  }
  const ProbVector dx = dirac(space, x), dy = dirac(space, y);
  for (double t : ts) {
    const auto hx = heat_flow(op, dx, t);
    const auto hy = heat_flow(op, dy, t);
    const double c = w2_cost(space, hx.density, hy.density, topts);
    curve.emplace_back(t, std::sqrt(std::max(0.0, c)));
  }
  return curve;
}

}  // namespace synric
