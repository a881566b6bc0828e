#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "synric/model.hpp"
#include "synric/space.hpp"

namespace synric {

/// Transport plan between two discrete probability measures.
struct Coupling {
  Mat pi;
  Vec mu, nu;
  double cost = 0.0;  // sum_ij dist(i,j)^2 pi(i,j)
};

struct CouplingReport {
  double row_error = 0.0;   // max |row sum - mu|
  double col_error = 0.0;   // max |col sum - nu|
  double cost_error = 0.0;  // |stored cost - recomputed cost|
  bool row_ok = false, col_ok = false, cost_ok = false;
  bool valid() const { return row_ok && col_ok && cost_ok; }
};

struct TransportOptions {
  // Atoms with mass <= support_cutoff are folded into the largest atom before
  // solving. 0 keeps every positive atom.
  double support_cutoff = 0.0;
  // Entering-arc tolerance relative to the largest squared distance.
  double pivot_tol = 1e-12;
};

namespace detail {

/// Network simplex on the uncapacitated transportation problem
///   min sum c_ij f_ij   s.t. row sums = supply, col sums = demand, f >= 0.
/// Spanning-tree basis with an artificial root, block pricing on the entering
/// arc, subtree re-rooting on each pivot. Supplies are real-valued; the basis
/// at termination is an exact vertex of the transportation polytope.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<double> cost, double pivot_tol)
      : m_(static_cast<int>(supply.size())),
        k_(static_cast<int>(demand.size())),
        cost_(std::move(cost)),
        supply_(std::move(supply)),
        demand_(std::move(demand)) {
    if (static_cast<int>(cost_.size()) != m_ * k_)
      throw Error("transport: cost matrix size mismatch");
    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    eps_ = pivot_tol * std::max(1.0, cmax);
    big_ = 1.0 + cmax;
  }

  void solve() {
    init_tree();
    const long arc_count = static_cast<long>(m_) * k_;
    const long block = std::max<long>(64, static_cast<long>(std::sqrt((double)arc_count)));
    const long max_pivots = 2000000 + 100L * (m_ + k_);
    long cursor = 0;
    long pivots = 0;
    while (true) {
      // Block search: best reduced cost among the next `block` arcs.
      long best_arc = -1;
      double best_rc = -eps_;
      long scanned = 0;
      while (scanned < arc_count) {
        const long stop = std::min(arc_count, cursor + block);
        for (long a = cursor; a < stop; ++a) {
          const int i = static_cast<int>(a / k_), j = static_cast<int>(a % k_);
          const double rc = cost_[a] - y_[i] + y_[m_ + j];
          if (rc < best_rc) {
            best_rc = rc;
            best_arc = a;
          }
        }
        scanned += stop - cursor;
        cursor = stop == arc_count ? 0 : stop;
        if (best_arc >= 0) break;
      }
      if (best_arc < 0) break;  // optimal
      pivot(static_cast<int>(best_arc / k_), m_ + static_cast<int>(best_arc % k_),
            static_cast<int>(best_arc));
      if (++pivots > max_pivots)
        throw Error("transport: pivot budget exceeded (degenerate instance?)");
    }
    for (int v = 0; v < m_ + k_; ++v)
      if (parc_[v] < 0 && std::abs(flow_[v]) > 1e-9)
        throw Error("transport: infeasible marginals (artificial flow left)");
  }

  double objective() const {
    KahanSum s;
    for (int v = 0; v < m_ + k_; ++v)
      if (parc_[v] >= 0 && flow_[v] != 0.0) s.add(cost_[parc_[v]] * flow_[v]);
    return s.value();
  }

  /// Visits every basic real arc as (source, sink, flow).
  template <typename F>
  void for_each_flow(F&& f) const {
    for (int v = 0; v < m_ + k_; ++v) {
      if (parc_[v] < 0 || flow_[v] <= 0.0) continue;
      const int a = parc_[v];
      f(a / k_, a % k_, flow_[v]);
    }
  }

 private:
  int root() const { return m_ + k_; }

  void init_tree() {
    const int nn = m_ + k_ + 1;
    parent_.assign(nn, -1);
    parc_.assign(nn, -1);   // -1 marks the artificial root arc
    up_.assign(nn, false);  // arc directed node -> parent?
    depth_.assign(nn, 0);
    flow_.assign(nn, 0.0);
    y_.assign(nn, 0.0);
    children_.assign(nn, {});
    for (int v = 0; v < m_ + k_; ++v) {
      parent_[v] = root();
      depth_[v] = 1;
      children_[root()].push_back(v);
      if (v < m_) {
        up_[v] = true;  // source -> root
        flow_[v] = supply_[v];
        y_[v] = big_;
      } else {
        up_[v] = false;  // root -> sink
        flow_[v] = demand_[v - m_];
        y_[v] = -big_;
      }
    }
  }

  double arc_cost(int v) const { return parc_[v] >= 0 ? cost_[parc_[v]] : big_; }

  // Entering arc e: u -> w with negative reduced cost. Push flow around the
  // unique tree cycle, drop the blocking arc, re-hang the detached subtree.
  //
  // Orientation bookkeeping: traversing the return path w -> lca -> u, an arc
  // aligned with the traversal gains delta, an opposed arc loses delta. On the
  // w side the traversal runs child -> parent, so arcs with up_ = false
  // decrease; on the u side it runs parent -> child, so arcs with up_ = true
  // decrease. The first minimal decreasing arc found (w side scanned first)
  // leaves the basis.
  void pivot(int u, int w, int entering) {
    double delta = kInf;
    int leave = -1;
    bool leave_on_w_side = false;
    {
      int x = w, z = u;
      int dx = depth_[x], dz = depth_[z];
      while (dx > dz) {
        if (!up_[x] && flow_[x] < delta) {
          delta = flow_[x];
          leave = x;
          leave_on_w_side = true;
        }
        x = parent_[x];
        --dx;
      }
      while (dz > dx) {
        if (up_[z] && flow_[z] < delta) {
          delta = flow_[z];
          leave = z;
          leave_on_w_side = false;
        }
        z = parent_[z];
        --dz;
      }
      while (x != z) {
        if (!up_[x] && flow_[x] < delta) {
          delta = flow_[x];
          leave = x;
          leave_on_w_side = true;
        }
        if (up_[z] && flow_[z] < delta) {
          delta = flow_[z];
          leave = z;
          leave_on_w_side = false;
        }
        x = parent_[x];
        z = parent_[z];
      }
    }
    if (leave < 0) throw Error("transport: unbounded pivot (internal error)");

    {
      int x = w, z = u;
      int dx = depth_[x], dz = depth_[z];
      while (dx > dz) {
        flow_[x] += up_[x] ? delta : -delta;
        x = parent_[x];
        --dx;
      }
      while (dz > dx) {
        flow_[z] += up_[z] ? -delta : delta;
        z = parent_[z];
        --dz;
      }
      while (x != z) {
        flow_[x] += up_[x] ? delta : -delta;
        flow_[z] += up_[z] ? -delta : delta;
        x = parent_[x];
        z = parent_[z];
      }
    }

    // Removing parc_[leave] detaches the subtree rooted at `leave`; the
    // entering endpoint inside it becomes the subtree's new root.
    const int attach_new = leave_on_w_side ? w : u;
    const int attach_out = leave_on_w_side ? u : w;
    detach_child(parent_[leave], leave);

    std::vector<int> chain;  // attach_new -> ... -> leave via old parents
    for (int x = attach_new; x != leave; x = parent_[x]) chain.push_back(x);
    chain.push_back(leave);

    std::vector<int> old_parc(chain.size());
    std::vector<char> old_up(chain.size());
    std::vector<double> old_flow(chain.size());
    for (size_t i = 0; i < chain.size(); ++i) {
      old_parc[i] = parc_[chain[i]];
      old_up[i] = up_[chain[i]];
      old_flow[i] = flow_[chain[i]];
    }
    // Old edge i: parent[chain[i]] = chain[i+1], so chain[i] sits in
    // children_[chain[i+1]]. Reverse every edge along the chain.
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
      detach_child(chain[i + 1], chain[i]);
      parent_[chain[i + 1]] = chain[i];
      children_[chain[i]].push_back(chain[i + 1]);
      parc_[chain[i + 1]] = old_parc[i];
      up_[chain[i + 1]] = !old_up[i];
      flow_[chain[i + 1]] = old_flow[i];
    }
    parent_[attach_new] = attach_out;
    children_[attach_out].push_back(attach_new);
    parc_[attach_new] = entering;
    up_[attach_new] = attach_new == u;  // entering arc is directed u -> w
    flow_[attach_new] = delta;

    // Refresh depth and potential across the re-hung subtree.
    stack_.clear();
    stack_.push_back(attach_new);
    while (!stack_.empty()) {
      const int v = stack_.back();
      stack_.pop_back();
      const int p = parent_[v];
      depth_[v] = depth_[p] + 1;
      y_[v] = up_[v] ? arc_cost(v) + y_[p] : y_[p] - arc_cost(v);
      for (int c : children_[v]) stack_.push_back(c);
    }
  }

  void detach_child(int par, int child) {
    auto& ch = children_[par];
    for (size_t i = 0; i < ch.size(); ++i) {
      if (ch[i] == child) {
        ch[i] = ch.back();
        ch.pop_back();
        return;
      }
    }
  }

  int m_, k_;
  std::vector<double> cost_, supply_, demand_;
  double eps_ = 0.0, big_ = 0.0;
  std::vector<int> parent_, parc_, depth_;
  std::vector<bool> up_;
  std::vector<double> flow_, y_;
  std::vector<std::vector<int>> children_;
  std::vector<int> stack_;
};

struct Support {
  std::vector<int> idx;
  std::vector<double> mass;
};

inline Support truncate_support(const Vec& p, double cutoff) {
  Support s;
  double removed = 0.0;
  int argmax = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p[i] > p[argmax]) argmax = i;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] > cutoff || i == argmax) {
      s.idx.push_back(i);
      s.mass.push_back(p[i]);
    } else {
      removed += p[i];
    }
  }
  // Fold the removed mass into the heaviest atom so the total is unchanged.
  for (size_t q = 0; q < s.idx.size(); ++q)
    if (s.idx[q] == argmax) s.mass[q] += removed;
  return s;
}

}  // namespace detail

/// Exact 2-Wasserstein distance and an optimal plan, solved as a
/// min-cost-flow over the transportation polytope with squared-distance costs.
inline std::pair<double, Coupling> w2_exact(const FiniteMMS& space, const ProbVector& mu,
                                            const ProbVector& nu,
                                            const TransportOptions& opts = {}) {
  const int n = space.n();
  if (mu.size() != n || nu.size() != n) throw Error("w2_exact: marginal size mismatch");
  if (!mu.valid() || !nu.valid()) throw Error("w2_exact: marginals are not probability vectors");

  Coupling plan;
  plan.mu = mu.p;
  plan.nu = nu.p;
  plan.pi = Mat::Zero(n, n);

  if (mu.p == nu.p) {
    plan.pi.diagonal() = mu.p;
    plan.cost = 0.0;
    return {0.0, plan};
  }

  const auto src = detail::truncate_support(mu.p, opts.support_cutoff);
  const auto snk = detail::truncate_support(nu.p, opts.support_cutoff);
  const int m = static_cast<int>(src.idx.size());
  const int k = static_cast<int>(snk.idx.size());

  if (m == 1 && k == 1) {
    const double d = space.dist(src.idx[0], snk.idx[0]);
    plan.pi(src.idx[0], snk.idx[0]) = 1.0;
    plan.cost = d * d;
    return {d, plan};
  }

  std::vector<double> cost(static_cast<size_t>(m) * k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double d = space.dist(src.idx[i], snk.idx[j]);
      cost[static_cast<size_t>(i) * k + j] = d * d;
    }

  detail::TransportSimplex simplex(src.mass, snk.mass, std::move(cost), opts.pivot_tol);
  simplex.solve();

  KahanSum total;
  simplex.for_each_flow([&](int i, int j, double f) {
    plan.pi(src.idx[i], snk.idx[j]) += f;
    const double d = space.dist(src.idx[i], snk.idx[j]);
    total.add(d * d * f);
  });
  plan.cost = std::max(0.0, total.value());
  return {std::sqrt(plan.cost), plan};
}

/// Cost-only variant used inside contraction curves; skips materializing the
/// n x n plan.
inline double w2_cost(const FiniteMMS& space, const ProbVector& mu, const ProbVector& nu,
                      const TransportOptions& opts = {}) {
  const int n = space.n();
  if (mu.size() != n || nu.size() != n) throw Error("w2_cost: marginal size mismatch");
  if (mu.p == nu.p) return 0.0;

  const auto src = detail::truncate_support(mu.p, opts.support_cutoff);
  const auto snk = detail::truncate_support(nu.p, opts.support_cutoff);
  const int m = static_cast<int>(src.idx.size());
  const int k = static_cast<int>(snk.idx.size());
  if (m == 1 && k == 1) {
    const double d = space.dist(src.idx[0], snk.idx[0]);
    return d * d;
  }
  std::vector<double> cost(static_cast<size_t>(m) * k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double d = space.dist(src.idx[i], snk.idx[j]);
      cost[static_cast<size_t>(i) * k + j] = d * d;
    }
  detail::TransportSimplex simplex(src.mass, snk.mass, std::move(cost), opts.pivot_tol);
  simplex.solve();
  return std::max(0.0, simplex.objective());
}

struct EntropicResult {
  double w_eps = 0.0;  // debiased entropic distance
  Coupling plan;       // plan of the (mu, nu) problem with its transport cost
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline double logsumexp(const std::vector<double>& terms) {
  double mx = -kInf;
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

struct SinkhornRun {
  Mat pi;          // on the support subsets
  double cost;     // <pi, C>
  double col_err;  // worst column-marginal violation
  int iterations;
};

inline SinkhornRun sinkhorn_log(const Mat& C, const std::vector<double>& a,
                                const std::vector<double>& b, double eps, int max_iter) {
  const int m = static_cast<int>(a.size()), k = static_cast<int>(b.size());
  std::vector<double> la(m), lb(k), f(m, 0.0), g(k, 0.0), buf(std::max(m, k));
  for (int i = 0; i < m; ++i) la[i] = std::log(a[i]);
  for (int j = 0; j < k; ++j) lb[j] = std::log(b[j]);

  SinkhornRun run;
  run.iterations = 0;
  run.col_err = kInf;
  for (int it = 0; it < max_iter && run.col_err > 1e-8; ++it) {
    for (int i = 0; i < m; ++i) {
      buf.resize(k);
      for (int j = 0; j < k; ++j) buf[j] = lb[j] + (g[j] - C(i, j)) / eps;
      f[i] = -eps * logsumexp(buf);
    }
    for (int j = 0; j < k; ++j) {
      buf.resize(m);
      for (int i = 0; i < m; ++i) buf[i] = la[i] + (f[i] - C(i, j)) / eps;
      g[j] = -eps * logsumexp(buf);
    }
    // After the g-sweep columns are exact; rows carry the residual.
    double err = 0.0;
    for (int i = 0; i < m; ++i) {
      KahanSum row;
      for (int j = 0; j < k; ++j)
        row.add(std::exp(la[i] + lb[j] + (f[i] + g[j] - C(i, j)) / eps));
      err = std::max(err, std::abs(row.value() - a[i]));
    }
    run.col_err = err;
    run.iterations = it + 1;
  }

  run.pi = Mat::Zero(m, k);
  KahanSum total;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double p = std::exp(la[i] + lb[j] + (f[i] + g[j] - C(i, j)) / eps);
      run.pi(i, j) = p;
      total.add(p * C(i, j));
    }
  run.cost = total.value();
  return run;
}

}  // namespace detail

/// Entropically regularized 2-Wasserstein distance via log-domain Sinkhorn
/// iteration on the Gibbs kernel exp(-d^2/eps). The reported distance is
/// debiased by the eps-self-transport costs of mu and nu.
inline EntropicResult w2_entropic(const FiniteMMS& space, const ProbVector& mu,
                                  const ProbVector& nu, double epsilon, int max_iter = 5000) {
  const int n = space.n();
  if (epsilon <= 0.0) throw Error("w2_entropic: epsilon must be positive");
  if (mu.size() != n || nu.size() != n) throw Error("w2_entropic: marginal size mismatch");

  const double dmin = space.min_positive_dist();
  const double floor_eps = dmin * dmin / 708.0;
  if (epsilon < floor_eps) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "w2_entropic: kernel underflows at epsilon=%.3g; use epsilon >= %.3g", epsilon,
                  floor_eps);
    throw Error(buf);
  }

  const auto src = detail::truncate_support(mu.p, 0.0);
  const auto snk = detail::truncate_support(nu.p, 0.0);
  const int m = static_cast<int>(src.idx.size());
  const int k = static_cast<int>(snk.idx.size());

  const auto cost_block = [&](const detail::Support& rows, const detail::Support& cols) {
    Mat C(rows.idx.size(), cols.idx.size());
    for (size_t i = 0; i < rows.idx.size(); ++i)
      for (size_t j = 0; j < cols.idx.size(); ++j) {
        const double d = space.dist(rows.idx[i], cols.idx[j]);
        C(i, j) = d * d;
      }
    return C;
  };

  const auto main_run = detail::sinkhorn_log(cost_block(src, snk), src.mass, snk.mass, epsilon,
                                             max_iter);
  const auto self_mu = detail::sinkhorn_log(cost_block(src, src), src.mass, src.mass, epsilon,
                                            max_iter);
  const auto self_nu = detail::sinkhorn_log(cost_block(snk, snk), snk.mass, snk.mass, epsilon,
                                            max_iter);

  EntropicResult res;
  res.iterations = main_run.iterations;
  res.converged = main_run.col_err <= 1e-8;
  res.plan.mu = mu.p;
  res.plan.nu = nu.p;
  res.plan.pi = Mat::Zero(n, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) res.plan.pi(src.idx[i], snk.idx[j]) = main_run.pi(i, j);
  res.plan.cost = main_run.cost;
  const double debiased = main_run.cost - 0.5 * (self_mu.cost + self_nu.cost);
  res.w_eps = std::sqrt(std::max(0.0, debiased));
  return res;
}

/// Validates the marginal and cost invariants of a coupling.
inline CouplingReport check_coupling(const FiniteMMS& space, const Coupling& plan) {
  CouplingReport rep;
  const int n = space.n();
  if (plan.pi.rows() != n || plan.pi.cols() != n || plan.mu.size() != n || plan.nu.size() != n)
    throw Error("check_coupling: dimension mismatch");
  KahanSum total;
  for (int i = 0; i < n; ++i) {
    KahanSum row;
    for (int j = 0; j < n; ++j) {
      row.add(plan.pi(i, j));
      total.add(space.dist(i, j) * space.dist(i, j) * plan.pi(i, j));
    }
    rep.row_error = std::max(rep.row_error, std::abs(row.value() - plan.mu[i]));
  }
  for (int j = 0; j < n; ++j) {
    KahanSum col;
    for (int i = 0; i < n; ++i) col.add(plan.pi(i, j));
    rep.col_error = std::max(rep.col_error, std::abs(col.value() - plan.nu[j]));
  }
  rep.cost_error = std::abs(total.value() - plan.cost);
  rep.row_ok = rep.row_error <= 1e-9;
  rep.col_ok = rep.col_error <= 1e-9;
  rep.cost_ok = rep.cost_error <= 1e-9 * std::max(1.0, std::abs(plan.cost));
  return rep;
}

/// Pushes each plan atom to time t along the model geodesic between its
/// endpoints, snapping to the nearest sample point. Without a model, mass
/// stays at the source endpoint for t < 0.5 and at the target otherwise.
inline ProbVector displacement_interpolate(const FiniteMMS& space, const Coupling& plan, double t,
                                           const ModelManifold* model = nullptr) {
  const int n = space.n();
  if (t < 0.0 || t > 1.0) throw Error("displacement_interpolate: t outside [0,1]");
  ProbVector out;
  out.p = Vec::Zero(n);
  if (t == 0.0) {
    out.p = plan.mu;
    return out;
  }
  if (t == 1.0) {
    out.p = plan.nu;
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double mass = plan.pi(i, j);
      if (mass <= 0.0) continue;
      if (i == j) {
        out.p[i] += mass;
        continue;
      }
      if (model == nullptr) {
        out.p[t < 0.5 ? i : j] += mass;
        continue;
      }
      const Point at = model->point_along(space.labels[i], space.labels[j], t);
      out.p[nearest_sample(*model, space, at)] += mass;
    }
  }
  return out;
}

}  // namespace synric
