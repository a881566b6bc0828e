#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "synric/bigint.hpp"
#include "synric/space.hpp"

namespace synric {

/// Distance- and measure-preserving permutation, accepted at tolerance tol.
struct IsometryPermutation {
  std::vector<int> perm;
  double tol = 0.0;
};

struct IsometryGroup {
  std::vector<IsometryPermutation> elements;  // identity included
  std::vector<int> generator_indices;         // minimal found generating subset
  double tol = 0.0;
};

struct DisplacementProfile {
  std::vector<double> d_phi;  // d(i, phi(i))
  double delta_phi = 0.0;     // max displacement
};

namespace detail {

inline bool perm_is_isometry(const FiniteMMS& space, const std::vector<int>& perm, double tol,
                             double wtol) {
  const int n = space.n();
  for (int i = 0; i < n; ++i) {
    if (std::abs(space.weight[perm[i]] - space.weight[i]) > wtol) return false;
    for (int j = i + 1; j < n; ++j)
      if (std::abs(space.dist(perm[i], perm[j]) - space.dist(i, j)) > tol) return false;
  }
  return true;
}

struct IsoSearch {
  const FiniteMMS& space;
  double tol, wtol;
  long budget;
  long nodes = 0;
  std::vector<std::vector<int>> candidates;  // per point, by signature match
  std::vector<int> order;                    // assignment order, scarce first
  std::vector<int> assign;                   // point -> image (-1 unassigned)
  std::vector<char> used;
  std::vector<std::vector<int>> found;

  explicit IsoSearch(const FiniteMMS& s, double t, double wt, long b)
      : space(s), tol(t), wtol(wt), budget(b) {}

  void run() {
    const int n = space.n();
    // Signature pruning: a point can only map to a point with the same sorted
    // distance profile and the same weight, both within tolerance.
    std::vector<std::vector<double>> profile(n);
    for (int i = 0; i < n; ++i) {
      profile[i].reserve(n);
      for (int j = 0; j < n; ++j) profile[i].push_back(space.dist(i, j));
      std::sort(profile[i].begin(), profile[i].end());
    }
    candidates.assign(n, {});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (std::abs(space.weight[i] - space.weight[j]) > wtol) continue;
        bool ok = true;
        for (int q = 0; q < n && ok; ++q)
          ok = std::abs(profile[i][q] - profile[j][q]) <= tol;
        if (ok) candidates[i].push_back(j);
      }

    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return candidates[a].size() < candidates[b].size();
    });

    assign.assign(n, -1);
    used.assign(n, 0);
    extend(0);
  }

  void extend(int depth) {
    const int n = space.n();
    if (depth == n) {
      found.push_back(assign);
      return;
    }
    const int i = order[depth];
    for (int j : candidates[i]) {
      if (used[j]) continue;
      if (++nodes > budget)
        throw Error("enumerate_isometries: budget exceeded after finding " +
                    std::to_string(found.size()) + " elements");
      bool ok = true;
      for (int q = 0; q < depth && ok; ++q) {
        const int p = order[q];
        ok = std::abs(space.dist(j, assign[p]) - space.dist(i, p)) <= tol;
      }
      if (!ok) continue;
      assign[i] = j;
      used[j] = 1;
      extend(depth + 1);
      assign[i] = -1;
      used[j] = 0;
    }
  }
};

inline std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> c(a.size());
  for (size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

inline std::vector<int> inverse(const std::vector<int>& a) {
  std::vector<int> inv(a.size());
  for (size_t i = 0; i < a.size(); ++i) inv[a[i]] = static_cast<int>(i);
  return inv;
}

}  // namespace detail

/// Enumerates the full measure-preserving isometry group by backtracking over
/// index assignments pruned by (sorted distance profile, weight) signatures.
/// The returned element list is sorted, starts with the identity, and is
/// verified to be closed under composition and inverse.
inline IsometryGroup enumerate_isometries(const FiniteMMS& space, double tol = -1.0,
                                          long node_budget = 20000000) {
  const int n = space.n();
  if (n == 0) throw Error("enumerate_isometries: empty space");
  if (tol < 0.0) tol = 1e-9 * std::max(space.diameter(), 1e-300);
  const double wmax = space.weight.maxCoeff();
  const double wtol = tol * wmax;

  detail::IsoSearch search(space, tol, wtol, node_budget);
  search.run();
  std::sort(search.found.begin(), search.found.end());

  IsometryGroup group;
  group.tol = tol;
  for (auto& p : search.found) group.elements.push_back({std::move(p), tol});

  // Group axioms, checked post hoc: tolerance-based acceptance could in
  // principle admit a set that is not closed.
  std::set<std::vector<int>> members;
  for (const auto& e : group.elements) members.insert(e.perm);
  std::vector<int> id(n);
  std::iota(id.begin(), id.end(), 0);
  if (!members.count(id)) throw Error("enumerate_isometries: identity not found");
  for (const auto& a : group.elements) {
    if (!members.count(detail::inverse(a.perm)))
      throw Error("enumerate_isometries: inverse missing, tolerance admits a non-group");
    for (const auto& b : group.elements)
      if (!members.count(detail::compose(a.perm, b.perm)))
        throw Error("enumerate_isometries: composition missing, tolerance admits a non-group");
  }

  // Greedy generating subset: grow a subgroup until it covers everything.
  std::set<std::vector<int>> span{id};
  for (size_t gi = 0; gi < group.elements.size() && span.size() < members.size(); ++gi) {
    const auto& cand = group.elements[gi].perm;
    if (span.count(cand)) continue;
    group.generator_indices.push_back(static_cast<int>(gi));
    // Closure of span + cand.
    std::vector<std::vector<int>> frontier{cand};
    span.insert(cand);
    while (!frontier.empty()) {
      std::vector<std::vector<int>> next;
      for (const auto& f : frontier) {
        std::vector<std::vector<int>> snapshot(span.begin(), span.end());
        for (const auto& s : snapshot) {
          for (const auto& prod : {detail::compose(f, s), detail::compose(s, f)}) {
            if (span.insert(prod).second) next.push_back(prod);
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return group;
}

inline DisplacementProfile displacement(const FiniteMMS& space, const IsometryPermutation& phi) {
  DisplacementProfile prof;
  prof.d_phi.resize(space.n());
  for (int i = 0; i < space.n(); ++i) {
    prof.d_phi[i] = space.dist(i, phi.perm[i]);
    prof.delta_phi = std::max(prof.delta_phi, prof.d_phi[i]);
  }
  return prof;
}

struct Cover {
  int count = 0;
  std::vector<int> centers;
};

/// Greedy farthest-point a-cover: every point ends up within distance a of
/// some center. Ties go to the smallest index, the construction order is the
/// tie-break order downstream maps rely on.
inline Cover covering_number(const FiniteMMS& space, double a) {
  if (a <= 0.0) throw Error("covering_number: radius must be positive");
  const int n = space.n();
  Cover cover;
  cover.centers.push_back(0);
  std::vector<double> mind(n);
  for (int i = 0; i < n; ++i) mind[i] = space.dist(0, i);
  while (true) {
    int far = -1;
    double fd = a;
    for (int i = 0; i < n; ++i)
      if (mind[i] > fd) {
        fd = mind[i];
        far = i;
      }
    if (far < 0) break;
    cover.centers.push_back(far);
    for (int i = 0; i < n; ++i) mind[i] = std::min(mind[i], space.dist(far, i));
  }
  cover.count = static_cast<int>(cover.centers.size());
  return cover;
}

/// Exact N! as the symmetric-group order bound.
inline BigUint pigeonhole_bound(std::int64_t N) { return factorial(N); }

struct InjectionCertificate {
  bool injective = false;
  bool scale_certified = false;  // 4a <= lambda held for the supplied lambda
  std::vector<std::vector<int>> images;  // per element: center -> center map
  std::array<int, 2> collision = {-1, -1};
  double collision_discrepancy = 0.0;  // max_x d(phi(x), psi(x)) for the pair
};

/// Maps each group element to the symmetric group on the cover: center i goes
/// to the smallest center j whose a-ball contains phi(center_i). Certifies
/// injectivity by pairwise comparison; on a collision the offending pair and
/// its displacement discrepancy are reported.
inline InjectionCertificate injection_map(const FiniteMMS& space, const IsometryGroup& group,
                                          const std::vector<int>& centers, double a,
                                          double lambda = kInf) {
  const int n = space.n();
  for (int i = 0; i < n; ++i) {
    bool covered = false;
    for (int c : centers) covered = covered || space.dist(i, c) <= a;
    if (!covered)
      throw Error("injection_map: centers do not form an a-cover (point " + std::to_string(i) +
                  " exposed)");
  }
  InjectionCertificate cert;
  cert.scale_certified = 4.0 * a <= lambda;
  for (const auto& e : group.elements) {
    std::vector<int> image(centers.size(), -1);
    for (size_t ci = 0; ci < centers.size(); ++ci) {
      const int moved = e.perm[centers[ci]];
      for (size_t cj = 0; cj < centers.size(); ++cj) {
        if (space.dist(moved, centers[cj]) <= a) {
          image[ci] = static_cast<int>(cj);
          break;
        }
      }
    }
    cert.images.push_back(std::move(image));
  }
  cert.injective = true;
  for (size_t p = 0; p < cert.images.size() && cert.injective; ++p)
    for (size_t q = p + 1; q < cert.images.size(); ++q) {
      if (cert.images[p] != cert.images[q]) continue;
      cert.injective = false;
      cert.collision = {static_cast<int>(p), static_cast<int>(q)};
      double disc = 0.0;
      for (int i = 0; i < n; ++i)
        disc = std::max(disc,
                        space.dist(group.elements[p].perm[i], group.elements[q].perm[i]));
      cert.collision_discrepancy = disc;
      break;
    }
  return cert;
}

struct RigidityScan {
  double lambda = kInf;
  bool trivial_group = false;  // lambda is the +inf flag
  int argmin_element = -1;
};

/// Largest displacement bound under which only the identity survives: one ulp
/// below the smallest non-identity max-displacement.
inline RigidityScan rigidity_scan(const FiniteMMS& space, const IsometryGroup& group) {
  RigidityScan scan;
  double best = kInf;
  for (size_t gi = 0; gi < group.elements.size(); ++gi) {
    const auto prof = displacement(space, group.elements[gi]);
    if (prof.delta_phi == 0.0) continue;  // identity
    if (prof.delta_phi < best) {
      best = prof.delta_phi;
      scan.argmin_element = static_cast<int>(gi);
    }
  }
  if (scan.argmin_element < 0) {
    scan.trivial_group = true;
    return scan;
  }
  scan.lambda = std::nextafter(best, 0.0);
  return scan;
}

}  // namespace synric
