#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "synric/isometry.hpp"

using namespace synric;

namespace {

// Cycle space C_n: n points, cycle metric with edge length h, unit weights.
FiniteMMS cycle_space(int n, double h = 1.0) {
  FiniteMMS s;
  s.dist = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int k = std::min(j - i, n - (j - i));
      s.dist(i, j) = s.dist(j, i) = h * k;
    }
  s.weight = Vec::Ones(n);
  for (int i = 0; i < n; ++i) s.adjacency.push_back({i, (i + 1) % n, h});
  return s;
}

// 2 x 3 grid with the flat quotient metric and unit spacings.
FiniteMMS torus_grid_2x3() {
  FiniteMMS s;
  s.dist = Mat::Zero(6, 6);
  const auto coord = [](int idx) { return std::pair<int, int>{idx / 3, idx % 3}; };
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const auto [a, b] = coord(i);
      const auto [c, d] = coord(j);
      const int dx = std::min(std::abs(a - c), 2 - std::abs(a - c));
      const int dy = std::min(std::abs(b - d), 3 - std::abs(b - d));
      s.dist(i, j) = s.dist(j, i) = std::hypot((double)dx, (double)dy);
    }
  s.weight = Vec::Ones(6);
  return s;
}

// Independent oracle: test all n! permutations directly.
std::vector<std::vector<int>> brute_force_isometries(const FiniteMMS& s, double tol) {
  const int n = s.n();
  const double wtol = tol * s.weight.maxCoeff();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> found;
  do {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (std::abs(s.weight[perm[i]] - s.weight[i]) > wtol) ok = false;
      for (int j = i + 1; j < n && ok; ++j)
        ok = std::abs(s.dist(perm[i], perm[j]) - s.dist(i, j)) <= tol;
    }
    if (ok) found.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return found;
}

}  // namespace

TEST_CASE("cycle C6 has the dihedral group of order 12") {
  const auto s = cycle_space(6);
  const auto group = enumerate_isometries(s);
  CHECK(group.elements.size() == 12);
  const auto oracle = brute_force_isometries(s, group.tol);
  REQUIRE(oracle.size() == group.elements.size());
  for (size_t i = 0; i < oracle.size(); ++i) CHECK(group.elements[i].perm == oracle[i]);
}

TEST_CASE("weight perturbation cuts C6 down to the fixing reflection") {
  auto s = cycle_space(6);
  const double tol = 1e-9 * s.diameter();
  s.weight[0] += 10.0 * tol * s.weight.maxCoeff();
  const auto group = enumerate_isometries(s, tol);
  CHECK(group.elements.size() == 2);  // identity and the reflection through 0 and 3
  const std::vector<int> reflection = {0, 5, 4, 3, 2, 1};
  CHECK(group.elements[1].perm == reflection);
  const auto oracle = brute_force_isometries(s, tol);
  CHECK(oracle.size() == 2);
}

TEST_CASE("singleton space has the trivial group") {
  FiniteMMS s;
  s.dist = Mat::Zero(1, 1);
  s.weight = Vec::Ones(1);
  const auto group = enumerate_isometries(s);
  CHECK(group.elements.size() == 1);
  CHECK(group.generator_indices.empty());
}

TEST_CASE("enumeration equals brute force on the small corpus") {
  std::vector<FiniteMMS> corpus;
  corpus.push_back(cycle_space(5));
  corpus.push_back(cycle_space(6));
  corpus.push_back(cycle_space(8, 0.37));
  corpus.push_back(torus_grid_2x3());
  {
    auto perturbed = cycle_space(6);
    perturbed.weight[0] += 1e-3;
    corpus.push_back(perturbed);
  }
  for (const auto& s : corpus) {
    const auto group = enumerate_isometries(s);
    const auto oracle = brute_force_isometries(s, group.tol);
    REQUIRE(group.elements.size() == oracle.size());
    for (size_t i = 0; i < oracle.size(); ++i) CHECK(group.elements[i].perm == oracle[i]);
  }
}

TEST_CASE("group axioms hold for the enumerated elements") {
  const auto s = cycle_space(6);
  const auto group = enumerate_isometries(s);
  std::set<std::vector<int>> members;
  for (const auto& e : group.elements) members.insert(e.perm);
  for (const auto& a : group.elements)
    for (const auto& b : group.elements) {
      std::vector<int> ab(6);
      for (int i = 0; i < 6; ++i) ab[i] = a.perm[b.perm[i]];
      CHECK(members.count(ab) == 1);
    }
  // Generators: D6 needs at most a rotation and a reflection.
  CHECK(group.generator_indices.size() >= 1);
  CHECK(group.generator_indices.size() <= 3);
}

TEST_CASE("displacement profiles on C6") {
  const auto s = cycle_space(6);
  const auto group = enumerate_isometries(s);

  const auto id_prof = displacement(s, group.elements[0]);
  CHECK(id_prof.delta_phi == 0.0);

  IsometryPermutation rot{{1, 2, 3, 4, 5, 0}, group.tol};
  const auto rot_prof = displacement(s, rot);
  for (double d : rot_prof.d_phi) CHECK(d == 1.0);
  CHECK(rot_prof.delta_phi == 1.0);

  // Vertex reflection: fixes 0 and 3, moves 1 <-> 5 and 2 <-> 4 by 2 edges.
  IsometryPermutation vrefl{{0, 5, 4, 3, 2, 1}, group.tol};
  const auto vprof = displacement(s, vrefl);
  CHECK(vprof.delta_phi == 2.0);
  CHECK(vprof.d_phi[0] == 0.0);
  CHECK(vprof.d_phi[3] == 0.0);

  // Edge reflection: mixed entries, the 1 <-> 4 swap realizes the diameter.
  IsometryPermutation erefl{{5, 4, 3, 2, 1, 0}, group.tol};
  const auto eprof = displacement(s, erefl);
  CHECK(eprof.delta_phi == s.diameter());
  CHECK(eprof.d_phi[0] == 1.0);
  CHECK(eprof.d_phi[1] == 3.0);
}

TEST_CASE("zero displacement implies the identity") {
  const auto s = cycle_space(7);
  const auto group = enumerate_isometries(s);
  for (const auto& e : group.elements) {
    const auto prof = displacement(s, e);
    if (prof.delta_phi == 0.0) {
      for (int i = 0; i < s.n(); ++i) CHECK(e.perm[i] == i);
    }
  }
}

TEST_CASE("covering numbers on cycles") {
  const auto c12 = cycle_space(12);
  CHECK(covering_number(c12, 6.0).count == 1);   // radius = diameter
  CHECK(covering_number(c12, 0.5).count == 12);  // below min distance
  const auto cover = covering_number(c12, 1.0);
  CHECK(cover.count == 4);
  // Brute-force check: no 3-center cover exists at radius 1.
  bool three_enough = false;
  for (int a = 0; a < 12 && !three_enough; ++a)
    for (int b = a; b < 12 && !three_enough; ++b)
      for (int c = b; c < 12 && !three_enough; ++c) {
        bool all = true;
        for (int i = 0; i < 12; ++i)
          all = all && (c12.dist(i, a) <= 1.0 || c12.dist(i, b) <= 1.0 || c12.dist(i, c) <= 1.0);
        three_enough = all;
      }
  CHECK_FALSE(three_enough);
}

TEST_CASE("factorial bound values") {
  CHECK(pigeonhole_bound(0).str() == "1");
  CHECK(pigeonhole_bound(4).str() == "24");
  CHECK(pigeonhole_bound(30).str() == "265252859812191058636308480000000");
  // Cross-check by independent repeated multiplication at a second size.
  BigUint expect(1);
  for (int k = 2; k <= 25; ++k) expect.mul(k);
  CHECK(pigeonhole_bound(25) == expect);
  CHECK(pigeonhole_bound(25).str() == "15511210043330985984000000");
  CHECK_THROWS_AS(factorial(-1), Error);
  CHECK_THROWS_AS(factorial(200001), Error);
}

TEST_CASE("injection at the rigidity scale separates the C12 dihedral group") {
  const auto s = cycle_space(12);
  const auto group = enumerate_isometries(s);
  REQUIRE(group.elements.size() == 24);
  const auto scan = rigidity_scan(s, group);
  const double a = scan.lambda / 4.0;  // 4a <= lambda, the certified regime
  const auto cover = covering_number(s, a);
  CHECK(cover.count == 12);
  const auto cert = injection_map(s, group, cover.centers, a, scan.lambda);
  CHECK(cert.scale_certified);
  CHECK(cert.injective);
  CHECK(BigUint(group.elements.size()) <= pigeonhole_bound(cover.count));
}

TEST_CASE("coarse covers are refuted, not silently accepted") {
  // At a = quarter diameter the one-step rotation lands every center in its
  // own ball and collides with the identity; the certificate reports it.
  const auto s = cycle_space(12);
  const auto group = enumerate_isometries(s);
  const double a = s.diameter() / 4.0;  // 1.5 edge lengths, 4a > lambda
  const auto cover = covering_number(s, a);
  CHECK(cover.count == 4);
  const auto scan = rigidity_scan(s, group);
  const auto cert = injection_map(s, group, cover.centers, a, scan.lambda);
  CHECK_FALSE(cert.scale_certified);
  CHECK_FALSE(cert.injective);
  CHECK(cert.collision[0] >= 0);
  // The order bound inequality still holds at this scale: 24 <= 4!.
  CHECK(BigUint(group.elements.size()) <= pigeonhole_bound(cover.count));
}

TEST_CASE("a single center cannot separate C6") {
  const auto s = cycle_space(6);
  const auto group = enumerate_isometries(s);
  const auto cover = covering_number(s, s.diameter());
  REQUIRE(cover.count == 1);
  const auto cert = injection_map(s, group, cover.centers, s.diameter());
  CHECK_FALSE(cert.injective);
  CHECK(cert.collision[0] >= 0);
  CHECK(cert.collision_discrepancy > 0.0);
}

TEST_CASE("non-cover input is rejected") {
  const auto s = cycle_space(6);
  const auto group = enumerate_isometries(s);
  CHECK_THROWS_AS(injection_map(s, group, {0}, 1.0), Error);
}

TEST_CASE("rigidity scan") {
  // Trivial group: +inf flag.
  std::mt19937_64 rng(3);
  FiniteMMS generic;
  generic.dist = Mat::Zero(5, 5);
  std::uniform_real_distribution<double> u(1.0, 2.0);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) generic.dist(i, j) = generic.dist(j, i) = u(rng) + 2.0;
  generic.weight = Vec::Ones(5);
  const auto gg = enumerate_isometries(generic);
  REQUIRE(gg.elements.size() == 1);
  CHECK(rigidity_scan(generic, gg).trivial_group);

  // C6 with edge length h: lambda just below h.
  const double h = 0.37;
  const auto s = cycle_space(6, h);
  const auto group = enumerate_isometries(s);
  const auto scan = rigidity_scan(s, group);
  CHECK_FALSE(scan.trivial_group);
  CHECK(scan.lambda < h);
  CHECK(scan.lambda == std::nextafter(h, 0.0));

  // Weight-perturbed C6: the surviving vertex reflection moves 1 and 5 (and
  // 2 and 4) across two edges, so lambda sits just below 2h.
  auto pert = cycle_space(6, h);
  const double tol = 1e-9 * pert.diameter();
  pert.weight[0] += 10.0 * tol;
  const auto pg = enumerate_isometries(pert, tol);
  REQUIRE(pg.elements.size() == 2);
  const auto pscan = rigidity_scan(pert, pg);
  CHECK(pscan.lambda == std::nextafter(pert.dist(1, 5), 0.0));
}

TEST_CASE("weight perturbations never enlarge the group") {
  for (int idx : {0, 2, 5}) {
    auto s = cycle_space(6);
    const auto base_order = enumerate_isometries(s).elements.size();
    const double tol = 1e-9 * s.diameter();
    s.weight[idx] += 3.0 * tol * s.weight.maxCoeff();
    const auto pert_order = enumerate_isometries(s, tol).elements.size();
    CHECK(pert_order <= base_order);
  }
}

TEST_CASE("search budget produces a loud error") {
  const auto s = cycle_space(8);
  CHECK_THROWS_AS(enumerate_isometries(s, -1.0, 3), Error);
}
