#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "synric/model.hpp"
#include "synric/transport.hpp"

using namespace synric;

namespace {

// Euclidean point clouds give honest metric spaces for solver oracles.
FiniteMMS random_space(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 3>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  FiniteMMS s;
  s.dist = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = std::sqrt(std::pow(pts[i][0] - pts[j][0], 2) +
                                 std::pow(pts[i][1] - pts[j][1], 2) +
                                 std::pow(pts[i][2] - pts[j][2], 2));
      s.dist(i, j) = s.dist(j, i) = d;
    }
  s.weight = Vec::Ones(n);
  return s;
}

ProbVector random_measure(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ProbVector p;
  p.p = Vec::Zero(n);
  for (int i = 0; i < n; ++i) p.p[i] = u(rng);
  p.p /= p.p.sum();
  return p;
}

// Uniform mass on the first half of the space vs uniform mass on the second
// half: the optimum is a half-to-half assignment by Birkhoff extremality, so
// the k! permutation sweep is an independent oracle.
struct AssignmentInstance {
  FiniteMMS space;
  ProbVector mu, nu;
  int half;
};

AssignmentInstance assignment_instance(int half, std::mt19937_64& rng) {
  AssignmentInstance inst;
  inst.half = half;
  inst.space = random_space(2 * half, rng);
  inst.mu.p = Vec::Zero(2 * half);
  inst.nu.p = Vec::Zero(2 * half);
  for (int i = 0; i < half; ++i) {
    inst.mu.p[i] = 1.0 / half;
    inst.nu.p[half + i] = 1.0 / half;
  }
  return inst;
}

double brute_force_assignment_w2sq(const AssignmentInstance& inst) {
  std::vector<int> perm(inst.half);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    KahanSum c;
    for (int i = 0; i < inst.half; ++i) {
      const double d = inst.space.dist(i, inst.half + perm[i]);
      c.add(d * d / inst.half);
    }
    best = std::min(best, c.value());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random vertex of the transportation polytope: northwest-corner rule after
// random row/column shuffles. Mixtures of these are random admissible plans.
Mat random_vertex_plan(const Vec& mu, const Vec& nu, std::mt19937_64& rng) {
  const int m = static_cast<int>(mu.size()), k = static_cast<int>(nu.size());
  std::vector<int> rows(m), cols(k);
  std::iota(rows.begin(), rows.end(), 0);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  std::shuffle(cols.begin(), cols.end(), rng);
  Mat plan = Mat::Zero(m, k);
  std::vector<double> a(m), b(k);
  for (int i = 0; i < m; ++i) a[i] = mu[rows[i]];
  for (int j = 0; j < k; ++j) b[j] = nu[cols[j]];
  int i = 0, j = 0;
  while (i < m && j < k) {
    const double move = std::min(a[i], b[j]);
    plan(rows[i], cols[j]) += move;
    a[i] -= move;
    b[j] -= move;
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
  }
  return plan;
}

double plan_cost(const FiniteMMS& s, const Mat& plan) {
  KahanSum c;
  for (int i = 0; i < s.n(); ++i)
    for (int j = 0; j < s.n(); ++j)
      if (plan(i, j) > 0.0) c.add(s.dist(i, j) * s.dist(i, j) * plan(i, j));
  return c.value();
}

}  // namespace

TEST_CASE("identical marginals couple on the diagonal at zero cost") {
  std::mt19937_64 rng(11);
  const auto s = random_space(6, rng);
  const auto mu = random_measure(6, rng);
  const auto [w, plan] = w2_exact(s, mu, mu);
  CHECK(w == 0.0);
  for (int i = 0; i < 6; ++i) CHECK(plan.pi(i, i) == mu.p[i]);
  CHECK(check_coupling(s, plan).valid());
}

TEST_CASE("forced mass move on the two-point space") {
  FiniteMMS s;
  s.dist = Mat::Zero(2, 2);
  s.dist(0, 1) = s.dist(1, 0) = 1.0;
  s.weight = Vec::Ones(2);
  ProbVector mu, nu;
  mu.p = Vec::Zero(2);
  nu.p = Vec::Zero(2);
  mu.p << 1.0, 0.0;
  nu.p << 0.0, 1.0;
  const auto [w, plan] = w2_exact(s, mu, nu);
  CHECK(w == 1.0);
  CHECK(plan.pi(0, 1) == 1.0);
  CHECK(plan.pi(0, 0) == 0.0);
  CHECK(plan.pi(1, 0) == 0.0);
  CHECK(plan.pi(1, 1) == 0.0);
}

TEST_CASE("uniform marginals match the permutation brute force") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const int half = 3 + static_cast<int>(rng() % 4);  // 3..6
    const auto inst = assignment_instance(half, rng);
    const auto [w, plan] = w2_exact(inst.space, inst.mu, inst.nu);
    CHECK(std::abs(w * w - brute_force_assignment_w2sq(inst)) <= 1e-12);
    CHECK(check_coupling(inst.space, plan).valid());
  }
}

TEST_CASE("exact cost lower-bounds random admissible plans") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 3);  // 3..5
    const auto s = random_space(n, rng);
    const auto mu = random_measure(n, rng);
    const auto nu = random_measure(n, rng);
    const double opt = w2_cost(s, mu, nu);
    for (int k = 0; k < 500; ++k) {
      Mat mix = Mat::Zero(n, n);
      double l1 = lam(rng), l2 = lam(rng), l3 = lam(rng);
      const double tot = l1 + l2 + l3;
      mix += (l1 / tot) * random_vertex_plan(mu.p, nu.p, rng);
      mix += (l2 / tot) * random_vertex_plan(mu.p, nu.p, rng);
      mix += (l3 / tot) * random_vertex_plan(mu.p, nu.p, rng);
      CHECK(opt <= plan_cost(s, mix) + 1e-12);
    }
  }
}

TEST_CASE("single-atom couplings reproduce the distance exactly") {
  std::mt19937_64 rng(41);
  const auto s = random_space(7, rng);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const auto [w, plan] = w2_exact(s, dirac(s, i), dirac(s, j));
      (void)plan;
      CHECK(w == s.dist(i, j));
    }
}

TEST_CASE("solver-level metric axioms") {
  std::mt19937_64 rng(47);
  const auto s = random_space(8, rng);
  std::vector<ProbVector> measures;
  for (int k = 0; k < 3; ++k) measures.push_back(random_measure(8, rng));
  for (const auto& a : measures) CHECK(w2_cost(s, a, a) == 0.0);
  for (const auto& a : measures)
    for (const auto& b : measures) {
      const double wab = std::sqrt(w2_cost(s, a, b));
      const double wba = std::sqrt(w2_cost(s, b, a));
      CHECK(std::abs(wab - wba) <= 1e-9);
    }
  const double w01 = std::sqrt(w2_cost(s, measures[0], measures[1]));
  const double w12 = std::sqrt(w2_cost(s, measures[1], measures[2]));
  const double w02 = std::sqrt(w2_cost(s, measures[0], measures[2]));
  CHECK(w02 <= w01 + w12 + 1e-7);
}

TEST_CASE("entropic solver converges to the exact cost as epsilon shrinks") {
  std::mt19937_64 rng(53);
  const auto s = random_space(8, rng);
  const auto mu = random_measure(8, rng);
  const auto nu = random_measure(8, rng);
  const double exact = std::sqrt(w2_cost(s, mu, nu));
  double prev_gap = kInf;
  for (double eps : {0.5, 0.1, 0.02, 0.004}) {
    const auto res = w2_entropic(s, mu, nu, eps, 20000);
    CHECK(res.converged);
    const double gap = std::abs(res.w_eps - exact);
    CHECK(gap <= prev_gap + 1e-6);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 5e-3);
}

TEST_CASE("entropic self-distance is debiased to zero") {
  std::mt19937_64 rng(59);
  const auto s = random_space(6, rng);
  const auto mu = random_measure(6, rng);
  const auto res = w2_entropic(s, mu, mu, 0.1, 5000);
  CHECK(res.w_eps <= 1e-8);
}

TEST_CASE("entropic solver rejects underflowing epsilon") {
  std::mt19937_64 rng(61);
  const auto s = random_space(5, rng);
  const auto mu = random_measure(5, rng);
  const auto nu = random_measure(5, rng);
  CHECK_THROWS_AS(w2_entropic(s, mu, nu, 1e-300), Error);
}

TEST_CASE("coupling checker flags broken plans") {
  std::mt19937_64 rng(67);
  const auto s = random_space(5, rng);
  const auto mu = random_measure(5, rng);
  auto [w, plan] = w2_exact(s, mu, mu);
  (void)w;
  CHECK(check_coupling(s, plan).valid());

  auto scaled = plan;
  scaled.pi *= 0.5;
  const auto rep = check_coupling(s, scaled);
  CHECK_FALSE(rep.row_ok);
  CHECK_FALSE(rep.col_ok);

  auto off = plan;
  off.cost += 1e-3;
  CHECK_FALSE(check_coupling(s, off).cost_ok);
}

TEST_CASE("displacement interpolation endpoints and circle midpoint") {
  ModelManifold circle;
  circle.kind = ModelKind::Circle;
  const auto s = discretize(circle, 64);
  const auto mu = dirac(s, 0);
  const auto nu = dirac(s, 16);  // angle pi/2
  auto [w, plan] = w2_exact(s, mu, nu);
  CHECK(w == doctest::Approx(kPi / 2).epsilon(1e-12));

  const auto at0 = displacement_interpolate(s, plan, 0.0, &circle);
  const auto at1 = displacement_interpolate(s, plan, 1.0, &circle);
  CHECK(at0.p == mu.p);
  CHECK(at1.p == nu.p);

  const auto mid = displacement_interpolate(s, plan, 0.5, &circle);
  CHECK(mid.p[8] == 1.0);  // nearest grid point to pi/4
}

TEST_CASE("graph fallback interpolation splits at t = 1/2") {
  std::mt19937_64 rng(71);
  const auto s = random_space(4, rng);
  const auto mu = dirac(s, 0);
  const auto nu = dirac(s, 3);
  auto [w, plan] = w2_exact(s, mu, nu);
  (void)w;
  CHECK(displacement_interpolate(s, plan, 0.3).p[0] == 1.0);
  CHECK(displacement_interpolate(s, plan, 0.7).p[3] == 1.0);
}

TEST_CASE("support truncation changes the cost negligibly") {
  ModelManifold circle;
  circle.kind = ModelKind::Circle;
  const auto s = discretize(circle, 64);
  ProbVector mu, nu;
  mu.p = Vec::Zero(64);
  nu.p = Vec::Zero(64);
  for (int i = 0; i < 64; ++i) {
    const double th = 2.0 * kPi * i / 64;
    mu.p[i] = std::exp(-std::pow(std::remainder(th, 2.0 * kPi), 2) / 0.02);
    nu.p[i] = std::exp(-std::pow(std::remainder(th - kPi / 2, 2.0 * kPi), 2) / 0.02);
  }
  mu.p /= mu.p.sum();
  nu.p /= nu.p.sum();
  const double full = w2_cost(s, mu, nu);
  TransportOptions opts;
  opts.support_cutoff = 1e-16;
  const double trunc = w2_cost(s, mu, nu, opts);
  CHECK(std::abs(full - trunc) <= 1e-10 * std::max(1.0, full));
}

TEST_CASE("mid-size costs match frozen LP reference values") {
  // Expected values computed once with an independent LP solver (HiGHS via
  // scipy.optimize.linprog) on the same instances and frozen here.
  const auto instance = [](int n, ProbVector& mu, ProbVector& nu) {
    ModelManifold circle;
    circle.kind = ModelKind::Circle;
    const auto s = discretize(circle, n);
    mu.p = Vec::Zero(n);
    nu.p = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * i / n;
      mu.p[i] = 1.0 + 0.5 * std::sin(th) + 0.25 * std::cos(3.0 * th);
      nu.p[i] = 1.0 + 0.5 * std::cos(2.0 * th) + 0.25 * std::sin(th + 0.7);
    }
    mu.p /= mu.p.sum();
    nu.p /= nu.p.sum();
    return s;
  };
  const std::vector<std::pair<int, double>> expected = {
      {16, 0.11335255595166745}, {24, 0.09742707193893449}, {40, 0.08964238353971532}};
  for (const auto& [n, ref] : expected) {
    ProbVector mu, nu;
    const auto s = instance(n, mu, nu);
    CHECK(std::abs(w2_cost(s, mu, nu) - ref) <= 1e-10);
  }
}

TEST_CASE("larger instances stay consistent across formulations") {
  // Same transport instance solved (a) directly and (b) with roles swapped;
  // costs must agree to solver tolerance on a 96-point circle.
  ModelManifold circle;
  circle.kind = ModelKind::Circle;
  const auto s = discretize(circle, 96);
  ProbVector mu, nu;
  mu.p = Vec::Zero(96);
  nu.p = Vec::Zero(96);
  for (int i = 0; i < 96; ++i) {
    const double th = 2.0 * kPi * i / 96;
    mu.p[i] = 1.0 + 0.5 * std::sin(th);
    nu.p[i] = 1.0 + 0.5 * std::cos(2.0 * th);
  }
  mu.p /= mu.p.sum();
  nu.p /= nu.p.sum();
  const double ab = w2_cost(s, mu, nu);
  const double ba = w2_cost(s, nu, mu);
  CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
  // And the entropic value brackets it within its bias.
  const auto res = w2_entropic(s, mu, nu, 0.01, 30000);
  CHECK(res.converged);
  CHECK(std::abs(res.w_eps - std::sqrt(ab)) <= 0.05 * std::sqrt(ab) + 1e-3);
}
