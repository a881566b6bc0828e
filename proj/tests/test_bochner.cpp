#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synric/bochner.hpp"
#include "synric/model.hpp"

using namespace synric;

namespace {

GeometryBudget fixture_budget() {
  GeometryBudget b;
  b.n = 3;
  b.N = 3.0;
  b.i0 = 10.0;
  b.Lambda1 = 1.0;
  b.Lambda2 = 1.0;
  b.Lambda3 = 1.0;
  b.V = 1.0;
  b.D = 1.0;
  b.w = 1.0;
  b.A = 1.0;
  b.B = 1.0;
  return b;
}

}  // namespace

TEST_CASE("tan-bound constants, exact values") {
  const auto c = rigidity_tan_constants(3, 1.0, 10.0);
  CHECK(c.c1 == 8.0);
  CHECK(c.c2 == 1.0);
  CHECK(c.delta0 == kPi / 2.0);

  const auto c2 = rigidity_tan_constants(2, 1.0, 0.1);
  CHECK(c2.c1 == 4.0);
  CHECK(c2.c2 == std::sqrt(0.5));
  CHECK(c2.delta0 == 0.05);

  // Vanishing curvature: the tan branch is vacuous and i0/2 wins.
  const auto c3 = rigidity_tan_constants(3, 1e-12, 0.4);
  CHECK(c3.delta0 == 0.2);

  CHECK_THROWS_AS(rigidity_tan_constants(1, 1.0, 1.0), Error);
}

TEST_CASE("tan-bound constants are mutually consistent") {
  for (int n : {2, 3, 5}) {
    for (double lam : {0.5, 1.0, 3.0}) {
      const auto c = rigidity_tan_constants(n, lam, 1.0);
      // c1 is twice the frame-norm cap 2(n-1)Lambda, and 2 c2^2 = (n-1)Lambda.
      CHECK(c.c1 == doctest::Approx(2.0 * (2.0 * (n - 1) * lam)).epsilon(1e-15));
      CHECK(2.0 * c.c2 * c.c2 == doctest::Approx((n - 1) * lam).epsilon(1e-14));
    }
  }
}

TEST_CASE("displacement threshold on the fixture budget") {
  const auto th = identity_displacement_threshold(fixture_budget());
  // min{pi/2, arctan(1/4), 1/4, 1/2} = arctan(1/4)
  CHECK(th.branch_delta0 == kPi / 2.0);
  CHECK(th.branch_arctan == doctest::Approx(std::atan(0.25)).epsilon(1e-15));
  CHECK(th.branch_sobolev_a == 0.25);
  CHECK(th.branch_sobolev_b == 0.5);
  CHECK(th.delta == doctest::Approx(std::atan(0.25)).epsilon(1e-15));
}

TEST_CASE("displacement threshold limiting branches") {
  auto b = fixture_budget();
  b.A = 1e9;
  const auto th = identity_displacement_threshold(b);
  CHECK(th.delta == doctest::Approx(1.0 / (4.0 * 1e9)).epsilon(1e-12));

  auto c = fixture_budget();
  c.i0 = 0.2;
  c.w = 100.0;
  const auto th2 = identity_displacement_threshold(c);
  CHECK(th2.delta == 0.1);  // i0/2 binds
}

TEST_CASE("displacement threshold monotonicity") {
  const auto base = fixture_budget();
  const double d0 = identity_displacement_threshold(base).delta;
  for (double scale : {2.0, 5.0}) {
    auto b = base;
    b.A = base.A * scale;
    CHECK(identity_displacement_threshold(b).delta <= d0);
    b = base;
    b.B = base.B * scale;
    CHECK(identity_displacement_threshold(b).delta <= d0);
    b = base;
    b.Lambda2 = base.Lambda2 * scale;
    CHECK(identity_displacement_threshold(b).delta <= d0);
    b = base;
    b.V = base.V * scale;
    CHECK(identity_displacement_threshold(b).delta <= d0);
    b = base;
    b.w = base.w * scale;
    CHECK(identity_displacement_threshold(b).delta >= d0);
    b = base;
    b.i0 = base.i0 * scale;
    CHECK(identity_displacement_threshold(b).delta >= d0);
  }
}

TEST_CASE("smallness check closed forms") {
  ModelManifold flat;
  flat.kind = ModelKind::Circle;
  auto s = discretize(flat, 32);
  // Unit total mass.
  s.weight /= s.total_mass();

  // theta* = -w everywhere: zero norm, passes with the full margin.
  std::vector<double> field(32, -1.0);
  const auto rep = smallness_check(field, s, 1.0, 1.0, 1.0, 3, 4);
  CHECK(rep.norm == 0.0);
  CHECK(rep.pass);
  CHECK(rep.margin == rep.threshold);

  // theta* = 0, w = 1 on a unit-mass space: norm 1 against min(1/4, 1/4).
  std::vector<double> zero(32, 0.0);
  const auto rep2 = smallness_check(zero, s, 1.0, 1.0, 1.0, 2, 4);
  CHECK(rep2.norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep2.threshold == 0.25);
  CHECK_FALSE(rep2.pass);

  // The Ricci-variant factor doubles the threshold.
  const auto rep3 = smallness_check(zero, s, 1.0, 1.0, 1.0, 2, 2);
  CHECK(rep3.threshold == 0.5);
}

TEST_CASE("smallness norm matches a fine-resolution quadrature oracle") {
  ModelManifold m;
  m.kind = ModelKind::Circle;
  m.v_angle.cos_coef = {0.0, 0.5};
  const double w = 0.25;
  const auto norm_at = [&](int res) {
    const auto s = discretize(m, res);
    std::vector<double> field(res);
    for (int i = 0; i < res; ++i) {
      const double theta = 2.0 * kPi * i / res;
      field[i] = -0.5 * std::cos(theta);  // second derivative of the potential
    }
    return smallness_check(field, s, w, 1.0, 1.0, 1, 4).norm;
  };
  const double coarse = norm_at(128);
  const double fine = norm_at(1280);
  CHECK(std::abs(coarse - fine) <= 1e-2 * fine);
  // Support of (theta*+w)_+ is where v'' > -0.25, a strict subset, so the
  // L^{1/2} norm (sum sqrt(f) m)^2 stays below the full-support cap.
  CHECK(coarse > 0.0);
  const double cap = std::pow(std::sqrt(0.75) * std::exp(0.5) * 2.0 * kPi, 2.0);
  CHECK(coarse < cap);
}

TEST_CASE("packing bound in the flat limit") {
  const auto pb = bishop_gromov_packing(1.0, 1.0, 1e-12, 3.0);
  CHECK(pb.L == 27);  // (1.5/0.5)^3
  CHECK(pb.ratio == doctest::Approx(27.0).epsilon(1e-9));
}

TEST_CASE("packing quadrature matches the closed-form antiderivative") {
  // Lambda3 = 2, N = 3: integrand sinh^2(s), antiderivative sinh(2x)/4 - x/2.
  const double D = 2.0, delta = 0.5;
  const auto pb = bishop_gromov_packing(D, delta, 2.0, 3.0);
  const auto V = [](double r) { return std::sinh(2.0 * r) / 4.0 - r / 2.0; };
  const double ratio = V(D + delta / 2) / V(delta / 2);
  CHECK(std::abs(pb.ratio - ratio) <= 1e-9 * ratio);
  CHECK(pb.L == static_cast<std::int64_t>(std::ceil(ratio - 1e-9 * ratio)));
}

TEST_CASE("packing bound edge cases and monotonicity") {
  CHECK(bishop_gromov_packing(1.0, 1.0, 1.0, 3.0).L >= 1);
  CHECK_THROWS_AS(bishop_gromov_packing(1.0, 2.0, 1.0, 3.0), Error);

  const auto base = bishop_gromov_packing(2.0, 0.5, 1.0, 3.0);
  CHECK(bishop_gromov_packing(2.0, 0.7, 1.0, 3.0).L <= base.L);
  CHECK(bishop_gromov_packing(2.5, 0.5, 1.0, 3.0).L >= base.L);
  CHECK(bishop_gromov_packing(2.0, 0.5, 2.0, 3.0).L >= base.L);
  CHECK(bishop_gromov_packing(2.0, 0.5, 1.0, 4.0).L >= base.L);
}

TEST_CASE("order bound chains the pipeline deterministically") {
  const auto rep1 = group_order_bound(fixture_budget());
  const auto rep2 = group_order_bound(fixture_budget());
  CHECK(rep1.threshold.delta == doctest::Approx(std::atan(0.25)).epsilon(1e-15));
  CHECK(rep1.L == rep2.L);
  CHECK(rep1.packing.ratio == rep2.packing.ratio);
  CHECK(rep1.L1 == rep2.L1);
  CHECK(rep1.L1.str() == rep2.L1.str());

  // L1 = L! exactly.
  BigUint expect(1);
  for (std::int64_t k = 2; k <= rep1.L; ++k) expect.mul(static_cast<std::uint64_t>(k));
  CHECK(rep1.L1 == expect);
}

TEST_CASE("order bound with delta clamped to the diameter") {
  auto b = fixture_budget();
  b.i0 = 1000.0;
  b.w = 1e6;   // arctan branch huge
  b.Lambda2 = 1e-9;  // Sobolev branches huge
  const auto rep = group_order_bound(b);
  CHECK(rep.delta_packing == b.D);
  CHECK(rep.L >= 1);
}

TEST_CASE("ricci-variant threshold") {
  const auto b = fixture_budget();

  // delta1 dominates when tiny.
  const auto th = ricci_variant_threshold(b, 1e-9, 1.0);
  CHECK(th.delta == 1e-9);

  // epsilon formula: C_G/4 * min(1/A, w/B).
  auto b2 = fixture_budget();
  b2.w = 2.0;
  const auto th2 = ricci_variant_threshold(b2, 1.0, 4.0);
  CHECK(th2.epsilon == 1.0);

  // Lambda2 blow-up forces delta to zero through the Sobolev branches.
  auto b3 = fixture_budget();
  b3.Lambda2 = 1e12;
  const auto th3 = ricci_variant_threshold(b3, 1.0, 1.0);
  CHECK(th3.delta <= 1e-10);

  // The non-constructive inputs are mandatory.
  CHECK_THROWS_AS(ricci_variant_threshold(b, 0.0, 1.0), Error);
  CHECK_THROWS_AS(ricci_variant_threshold(b, 1.0, 0.0), Error);
}

TEST_CASE("budget validation") {
  auto b = fixture_budget();
  b.N = 2.0;  // below n
  CHECK_THROWS_AS(identity_displacement_threshold(b), Error);
  auto c = fixture_budget();
  c.V = -1.0;
  CHECK_THROWS_AS(identity_displacement_threshold(c), Error);
}
