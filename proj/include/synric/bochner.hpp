#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "synric/bigint.hpp"
#include "synric/space.hpp"

namespace synric {

/// A-priori geometric bounds feeding the quantitative group-order estimates.
/// A and B are the Sobolev constants of the hypothesis inequality; they are
/// inputs, never estimated here.
struct GeometryBudget {
  int n = 3;            // dimension
  double N = 3.0;       // Bakry-Emery parameter, N >= n
  double i0 = 1.0;      // injectivity radius lower bound
  double Lambda1 = 1.0; // sectional (or Ricci) curvature bound
  double Lambda2 = 1.0; // bound on the gradient of the Ricci tensor
  double Lambda3 = 1.0; // lower Ricci budget for the packing count
  double V = 1.0;       // total measure bound
  double D = 1.0;       // diameter bound
  double E = 1.0;       // weight sup bound (Ricci-variant theorem only)
  double w = 1.0;       // negativity margin
  double A = 1.0, B = 1.0;

  void check() const {
    const auto bad = [](double v) { return !(v > 0.0) || !std::isfinite(v); };
    if (n < 2) throw Error("budget: dimension must be at least 2");
    if (!(N >= n)) throw Error("budget: N must satisfy N >= n");
    if (bad(i0) || bad(Lambda1) || bad(Lambda2) || bad(Lambda3) || bad(V) || bad(D) || bad(E) ||
        bad(w) || bad(A) || bad(B))
      throw Error("budget: all fields must be strictly positive and finite");
  }
};

struct TanBoundConstants {
  double c1 = 0.0;      // 4 (n-1) Lambda
  double c2 = 0.0;      // sqrt((n-1) Lambda / 2)
  double delta0 = 0.0;  // min(i0/2, pi/(2 c2))
};

/// Constants of the displacement Laplacian comparison: the tan^2 error term
/// C1 tan^2(C2 d) is valid for displacements up to delta0.
inline TanBoundConstants rigidity_tan_constants(int n, double Lambda, double i0) {
  if (n < 2) throw Error("rigidity_tan_constants: dimension must be at least 2");
  if (!(Lambda > 0.0) || !(i0 > 0.0))
    throw Error("rigidity_tan_constants: Lambda and i0 must be positive");
  TanBoundConstants c;
  c.c1 = 4.0 * (n - 1) * Lambda;
  c.c2 = std::sqrt((n - 1) * Lambda / 2.0);
  c.delta0 = std::min(i0 / 2.0, kPi / (2.0 * c.c2));
  return c;
}

struct DisplacementThreshold {
  double delta = 0.0;
  // The four branches of the min, in order: delta0, arctan, Sobolev-A,
  // Sobolev-B. Useful for auditing which constraint binds.
  double branch_delta0 = 0.0;
  double branch_arctan = 0.0;
  double branch_sobolev_a = 0.0;
  double branch_sobolev_b = 0.0;
  TanBoundConstants tan_constants;
};

/// Displacement threshold below which a measure-preserving isometry of a
/// space within the budget must be the identity:
///   delta = min{delta0, arctan(sqrt(w/(2 C1)))/C2,
///               1/(4 A Lambda2 V^{2/n}), w/(2 B Lambda2 V^{2/n})}.
inline DisplacementThreshold identity_displacement_threshold(const GeometryBudget& b) {
  b.check();
  DisplacementThreshold th;
  th.tan_constants = rigidity_tan_constants(b.n, b.Lambda1, b.i0);
  const double vpow = std::pow(b.V, 2.0 / b.n);
  th.branch_delta0 = th.tan_constants.delta0;
  th.branch_arctan = std::atan(std::sqrt(b.w / (2.0 * th.tan_constants.c1))) /
                     th.tan_constants.c2;
  th.branch_sobolev_a = 1.0 / (4.0 * b.A * b.Lambda2 * vpow);
  th.branch_sobolev_b = b.w / (2.0 * b.B * b.Lambda2 * vpow);
  th.delta = std::min(std::min(th.branch_delta0, th.branch_arctan),
                      std::min(th.branch_sobolev_a, th.branch_sobolev_b));
  return th;
}

struct SmallnessReport {
  double norm = 0.0;       // discrete L^{n/2}(m) norm of (theta* + w)_+
  double threshold = 0.0;  // min(1/(factor A), w/(factor B))
  double margin = 0.0;
  bool pass = false;
};

/// Checks the small-norm negativity hypothesis. factor = 4 for the
/// sectional-curvature estimate, 2 for the Ricci variant.
inline SmallnessReport smallness_check(const std::vector<double>& theta_field,
                                       const FiniteMMS& space, double w, double A, double B,
                                       int n, int factor = 4) {
  if (static_cast<int>(theta_field.size()) != space.n())
    throw Error("smallness_check: theta field length mismatch");
  if (factor != 4 && factor != 2) throw Error("smallness_check: factor must be 4 or 2");
  if (n < 1) throw Error("smallness_check: dimension must be positive");
  const double p = n / 2.0;
  KahanSum s;
  for (int i = 0; i < space.n(); ++i) {
    const double f = std::max(theta_field[i] + w, 0.0);
    if (f > 0.0) s.add(std::pow(f, p) * space.weight[i]);
  }
  SmallnessReport rep;
  rep.norm = s.value() > 0.0 ? std::pow(s.value(), 1.0 / p) : 0.0;
  rep.threshold = std::min(1.0 / (factor * A), w / (factor * B));
  rep.margin = rep.threshold - rep.norm;
  rep.pass = rep.norm < rep.threshold;
  return rep;
}

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double rough = simpson(f, a, b, fa, fm, fb);
  const double tol = rel_tol * std::max(std::abs(rough), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, rough, tol, 48);
}

}  // namespace detail

struct PackingBound {
  std::int64_t L = 0;
  double ratio = 0.0;
  double volume_big = 0.0;    // model volume at radius D + delta/2
  double volume_small = 0.0;  // model volume at radius delta/2
};

/// Volume-comparison packing count: the number of delta-balls that fit in a
/// diameter-D space with Ric_N >= -Lambda3 is at most
///   ceil( V(D + delta/2) / V(delta/2) ),
/// where V(r) integrates sinh(sqrt(Lambda3/(N-1)) s)^{N-1}. Quadrature runs
/// to relative error 1e-10 and values within 1e-9 of an integer round down.
inline PackingBound bishop_gromov_packing(double D, double delta, double Lambda3, double N) {
  if (!(delta > 0.0) || delta > D) throw Error("bishop_gromov_packing: need 0 < delta <= D");
  if (!(Lambda3 > 0.0) || !(N > 1.0))
    throw Error("bishop_gromov_packing: need Lambda3 > 0 and N > 1");
  const double a = std::sqrt(Lambda3 / (N - 1.0));
  const auto integrand = [&](double s) { return std::pow(std::sinh(a * s), N - 1.0); };
  PackingBound pb;
  pb.volume_big = detail::integrate(integrand, 0.0, D + delta / 2.0, 1e-11);
  pb.volume_small = detail::integrate(integrand, 0.0, delta / 2.0, 1e-11);
  if (!std::isfinite(pb.volume_big) || pb.volume_small <= 0.0)
    throw Error("bishop_gromov_packing: model volume overflow; budget out of range");
  pb.ratio = pb.volume_big / pb.volume_small;
  if (!(pb.ratio < 9e15)) throw Error("bishop_gromov_packing: packing count overflow");
  pb.L = static_cast<std::int64_t>(std::ceil(pb.ratio - std::max(1e-9 * pb.ratio, 1e-12)));
  if (pb.L < 1) pb.L = 1;
  return pb;
}

struct ConstantsReport {
  TanBoundConstants tan_constants;
  DisplacementThreshold threshold;
  double delta_packing = 0.0;  // threshold clamped to the diameter
  PackingBound packing;
  std::int64_t L = 0;
  BigUint L1;  // exact L!
};

/// Full constants pipeline: displacement threshold, packing count at that
/// scale, and the factorial order bound L1 = L!.
inline ConstantsReport group_order_bound(const GeometryBudget& b) {
  ConstantsReport rep;
  rep.threshold = identity_displacement_threshold(b);
  rep.tan_constants = rep.threshold.tan_constants;
  rep.delta_packing = std::min(rep.threshold.delta, b.D);
  rep.packing = bishop_gromov_packing(b.D, rep.delta_packing, b.Lambda3, b.N);
  rep.L = rep.packing.L;
  rep.L1 = factorial(rep.L);
  return rep;
}

struct RicciVariantThreshold {
  double delta = 0.0;
  double epsilon = 0.0;
  double volume_times_e = 0.0;  // comparison volume V(n, Lambda1, D) * E
  double branch_delta1 = 0.0;
  double branch_sobolev_a = 0.0;
  double branch_sobolev_b = 0.0;
};

/// Ricci-curvature variant of the displacement threshold. delta1 and C_G are
/// non-constructive inputs the caller must supply; the measure bound is the
/// comparison-ball volume under |Ric| <= Lambda1 scaled by the weight sup E.
/// That composition is one consistent reading of the hypotheses and is
/// reported explicitly for audit.
inline RicciVariantThreshold ricci_variant_threshold(const GeometryBudget& b, double delta1,
                                                     double C_G) {
  b.check();
  if (!(delta1 > 0.0) || !std::isfinite(delta1))
    throw Error("ricci_variant_threshold: delta1 must be supplied explicitly (positive)");
  if (!(C_G > 0.0) || !std::isfinite(C_G))
    throw Error("ricci_variant_threshold: C_G must be supplied explicitly (positive)");

  const double kappa = b.Lambda1 / (b.n - 1.0);
  const double sq = std::sqrt(kappa);
  const auto snh = [&](double s) { return std::pow(std::sinh(sq * s) / sq, b.n - 1.0); };
  const double omega = 2.0 * std::pow(kPi, b.n / 2.0) / std::tgamma(b.n / 2.0);
  const double vol = omega * detail::integrate(snh, 0.0, b.D, 1e-11);

  RicciVariantThreshold th;
  th.volume_times_e = vol * b.E;
  const double vpow = std::pow(th.volume_times_e, 2.0 / b.n);
  th.branch_delta1 = delta1;
  th.branch_sobolev_a = 1.0 / (4.0 * b.A * b.Lambda2 * vpow);
  th.branch_sobolev_b = b.w / (4.0 * b.B * b.Lambda2 * vpow);
  th.delta = std::min(th.branch_delta1, std::min(th.branch_sobolev_a, th.branch_sobolev_b));
  th.epsilon = (C_G / 4.0) * std::min(1.0 / b.A, b.w / b.B);
  return th;
}

}  // namespace synric
