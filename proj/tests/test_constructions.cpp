#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ricci_forge/constructions.hpp"

using namespace ricci_forge;

namespace {

const double kPi = std::acos(-1.0);

// Both neck inequalities written out from the jets of beta and gamma.
std::pair<double, double> neck_inequalities(const Jet& b, const Jet& g, double a, int bdim) {
  const double first = -a * g.d2 / g.v - bdim * b.d2 / b.v;
  const double second = -b.d2 / b.v + (bdim - 1) * (1.0 - b.d1 * b.d1) / (b.v * b.v) - a * g.d1 * b.d1 / (g.v * b.v);
  return {first, second};
}

// Eight interior points per piece plus both one-sided ends.
std::vector<std::pair<double, Side>> piece_grid(const Profile& p) {
  std::vector<std::pair<double, Side>> out;
  for (const auto& pc : p.pieces()) {
    out.push_back({pc.lo, Side::Right});
    for (int i = 1; i < 8; ++i) out.push_back({pc.lo + (pc.hi - pc.lo) * i / 8.0, Side::Auto});
    out.push_back({pc.hi, Side::Left});
  }
  return out;
}

const NeckProfiles& reference_neck() {
  static const NeckProfiles n = neck_profiles(NeckParams{3.0, 2, 0.9, 0.1, 0.5});
  return n;
}

BiJet times_cos_s(const BiJet& A, double s) {
  const double c = std::cos(s), si = std::sin(s);
  BiJet r;
  r.v = A.v * c;
  r.t = A.t * c;
  r.s = A.s * c - A.v * si;
  r.tt = A.tt * c;
  r.ts = A.ts * c - A.t * si;
  r.ss = A.ss * c - 2.0 * A.s * si - A.v * c;
  return r;
}

BiJet cos_t_sin_s(double t, double s) {
  BiJet r;
  r.v = std::cos(t) * std::sin(s);
  r.t = -std::sin(t) * std::sin(s);
  r.s = std::cos(t) * std::cos(s);
  r.tt = -std::cos(t) * std::sin(s);
  r.ts = -std::sin(t) * std::cos(s);
  r.ss = -std::cos(t) * std::sin(s);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Neck profiles

TEST(Neck, BoundaryConditions) {
  const auto& n = reference_neck();
  EXPECT_DOUBLE_EQ(n.beta.lo(), 0.0);
  EXPECT_NEAR(n.beta.jet(0.0).v, 0.5, 1e-14);
  EXPECT_NEAR(n.beta.jet(0.0).d1, 0.0, 1e-14);
  EXPECT_NEAR(n.gamma.jet(0.0).v, 1.0, 1e-14);
  EXPECT_LE(n.gamma.jet(0.0).d1, 0.1);
  EXPECT_GT(n.gamma.jet(0.0).d1, 0.0);
  EXPECT_GE(n.beta.jet(n.t0).d1, 0.9);
  EXPECT_GE(n.gamma.jet(n.t0).d1, 0.0);
  EXPECT_GT(n.margin, 0.0);
}

TEST(Neck, BothInequalitiesPositiveOnEveryPiece) {
  const auto& n = reference_neck();
  for (const auto& [t, side] : piece_grid(n.beta)) {
    const auto [first, second] = neck_inequalities(n.beta.jet(t, side), n.gamma.jet(t, side), 3.0, 2);
    ASSERT_GT(first, 0.0) << "t=" << t;
    ASSERT_GT(second, 0.0) << "t=" << t;
  }
}

TEST(Neck, WarpedSpecEntriesAreTheInequalities) {
  const auto& n = reference_neck();
  const WeightedWarpedSpec s = neck_spec(n.beta, n.gamma, 2, 3.0);
  for (double frac : {0.001, 0.01, 0.1, 0.37, 0.8, 0.999}) {
    const double t = frac * n.t0;
    const RicciValues r = weighted_ricci_doubly_warped(s, t, Side::Right);
    const auto [first, second] = neck_inequalities(n.beta.jet(t, Side::Right), n.gamma.jet(t, Side::Right), 3.0, 2);
    EXPECT_NEAR(r.rtt, first, 1e-9 * std::max(1.0, std::abs(first)));
    EXPECT_NEAR(r.rvv, second, 1e-9 * std::max(1.0, std::abs(second)));
    EXPECT_TRUE(std::isnan(r.ruu));
  }
}

TEST(Neck, RescalingDividesInequalitiesByRSquared) {
  const auto& n = reference_neck();
  const NeckProfiles one = neck_profiles(NeckParams{3.0, 2, 0.9, 0.05, 1.0});
  // eps*r is the same, so both searches accept the same unit profile.
  ASSERT_DOUBLE_EQ(one.psi0, n.psi0);
  EXPECT_NEAR(n.t0, 0.5 * one.t0, 1e-12 * one.t0);
  for (double frac : {0.003, 0.2, 0.6, 0.95}) {
    const double t = frac * one.t0;
    const auto [f1, s1] = neck_inequalities(one.beta.jet(t, Side::Right), one.gamma.jet(t, Side::Right), 3.0, 2);
    const auto [fr, sr] = neck_inequalities(n.beta.jet(0.5 * t, Side::Right), n.gamma.jet(0.5 * t, Side::Right), 3.0, 2);
    EXPECT_NEAR(fr, f1 / 0.25, 1e-8 * std::abs(f1 / 0.25));
    EXPECT_NEAR(sr, s1 / 0.25, 1e-8 * std::abs(s1 / 0.25));
  }
}

TEST(Neck, RejectsInvalidParameters) {
  EXPECT_THROW(neck_profiles(NeckParams{3.0, 1, 0.9, 0.1, 0.5}), Error);
  try {
    neck_profiles(NeckParams{3.0, 2, 1.0, 0.1, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

// ---------------------------------------------------------------------------
// Sphere cap extension

TEST(SphereCap, BoundaryDataAndCertification) {
  const auto c = sphere_cap_extension(QValue(3.0), 5, 0.3, 0.05);
  EXPECT_TRUE(c.report.pass);
  EXPECT_GT(c.report.min_margin, 0.0);
  EXPECT_NEAR(c.beta_d1_inner, 0.05, 1e-14);
  EXPECT_NEAR(c.gamma_d1_inner, 0.0, 1e-14);
  EXPECT_NEAR(c.spec.beta.jet(c.t_prime, Side::Left).v, 1.0, 1e-14);
  EXPECT_GE(c.beta_d1_outer, std::cos(0.3));
  EXPECT_GE(c.gamma_d1_outer, 0.0);
  // f = -q ln gamma has vanishing normal derivative at t = 0.
  EXPECT_NEAR(c.spec.f.jet(0.0).d1, 0.0, 1e-14);
  EXPECT_EQ(c.spec.b, 4);
}

TEST(SphereCap, ZeroEpsIsInfeasible) {
  try {
    sphere_cap_extension(QValue(3.0), 5, 0.3, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleParameters);
  }
}

// ---------------------------------------------------------------------------
// Totally geodesic transition

TEST(TotGeod, CertifiedWithATensorTerms) {
  const ATensorBounds A{0.2, 0.2, 0.1};
  const auto r = tot_geod_profiles(1.0, 1.0, 0.01, 0.0, A, QValue::infinity(), 2, 2);
  EXPECT_TRUE(r.report.pass);
  EXPECT_GT(tot_geod_lambda_gap(r.lambda, 1.0, 2, 2, A), 0.0);
  EXPECT_GT(r.lambda, r.lambda_threshold);
  EXPECT_LT(r.lambda, 1.0);
  // Totally geodesic inner end with beta = mu, round collar and constant weight at the outer end.
  EXPECT_NEAR(r.spec.beta.jet(r.t1).v, 0.01, 1e-14);
  EXPECT_NEAR(r.spec.beta.jet(r.t1).d1, 0.0, 1e-14);
  const Jet outer = r.spec.beta.jet(1.0);
  EXPECT_NEAR(outer.v, std::sin(1.0), 1e-14);
  EXPECT_NEAR(outer.d1, std::cos(1.0), 1e-14);
  EXPECT_EQ(r.spec.f.jet(1.0).v, 0.0);
  EXPECT_EQ(r.spec.f.jet(1.0).d1, 0.0);
}

TEST(TotGeod, ZeroATensorAcceptsEveryLambda) {
  // Without A-tensor terms the inequality reduces to (a-1)(b-1)/r^2 > 0.
  EXPECT_NEAR(tot_geod_lambda_gap(0.3, 1.0, 2, 3, ATensorBounds{}), 2.0, 1e-15);
  const auto r = tot_geod_profiles(1.0, 1.0, 0.01, 0.5, ATensorBounds{}, QValue::infinity(), 2, 2);
  EXPECT_DOUBLE_EQ(r.lambda_threshold, std::cos(1.0));
  EXPECT_TRUE(r.report.pass);
}

TEST(TotGeod, LargeMuOverflowsTheSplice) {
  try {
    tot_geod_profiles(1.0, 1.0, 10.0, 0.0, ATensorBounds{}, QValue::infinity(), 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpliceOverflow);
  }
}

// ---------------------------------------------------------------------------
// Collapse

TEST(Collapse, BoundaryDataAndJumps) {
  const auto c = collapse_profiles(2, 2, 1.0, 0.1, 0.05);
  const auto& s = c.spec;
  EXPECT_NEAR(s.alpha.jet(c.t3).v, 0.0, 1e-14);
  EXPECT_NEAR(s.alpha.jet(c.t3).d1, 1.0, 1e-14);
  EXPECT_NEAR(s.alpha.jet(0.0).v, 1.0, 1e-14);
  EXPECT_NEAR(s.alpha.jet(0.0).d1, 0.0, 1e-14);
  EXPECT_EQ(s.beta.jet(0.0).v, 0.1);
  EXPECT_EQ(s.beta.jet(0.0).d1, 0.0);
  EXPECT_NEAR(s.f.jet(0.0).d1, -1.0, 1e-14);
  // Outward boundary data at t = 0: II = alpha'/alpha = 0 and H_f = -f'(0) = lambda3.
  EXPECT_NEAR(s.alpha.jet(0.0).d1 / s.alpha.jet(0.0).v, 0.0, 1e-14);
  EXPECT_NEAR(-s.f.jet(0.0).d1, 1.0, 1e-14);
  const double e = 0.05;
  EXPECT_GE(c.jump_alpha, std::cos(std::asin(e)) - e - 1e-15);
  // a cos(arcsin eps)/eps - a - lambda3 with a = 2, lambda3 = 1.
  const double literal = 2.0 * std::cos(std::asin(e)) / e - 2.0 - 1.0;
  EXPECT_NEAR(literal, 36.95, 1e-4);
  EXPECT_NEAR(c.jump_trace, literal, 1e-12);
}

TEST(Collapse, Certified) {
  const auto c = collapse_profiles(2, 2, 1.0, 0.1, 0.05);
  EXPECT_TRUE(c.report.pass);
  EXPECT_GT(c.smoothing_eps, 0.0);
  EXPECT_LT(c.smoothing_eps, std::asin(0.05));
}

TEST(Collapse, EpsilonTooLargeIsRejected) {
  try {
    collapse_profiles(1, 2, 1.0, 0.1, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsilonTooLarge);
  }
  try {
    collapse_profiles(2, 2, 30.0, 0.1, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsilonTooLarge);
  }
}

TEST(Collapse, ShrinkingEpsNeverBreaksCertification) {
  double eps = 0.05;
  for (int k = 0; k < 6; ++k, eps *= 0.5) EXPECT_TRUE(collapse_profiles(2, 2, 1.0, 0.1, eps).report.pass) << "eps=" << eps;
}

TEST(Collapse, ThreadCountDoesNotChangeTheReport) {
  const auto one = collapse_profiles(2, 3, 0.5, 0.2, 0.05, 1);
  const auto three = collapse_profiles(2, 3, 0.5, 0.2, 0.05, 3);
  EXPECT_EQ(one.report.min_margin, three.report.min_margin);
  EXPECT_EQ(one.report.argmin_t, three.report.argmin_t);
}

// ---------------------------------------------------------------------------
// h_eps

TEST(HEps, EqualsCosineOffTheWindow) {
  const auto d = h_eps_profile(0.01, 1.05, 2);
  EXPECT_EQ(d.h.jet(0.5).v, std::cos(0.5));
  for (int i = 0; i <= 400; ++i) {
    const double t = kPi / 2 * i / 400.0;
    if (t > 0.01 && t < 0.06) continue;
    ASSERT_NEAR(d.h.jet(t, Side::Right).v, std::cos(t), 1e-15) << t;
  }
}

TEST(HEps, FlatAtThreeEps) {
  const auto d = h_eps_profile(0.01, 1.05, 2);
  EXPECT_EQ(d.h.jet(0.03).d1, 0.0);
  EXPECT_GT(d.t_eps, 0.0105);
  EXPECT_LT(d.t_eps, 0.03);
}

TEST(HEps, RawProfileIsContinuousAtItsCorners) {
  const auto d = detail::h_eps_raw(0.01, 1.05);
  for (double c : d.corners) EXPECT_GE(d.raw.continuity_at(c), 0) << c;
  EXPECT_GE(d.raw.continuity_at(d.corners[0]), 1);
  EXPECT_GE(d.raw.continuity_at(d.corners[1]), 1);
}

TEST(HEps, SlopeRatioLimitAtNuOne) {
  auto limit = [](double nu) { return (std::pow(nu, 6) + std::pow(nu, 4) - 36.0) / (36.0 * (2.0 - nu * nu)); };
  EXPECT_NEAR(limit(1.0), -17.0 / 18.0, 1e-15);
  EXPECT_NEAR(h_eps_slope_ratio(1e-4, 1.0), -17.0 / 18.0, 1e-3);
  EXPECT_NEAR(h_eps_slope_ratio(1e-5, 1.0), -17.0 / 18.0, 1e-4);
  // At nu = 1.05 the limit is below -1, so the last corner has a negative slope jump.
  EXPECT_LT(limit(1.05), -1.0);
  EXPECT_NEAR(h_eps_slope_ratio(1e-5, 1.05), limit(1.05), 1e-4);
  EXPECT_GT(limit(1.03), -1.0);
}

TEST(HEps, DoublyWarpedMetricCertifiedForMTwo) {
  const auto d = h_eps_profile(0.01, 1.05, 2);
  const auto rep = h_eps_certify(d.h, 2);
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.min_margin, 0.05);
}

TEST(HEps, RhoIsUniformInEps) {
  std::vector<double> rho;
  for (double e : {0.01, 0.005, 0.0025}) rho.push_back(h_eps_certify(h_eps_profile(e, 1.05, 2).h, 2).min_margin);
  const double lo = *std::min_element(rho.begin(), rho.end()), hi = *std::max_element(rho.begin(), rho.end());
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi - lo, 0.05 * hi);
}

TEST(HEps, ConvergesToCosineInC1) {
  double prev_v = 1.0, prev_d = 1.0;
  for (double e : {0.02, 0.01, 0.005, 0.0025}) {
    const auto d = h_eps_profile(e, 1.05, 2);
    double sv = 0.0, sd = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double t = 6.0 * e * i / 2000.0;
      const Jet j = d.h.jet(t, Side::Right);
      sv = std::max(sv, std::abs(j.v - std::cos(t)));
      sd = std::max(sd, std::abs(j.d1 + std::sin(t)));
    }
    EXPECT_LT(sv, prev_v);
    EXPECT_LT(sd, prev_d);
    prev_v = sv;
    prev_d = sd;
  }
}

TEST(HEps, ShrinkingEpsNeverBreaksCertification) {
  double eps = 0.01;
  for (int k = 0; k < 6; ++k, eps *= 0.5) EXPECT_TRUE(h_eps_certify(h_eps_profile(eps, 1.05, 2).h, 2).pass) << "eps=" << eps;
}

TEST(HEps, MOneFullMetricIsNotPositiveOnTheHyperbolicPiece) {
  // For m = 1, Ric(u,u) = -h''/h - cot(t) h'/h; with h'' = h/nu^2 and h' -> 0 at t_eps it is negative.
  const auto d = detail::h_eps_raw(0.01, 1.05);
  const double t = 0.5 * (d.corners[0] + d.t_eps);
  const Jet h = d.raw.jet(t);
  const double ruu = -h.d2 / h.v - h.d1 / (std::tan(t) * h.v);
  EXPECT_LT(ruu, 0.0);
  EXPECT_NEAR(weighted_ricci_doubly_warped(detail::h_eps_spec(d.raw, 1), t).ruu, ruu, 1e-12);
  EXPECT_THROW(h_eps_profile(0.01, 1.05, 1), Error);
  // The tt entry alone, which the unlinking deformation relies on, stays positive.
  const auto tt = h_eps_profile(0.01, 1.05, 1, HEpsCheck::TtOnly);
  EXPECT_GT(h_eps_min_tt(h_eps_certify(tt.h, 1)).first, 0.0);
}

TEST(HEps, RejectsNuOutsideRange) {
  EXPECT_THROW(h_eps_profile(0.01, 1.0, 2), Error);
  EXPECT_THROW(h_eps_profile(0.01, 1.2, 2), Error);
}

// ---------------------------------------------------------------------------
// Unlinking deformation

TEST(Unlink, CutoffShape) {
  EXPECT_EQ(unlink_chi(-0.5).v, 1.0);
  EXPECT_EQ(unlink_chi(0.0).v, 1.0);
  EXPECT_EQ(unlink_chi(1.0).v, 0.0);
  EXPECT_EQ(unlink_chi(0.0).d1, 0.0);
  for (int i = 0; i <= 100; ++i) {
    const Jet c = unlink_chi(i / 100.0);
    EXPECT_GE(c.v, 0.0);
    EXPECT_LE(c.v, 1.0);
    EXPECT_LE(c.d1, 0.0);
  }
  const double h = 1e-6;
  EXPECT_NEAR(unlink_chi(0.3).d1, (unlink_chi(0.3 + h).v - unlink_chi(0.3 - h).v) / (2 * h), 1e-8);
  EXPECT_NEAR(unlink_chi(0.3).d2, (unlink_chi(0.3 + h).d1 - unlink_chi(0.3 - h).d1) / (2 * h), 1e-7);
}

TEST(Unlink, RoundMetricWhenProfileIsCosine) {
  for (int m : {1, 2, 3}) {
    UnlinkField u;
    u.m = m;
    u.eps = 0.01;
    u.delta = 0.3;
    u.delta_s = 0.3;
    u.h_eps.h = cos_profile(0.0, kPi / 2);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(0.01, 1.4);
    for (int i = 0; i < 20; ++i) {
      const TripleRicci r = unlink_ricci(u, U(rng), U(rng));
      EXPECT_NEAR(r.rtt, 2 * m, 1e-12);
      EXPECT_NEAR(r.rss, 2 * m, 1e-11);
      EXPECT_NEAR(r.ruu, 2 * m, 1e-11);
      EXPECT_NEAR(r.rts, 0.0, 1e-12);
      if (m > 1)
        EXPECT_NEAR(r.rvv, 2 * m, 1e-11);
      else
        EXPECT_TRUE(std::isnan(r.rvv));
    }
  }
}

TEST(Unlink, FormulasMatchTriplyWarpedRicci) {
  const UnlinkField u = make_unlink_field(2, 0.01, 0.3, 1.05);
  for (double t : {0.012, 0.02, 0.031, 0.045, 0.058, 0.3}) {
    for (double s : {0.02, 0.1, 0.2, 0.29, 0.7}) {
      const TripleRicci got = unlink_ricci(u, t, s);
      const TripleRicci ref =
          ricci_triple_warped_jets(times_cos_s(u.alpha_tilde(t, s), s), cos_t_sin_s(t, s), Jet{std::cos(t), -std::sin(t), -std::cos(t)}, 2, 1);
      const double tol = 1e-9;
      EXPECT_NEAR(got.rtt, ref.rtt, tol) << t << " " << s;
      EXPECT_NEAR(got.rts, ref.rts, tol) << t << " " << s;
      EXPECT_NEAR(got.rss, ref.rss, tol) << t << " " << s;
      EXPECT_NEAR(got.ruu, ref.ruu, tol) << t << " " << s;
      EXPECT_NEAR(got.rvv, ref.rvv, tol) << t << " " << s;
    }
  }
}

TEST(Unlink, SliceAtThreeEpsIsTotallyGeodesic) {
  const UnlinkField u = make_unlink_field(1, 0.01, 0.3, 1.05);
  const BiJet A = u.alpha_tilde(0.03, 0.0);
  EXPECT_EQ(A.t, 0.0);
  EXPECT_EQ(A.s, 0.0);
  const auto rep = unlink_certify(u, 0.5);
  EXPECT_EQ(rep.II_t, 0.0);
  EXPECT_EQ(rep.II_s, 0.0);
}

TEST(Unlink, BisectionFindsCertifiedEpsForMOne) {
  const auto r = find_unlink_eps(1, 0.3, 1.05);
  EXPECT_LE(r.field.eps, 0.05);
  EXPECT_TRUE(r.report.pass);
  EXPECT_TRUE(r.report.tt_bound_holds);
  EXPECT_GE(r.report.window_samples_t, 200u);
  EXPECT_GE(r.report.window_samples_s, 200u);
  EXPECT_GT(r.report.rho, 0.0);
}

TEST(Unlink, CertifiedAtEpsOneHundredthForMTwo) {
  const auto r = unlink_field(2, 0.01, 0.3, 1.05);
  EXPECT_TRUE(r.report.pass);
  EXPECT_TRUE(r.h_report.pass);
}

TEST(Unlink, DeltaMustExceedTheWindow) { EXPECT_THROW(make_unlink_field(1, 0.1, 0.3, 1.05), Error); }

// ---------------------------------------------------------------------------
// Isotopy ramp and parameters

TEST(Isotopy, RampBounds) {
  for (double a : {0.5, 0.25, 0.1}) {
    const Profile chi = chi_ramp(a);
    const double end = 3.0 / a;
    EXPECT_EQ(chi.lo(), 0.0);
    EXPECT_NEAR(chi.hi(), end, 1e-12);
    EXPECT_NEAR(chi.jet(0.0).v, 0.0, 1e-15);
    EXPECT_NEAR(chi.jet(end).v, 1.0, 1e-15);
    EXPECT_NEAR(chi.jet(0.0).d1, 0.0, 1e-15);
    EXPECT_NEAR(chi.jet(end).d1, 0.0, 1e-15);
    for (double b : chi.breakpoints()) EXPECT_GE(chi.continuity_at(b), 2) << a << " " << b;
    for (int i = 0; i <= 6000; ++i) {
      const Jet j = chi.jet(end * i / 6000.0, Side::Right);
      ASSERT_GE(j.v, -1e-12);
      ASSERT_LE(j.v, 1.0 + 1e-12);
      ASSERT_LE(std::abs(j.d1), a * (1 + 1e-12));
      ASSERT_LE(std::abs(j.d2), a * (1 + 1e-12));
    }
  }
}

TEST(Isotopy, ParametersSatisfyTheEstimates) {
  const double c = 1.0, C = 5.0, lambda = 2.0;
  const int n = 5;
  const auto p = isotopy_params(c, C, n, lambda);
  auto holds = [&](double a) {
    const double Cp = C + 0.5 * n * C * C + 0.25 * C * C + 0.5 * C * (6 * C + std::abs(lambda));
    const double tt = 2 * C * a - 0.5 * C * (a * a + a);
    const double vv = c - Cp * a;
    return tt > C * a && vv > 0 && C * a * vv > std::pow(0.5 * (n + 1) * a * C, 2);
  };
  EXPECT_TRUE(holds(p.a));
  EXPECT_FALSE(holds(2 * p.a));
  EXPECT_EQ(p.a, std::ldexp(1.0, -p.k));
  EXPECT_EQ(p.f.jet(0.0).v, 0.0);
  EXPECT_NEAR(p.f.jet(3.0 / p.a).d1, lambda, 1e-12);
  EXPECT_NEAR(p.f.jet(0.0).d1, lambda - 6 * C, 1e-12);
}

TEST(Isotopy, TinyLowerBoundHasNoAdmissibleA) {
  try {
    isotopy_params(1e-30, 1.0, 3, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoAdmissibleA);
  }
}
