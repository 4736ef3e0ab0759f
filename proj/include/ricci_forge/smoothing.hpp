#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ricci_forge/curvature.hpp"
#include "ricci_forge/error.hpp"
#include "ricci_forge/profile.hpp"

namespace ricci_forge {

/**
 * Cubic on [center - eps, center + eps] joining (F1, D1) at the left end to (F2, D2) at the right end,
 * with coefficients in powers of (t - center).
 */
inline kinds::CubicPolynomial spline_window(double center, double eps, double F1, double D1, double F2, double D2) {
  const double D = (F2 - F1) / (2.0 * eps);
  const double B1 = D1 - D, B2 = D2 - D;
  kinds::CubicPolynomial c;
  c.origin = center;
  c.c[0] = 0.5 * (F1 + F2) + 0.25 * eps * (B1 - B2);
  c.c[1] = D - 0.25 * (B1 + B2);
  c.c[2] = (B2 - B1) / (4.0 * eps);
  c.c[3] = (B1 + B2) / (4.0 * eps * eps);
  return c;
}

/**
 * @brief C^1 gluing of left (ending at center) and right (starting at center) by a cubic on
 * [center - eps, center + eps]. Tails outside the window are kept as they are.
 */
inline Profile cubic_spline_glue(const Profile& left, const Profile& right, double center, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidInput, "eps must be positive");
  if (center - eps < left.lo() || center + eps > right.hi() || left.hi() < center - eps || right.lo() > center + eps)
    fail(ErrorCode::EpsExceedsDomain, "glue window exceeds the profile domains");
  const Jet l = left.jet(center - eps, Side::Left);
  const Jet r = right.jet(center + eps, Side::Right);
  std::vector<Profile> parts;
  if (center - eps > left.lo()) parts.push_back(restrict_to(left, left.lo(), center - eps));
  parts.push_back(Profile(spline_window(center, eps, l.v, l.d1, r.v, r.d1), center - eps, center + eps));
  if (center + eps < right.hi()) parts.push_back(restrict_to(right, center + eps, right.hi()));
  return concat(parts);
}

/** Glue a single profile across its own breakpoint at center. */
inline Profile glue_at(const Profile& p, double center, double eps) {
  if (center - eps < p.lo() || center + eps > p.hi()) fail(ErrorCode::EpsExceedsDomain, "glue window exceeds the profile domain");
  return cubic_spline_glue(restrict_to(p, p.lo(), center), restrict_to(p, center, p.hi()), center, eps);
}

/** Slope jumps across a junction; the gluing is admissible when all three are nonnegative. */
struct GlueJump {
  double t_i = 0.0;
  double dalpha = 0.0;
  double dbeta = 0.0;
  double dtrace = 0.0;

  bool admissible() const { return dalpha >= 0.0 && dbeta >= 0.0 && dtrace >= 0.0; }
};

/** Jumps between the left limit of spec_left and the right limit of spec_right at t_i. */
inline GlueJump check_glue_jump(const WeightedWarpedSpec& spec_left, const WeightedWarpedSpec& spec_right, double t_i) {
  if (spec_left.a != spec_right.a || spec_left.b != spec_right.b || !(spec_left.q == spec_right.q))
    fail(ErrorCode::InvalidInput, "specs must share fiber dimensions and q");
  const Jet al = spec_left.alpha.jet(t_i, Side::Left), ar = spec_right.alpha.jet(t_i, Side::Right);
  const Jet bl = spec_left.beta.jet(t_i, Side::Left), br = spec_right.beta.jet(t_i, Side::Right);
  const Jet fl = spec_left.f.jet(t_i, Side::Left), fr = spec_right.f.jet(t_i, Side::Right);
  auto mismatch = [](double x, double y) { return std::abs(x - y) > 1e-10 * std::max(1.0, std::abs(x)); };
  if ((spec_left.a > 0 && mismatch(al.v, ar.v)) || (spec_left.b > 0 && mismatch(bl.v, br.v)) || mismatch(fl.v, fr.v))
    fail(ErrorCode::ValueMismatchAtJunction, "values of alpha, beta or f differ at the junction");
  const int a = spec_left.a, b = spec_left.b;
  GlueJump j;
  j.t_i = t_i;
  j.dalpha = a > 0 ? al.d1 - ar.d1 : 0.0;
  j.dbeta = b > 0 ? bl.d1 - br.d1 : 0.0;
  const double trl = (a > 0 ? a * al.d1 / al.v : 0.0) + (b > 0 ? b * bl.d1 / bl.v : 0.0) - fl.d1;
  const double trr = (a > 0 ? a * ar.d1 / al.v : 0.0) + (b > 0 ? b * br.d1 / bl.v : 0.0) - fr.d1;
  j.dtrace = trl - trr;
  return j;
}

/** Jumps of one spec across its own breakpoint. */
inline GlueJump check_glue_jump(const WeightedWarpedSpec& spec, double t_i) { return check_glue_jump(spec, spec, t_i); }

struct SmoothCornerOptions {
  /** Points the window must not reach (the window stays strictly inside the gaps between them). */
  std::vector<double> forbidden;
  /** Initial eps; zero means a tenth of the distance to the nearest other breakpoint or forbidden point. */
  double initial_eps = 0.0;
  int max_halvings = 40;
  int threads = 1;
  /**
   * Accept a corner whose slope jumps have the wrong sign and let the window certification decide.
   * Such corners only certify in wide windows, so initial_eps should be set near the available gap.
   */
  bool allow_negative_jumps = false;
  /**
   * Optional replacement for the window certification. Receives the glued spec and the window and
   * returns the worst margin found there.
   */
  std::function<double(const WeightedWarpedSpec&, double, double)> certify;
};

struct SmoothCornerResult {
  WeightedWarpedSpec spec;
  double eps = 0.0;
  double window_margin = 0.0;
  int halvings = 0;
};

namespace detail {

inline bool needs_glue(const Profile& p, double t) { return p.continuity_at(t) < 1; }

inline double nearest_other_point(const WeightedWarpedSpec& s, double t, const std::vector<double>& extra) {
  double d = std::min(t - s.lo(), s.hi() - t);
  for (const Profile* p : {&s.alpha, &s.beta, &s.f})
    for (double b : p->breakpoints())
      if (b != t) d = std::min(d, std::abs(b - t));
  for (double x : extra)
    if (x != t) d = std::min(d, std::abs(x - t));
  return d;
}

}  // namespace detail

/**
 * @brief Replaces alpha, beta and f near the corner t_i by cubic splines and certifies the window.
 *
 * Components that are already C^1 at t_i are left untouched: a cubic window would overshoot their
 * second-derivative jump, and the curvature scans accept C^1 breakpoints. eps starts at a tenth of the
 * distance to the nearest other breakpoint (or forbidden point) and is halved until the window scan
 * with step eps/200 has a positive margin. Outside [t_i - eps, t_i + eps] the spec is unchanged.
 */
inline SmoothCornerResult smooth_corner(const WeightedWarpedSpec& spec, double t_i, const ATensorBounds& A,
                                        const SmoothCornerOptions& opt = {}) {
  spec.validate();
  const GlueJump j = check_glue_jump(spec, t_i);
  const Jet al = spec.alpha.jet(t_i, Side::Left), bl = spec.beta.jet(t_i, Side::Left);
  const double scale_a = std::max(1.0, std::abs(al.d1)), scale_b = std::max(1.0, std::abs(bl.d1));
  auto ok = [](double jump, double scale) { return std::abs(jump) <= 1e-12 * scale || jump > 1e-9; };
  if (!opt.allow_negative_jumps && (!ok(j.dalpha, scale_a) || !ok(j.dbeta, scale_b) || !ok(j.dtrace, scale_a + scale_b)))
    fail(ErrorCode::JunctionSignViolation, "slope jumps at the corner are not strictly admissible");

  double eps = opt.initial_eps > 0.0 ? opt.initial_eps : 0.1 * detail::nearest_other_point(spec, t_i, opt.forbidden);
  if (!(eps > 0.0)) fail(ErrorCode::InvalidInput, "corner has no room for a smoothing window");
  const bool ga = detail::needs_glue(spec.alpha, t_i), gb = detail::needs_glue(spec.beta, t_i), gf = detail::needs_glue(spec.f, t_i);
  for (int k = 0; k <= opt.max_halvings; ++k, eps *= 0.5) {
    WeightedWarpedSpec out = spec;
    if (ga) out.alpha = glue_at(spec.alpha, t_i, eps);
    if (gb) out.beta = glue_at(spec.beta, t_i, eps);
    if (gf) out.f = glue_at(spec.f, t_i, eps);
    double margin;
    if (opt.certify) {
      margin = opt.certify(out, t_i - eps, t_i + eps);
    } else {
      ScanOptions so;
      so.window_lo = t_i - eps;
      so.window_hi = t_i + eps;
      so.keep_samples = false;
      so.threads = opt.threads;
      margin = positivity_scan(out, A, eps / 200.0, so).min_margin;
    }
    if (margin > 0.0) return {std::move(out), eps, margin, k};
  }
  fail(ErrorCode::NoAdmissibleEps, "no certified window after " + std::to_string(opt.max_halvings) + " halvings");
}

/** Smooths every listed corner in order; windows use the breakpoints still present as neighbours. */
inline WeightedWarpedSpec smooth_corners(WeightedWarpedSpec spec, const std::vector<double>& corners, const ATensorBounds& A,
                                         SmoothCornerOptions opt, std::vector<double>* eps_out = nullptr) {
  for (double c : corners) {
    const auto r = smooth_corner(spec, c, A, opt);
    spec = r.spec;
    if (eps_out) eps_out->push_back(r.eps);
    // Later windows must stay clear of this one.
    opt.forbidden.push_back(c - r.eps);
    opt.forbidden.push_back(c + r.eps);
  }
  return spec;
}

}  // namespace ricci_forge
