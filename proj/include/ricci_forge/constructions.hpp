#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ricci_forge/curvature.hpp"
#include "ricci_forge/error.hpp"
#include "ricci_forge/profile.hpp"
#include "ricci_forge/smoothing.hpp"

namespace ricci_forge {

/** Finite stand-in for q = infinity in constructions that need a finite exponent. */
inline double effective_q(const QValue& q, int a, int b) {
  return q.is_infinite() ? static_cast<double>(std::max({a, b, 3})) : q.value();
}

namespace detail {

/** Bisection for a sign change of g on [lo, hi]; g(lo) and g(hi) must have opposite signs. */
template <class G>
double bisect(G g, double lo, double hi, double width = 1e-12) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > width * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/** Samples of a scan reduced to the worst margin times beta^2, which is invariant under rescaling. */
inline double scaled_min_margin(const CurvatureReport& rep, const Profile& beta) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    const double b = beta.jet(s.t, s.side == Side::Auto ? Side::Right : s.side).v;
    m = std::min(m, std::isnan(s.margin) ? -std::numeric_limits<double>::infinity() : s.margin * b * b);
  }
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Neck profiles

struct NeckParams {
  double q_eff = 3.0;
  int b = 2;
  double lambda = 0.9;
  double eps = 0.1;
  double r = 1.0;

  void validate() const {
    if (!(q_eff > 0.0) || !std::isfinite(q_eff)) fail(ErrorCode::InvalidInput, "q_eff must be a positive finite number");
    if (b < 2) fail(ErrorCode::InvalidInput, "neck profiles need b >= 2");
    if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::InvalidInput, "lambda must lie in (0, 1)");
    if (!(eps > 0.0) || !(r > 0.0)) fail(ErrorCode::InvalidInput, "eps and r must be positive");
  }
};

struct NeckProfiles {
  Profile beta;
  Profile gamma;
  double t0 = 0.0;
  /** gamma'(0) of the profile at r = 1, and the cap on psi*beta/beta' used by the integrator. */
  double psi0 = 0.0;
  double pcap = 0.0;
  /** Worst certified margin, absolute and multiplied by beta^2. */
  double margin = 0.0;
  double scaled_margin = 0.0;
  int evaluations = 0;
};

namespace detail {

/**
 * Feedback ODE for the neck at r = 1. State (beta, u = beta', psi = gamma'/gamma, ln gamma).
 * gamma''/gamma = -psi*omega, and beta'' = min(k*beta*psi*omega, theta*W2) keeps the first inequality
 * with relative margin sigma/(1+sigma) and the second with margin (1-theta)*W2. omega steers
 * p = psi*beta/beta' towards the target curve pstar(u), after a kick phase that ends at u = uk.
 */
struct NeckOde {
  double a = 3.0;
  double b = 2.0;
  double k = 0.0;
  double sigma = 0.1;
  double theta = 0.9;
  double xi = 2.0;
  double pcap = 0.45;
  double gain = 2.0;
  double theta2 = 0.5;
  double uk = 0.0;

  struct State {
    double beta, u, psi, lg;
  };
  struct Eval {
    State d;
    double bpp, W2, omega;
  };

  double pstar(double u) const {
    if (u <= 0.0) return pcap;
    return std::min(pcap, theta2 * (b - 1.0) * (1.0 - u * u) / (u * u * (k + a)));
  }

  Eval operator()(const State& s) const {
    double omega;
    if (s.u > 0.0) {
      const double tau = s.beta / s.u, p = s.psi * tau;
      const double w = (1.0 - p) / (1.0 + k * p) + gain * std::max(0.0, p - pstar(s.u)) / p;
      omega = std::max(w / tau, xi * std::max(0.0, 1.0 - s.u / uk));
    } else {
      omega = xi;
    }
    const double W2 = (b - 1.0) * (1.0 - s.u * s.u) / s.beta - a * s.psi * s.u;
    const double bpp = std::max(0.0, std::min(k * s.beta * s.psi * omega, theta * W2));
    return {{s.u, bpp, -s.psi * s.psi - s.psi * omega, s.psi}, bpp, W2, omega};
  }
};

struct NeckKnot {
  double t;
  NeckOde::State s;
  double bpp, omega;
};

struct NeckTrace {
  bool ok = false;
  std::string reason;
  std::vector<NeckKnot> knots;
};

inline NeckTrace integrate_neck(double a, int b, double lambda, double psi0, double pcap) {
  NeckOde ode;
  ode.a = a;
  ode.b = b;
  ode.k = (a / b) / (1.0 + ode.sigma);
  ode.pcap = pcap;
  ode.uk = 0.5 * (a / b) * psi0;
  using S = NeckOde::State;
  S s{1.0, 0.0, psi0, 0.0};
  double t = 0.0;
  NeckTrace tr;
  NeckOde::Eval e = ode(s);
  tr.knots.push_back({t, s, e.bpp, e.omega});
  const double frac = 0.02;
  for (int n = 0; n < 300000; ++n) {
    const double tau = s.beta / std::max(s.u, 1e-300);
    const double h = frac * std::min({tau, 1.0 / s.psi, 1.0 / std::max(e.omega, 1e-300), std::max(s.u, 1e-2) / std::max(e.bpp, 1e-300)});
    auto add = [](const S& x, const S& d, double c) { return S{x.beta + c * d.beta, x.u + c * d.u, x.psi + c * d.psi, x.lg + c * d.lg}; };
    const S k1 = e.d, k2 = ode(add(s, k1, h / 2)).d, k3 = ode(add(s, k2, h / 2)).d, k4 = ode(add(s, k3, h)).d;
    s = {s.beta + h / 6 * (k1.beta + 2 * k2.beta + 2 * k3.beta + k4.beta), s.u + h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u),
         s.psi + h / 6 * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi), s.lg + h / 6 * (k1.lg + 2 * k2.lg + 2 * k3.lg + k4.lg)};
    t += h;
    e = ode(s);
    if (!(s.psi > 0.0) || !(s.beta > 0.0) || !std::isfinite(t)) {
      tr.reason = "state left the admissible region";
      return tr;
    }
    tr.knots.push_back({t, s, e.bpp, e.omega});
    if (e.W2 <= 0.0) {
      tr.reason = "second inequality allowance vanished";
      return tr;
    }
    if (s.u >= lambda) {
      tr.ok = true;
      return tr;
    }
    if (t > 1e100) break;
  }
  tr.reason = "step or length budget exhausted";
  return tr;
}

/** C^2 piecewise quintic Hermite profiles through the integrator knots. */
inline std::pair<Profile, Profile> neck_trace_profiles(const NeckTrace& tr) {
  std::vector<Piece> bp, gp;
  auto bjet = [](const NeckKnot& k) { return Jet{k.s.beta, k.s.u, k.bpp}; };
  auto gjet = [](const NeckKnot& k) {
    const double g = std::exp(k.s.lg);
    return Jet{g, k.s.psi * g, -k.s.psi * k.omega * g};
  };
  for (std::size_t i = 0; i + 1 < tr.knots.size(); ++i) {
    const auto &k0 = tr.knots[i], &k1 = tr.knots[i + 1];
    bp.push_back(Piece{quintic_hermite(k0.t, bjet(k0), k1.t, bjet(k1)), k0.t, k1.t});
    gp.push_back(Piece{quintic_hermite(k0.t, gjet(k0), k1.t, gjet(k1)), k0.t, k1.t});
  }
  return {Profile(std::move(bp)), Profile(std::move(gp))};
}

}  // namespace detail

/** Warped spec whose tt and vv Ricci entries are the two neck inequalities: no alpha factor, f = -q ln gamma. */
inline WeightedWarpedSpec neck_spec(const Profile& beta, const Profile& gamma, int b, double q_eff) {
  WeightedWarpedSpec s;
  s.a = 0;
  s.b = b;
  s.q = QValue(q_eff);
  s.alpha = constant_profile(1.0, beta.lo(), beta.hi());
  s.beta = beta;
  s.f = log_of(gamma, -q_eff);
  return s;
}

/**
 * @brief Profiles beta, gamma on [0, t0] with gamma(0) = 1, beta(0) = r, gamma'(0) <= eps, beta'(0) = 0,
 * gamma'(t0) >= 0, beta'(t0) >= lambda and both neck inequalities positive.
 *
 * Searches the initial slope psi0 (halving from eps*r) and the cap on psi*beta/beta'; every candidate is
 * certified by a positivity scan of the assembled warped spec before it is accepted.
 */
inline NeckProfiles neck_profiles(const NeckParams& p, int budget = 10000) {
  p.validate();
  int evals = 0;
  double best = -std::numeric_limits<double>::infinity();
  std::string last_reason = "no candidate";
  for (double pcap : {0.45, 0.35, 0.25}) {
    for (double psi0 = p.eps * p.r; psi0 > 1e-12 && evals < budget; psi0 *= 0.5) {
      ++evals;
      const auto tr = detail::integrate_neck(p.q_eff, p.b, p.lambda, psi0, pcap);
      if (!tr.ok) {
        last_reason = tr.reason;
        continue;
      }
      auto [beta1, gamma1] = detail::neck_trace_profiles(tr);
      const double t01 = beta1.hi();
      const WeightedWarpedSpec s1 = neck_spec(beta1, gamma1, p.b, p.q_eff);
      ScanOptions so;
      ++evals;
      const CurvatureReport rep = positivity_scan(s1, ATensorBounds{}, t01 / 2000.0, so);
      const double scaled = detail::scaled_min_margin(rep, beta1);
      best = std::max(best, scaled);
      if (!rep.pass) {
        last_reason = "certification scan failed";
        continue;
      }
      NeckProfiles out;
      out.beta = rescale(beta1, p.r);
      out.gamma = stretch(gamma1, p.r);
      out.t0 = out.beta.hi();
      out.psi0 = psi0;
      out.pcap = pcap;
      out.scaled_margin = scaled;
      out.margin = rep.min_margin / (p.r * p.r);
      out.evaluations = evals;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "no certified neck after " << evals << " evaluations (last: " << last_reason << ", best scaled margin " << best << ")";
  fail(ErrorCode::InfeasibleParameters, msg.str());
}

// ---------------------------------------------------------------------------
// Sphere cap extension

struct SphereCapResult {
  WeightedWarpedSpec spec;
  NeckProfiles neck;
  double q_eff = 0.0;
  double t_prime = 0.0;
  double N = 1.0;
  /** Boundary data at the inner end t = 0 and the outer end. */
  double beta_d1_inner = 0.0;
  double gamma_d1_inner = 0.0;
  double beta_d1_outer = 0.0;
  double gamma_d1_outer = 0.0;
  CurvatureReport report;
};

/**
 * @brief Annulus [0, t'+t0] x S^{n-1} that starts as a slightly bent round collar (beta = N cos((t-t')/N),
 * beta'(0) = eps, gamma'(0) = 0) and continues with neck profiles until beta' >= cos(r_cap).
 *
 * beta(t') = 1 and beta'(0) = eps give N = 1 and t' = arcsin(eps). gamma on [0, t'] is a quintic
 * joining gamma'(0) = 0 to the neck's inlet jet, so gamma and f are C^2 at t'.
 */
inline SphereCapResult sphere_cap_extension(const QValue& q, int n, double r_cap, double eps, int threads = 1) {
  if (n < 3) fail(ErrorCode::InvalidInput, "sphere cap extension needs n >= 3");
  if (!(r_cap > 0.0 && r_cap < M_PI / 2)) fail(ErrorCode::InvalidInput, "r_cap must lie in (0, pi/2)");
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::InfeasibleParameters, "eps must lie in (0, 1) for beta'(0) = eps with beta > 0");
  SphereCapResult out;
  const int b = n - 1;
  out.q_eff = effective_q(q, 0, b);
  out.N = 1.0;
  out.t_prime = std::asin(eps);
  const double tp = out.t_prime;
  // gamma'' on the collar is about psi0/t', so psi0 must stay below (n-1)*eps/q for the tt entry.
  NeckParams np{out.q_eff, b, std::cos(r_cap), eps * std::min(1.0, 0.5 * b / out.q_eff), 1.0};
  out.neck = neck_profiles(np);
  const Jet gn = out.neck.gamma.jet(0.0, Side::Right);
  const Jet g0{1.0 - 0.5 * gn.d1 * tp, 0.0, gn.d1 / tp};
  const Profile gamma_cap(quintic_hermite(0.0, g0, tp, gn), 0.0, tp);
  const Profile beta_cap = cos_profile(0.0, tp, 1.0, 1.0, -tp);
  WeightedWarpedSpec s;
  s.a = 0;
  s.b = b;
  s.q = q;
  s.beta = concat({beta_cap, shift(out.neck.beta, tp)});
  const Profile gamma = concat({gamma_cap, shift(out.neck.gamma, tp)});
  s.f = log_of(gamma, -out.q_eff);
  s.alpha = constant_profile(1.0, s.beta.lo(), s.beta.hi());
  out.spec = s;
  // Step 1e-3 up to t = 1, then 1e-3 relative: the neck is self-similar over many decades.
  ScanOptions so;
  so.threads = threads;
  so.relative_scale = 1.0;
  out.report = positivity_scan(s, ATensorBounds{}, 1e-3, so);
  out.beta_d1_inner = s.beta.jet(0.0).d1;
  out.gamma_d1_inner = gamma.jet(0.0).d1;
  out.beta_d1_outer = s.beta.jet(s.hi()).d1;
  out.gamma_d1_outer = gamma.jet(s.hi()).d1;
  return out;
}

// ---------------------------------------------------------------------------
// Transition to a totally geodesic boundary

struct TotGeodResult {
  WeightedWarpedSpec spec;
  ATensorBounds A;
  double q_eff = 0.0;
  double lambda = 0.0;
  double t_lambda = 0.0;
  /** Lower threshold found by the bisection: every lambda above it satisfies the strict inequality. */
  double lambda_threshold = 0.0;
  double t1 = 0.0;
  double t_splice = 0.0;
  double splice_eps = 0.0;
  NeckProfiles neck;
  CurvatureReport report;
};

/** Left minus right side of the inequality that selects lambda; positive means admissible. */
inline double tot_geod_lambda_gap(double lambda, double r, int a, int b, const ATensorBounds& A) {
  const double s2 = r * r * (1.0 - lambda * lambda);  // r^2 sin^2(t_lambda/r)
  return ((a - 1) - 2.0 * s2 * A.AuAu) * (b - 1) / (r * r) - s2 * A.deltaA * A.deltaA;
}

/**
 * @brief Submersion spec on [t1, t0] that is the round collar r sin(t/r) near t0, has constant f = f0
 * there, and ends at t1 in a totally geodesic slice with beta(t1) = mu.
 *
 * The collar is replaced below t_lambda by a concave quadratic with slope slightly above lambda, then a
 * neck rescaled by mu is spliced in where the quadratic reaches the neck's final value; the corner is
 * smoothed and the whole spec is certified with the A-tensor terms.
 */
inline TotGeodResult tot_geod_profiles(double r, double t0, double mu, double f0, const ATensorBounds& A, const QValue& q, int a,
                                       int b, int threads = 1) {
  if (!(r > 0.0) || !(t0 > 0.0 && t0 < r * M_PI / 2)) fail(ErrorCode::InvalidInput, "need r > 0 and t0 in (0, r*pi/2)");
  if (!(mu > 0.0)) fail(ErrorCode::InvalidInput, "mu must be positive");
  if (a < 1 || b < 2) fail(ErrorCode::InvalidInput, "need a >= 1 and b >= 2");
  TotGeodResult out;
  out.A = A;
  out.q_eff = effective_q(q, a, b);
  const double lam_lo = std::cos(t0 / r);
  auto gap = [&](double l) { return tot_geod_lambda_gap(l, r, a, b, A); };
  if (!(gap(1.0 - 1e-15) > 0.0)) fail(ErrorCode::NoAdmissibleLambda, "the lambda inequality fails even as lambda -> 1");
  out.lambda_threshold = gap(lam_lo) > 0.0 ? lam_lo : detail::bisect(gap, lam_lo, 1.0 - 1e-15);
  out.lambda = 0.5 * (std::max(out.lambda_threshold, lam_lo) + 1.0);
  const double lam = out.lambda;
  out.t_lambda = r * std::acos(lam);
  const double tl = out.t_lambda, bl = r * std::sin(tl / r);
  // Concave quadratic below t_lambda, C^1 with the collar at t_lambda.
  const double t1p = tl - bl / lam;
  const double kappa = 0.1 * (1.0 - lam) * lam / bl;
  const Profile quad(kinds::Polynomial{{bl, lam, -0.5 * kappa}, tl}, t1p, tl);
  const Profile collar = sin_profile(tl, t0, r, 1.0 / r);
  const double lam_neck = lam + 0.2 * (1.0 - lam);
  out.neck = neck_profiles(NeckParams{out.q_eff, b, lam_neck, 1.0, 1.0});
  const Profile beta_n = rescale(out.neck.beta, mu);
  const Profile gamma_n = stretch(out.neck.gamma, mu);
  const double tn = beta_n.hi(), beta_end = beta_n.jet(tn).v;
  if (beta_end >= quad.jet(tl).v) fail(ErrorCode::SpliceOverflow, "rescaled neck ends above beta(t_lambda); choose a smaller mu");
  if (beta_end <= 0.0 || quad.jet(t1p).v >= beta_end) fail(ErrorCode::SpliceOverflow, "no splice point on the concave part");
  out.t_splice = detail::bisect([&](double t) { return quad.jet(t).v - beta_end; }, t1p, tl);
  const double ts = out.t_splice;
  out.t1 = ts - tn;
  WeightedWarpedSpec s;
  s.a = a;
  s.b = b;
  s.q = q;
  const Profile quad_part = Profile(kinds::Polynomial{{bl, lam, -0.5 * kappa}, tl}, ts, tl);
  s.beta = concat({shift(beta_n, out.t1), quad_part, collar});
  s.alpha = constant_profile(1.0, out.t1, t0);
  const double g_end = gamma_n.jet(tn).v;
  s.f = concat({shift(log_of(gamma_n, -out.q_eff, out.q_eff * std::log(g_end) + f0), out.t1), constant_profile(f0, ts, t0)});
  SmoothCornerOptions opt;
  opt.threads = threads;
  const auto sm = smooth_corner(s, ts, A, opt);
  out.spec = sm.spec;
  out.splice_eps = sm.eps;
  ScanOptions so;
  so.threads = threads;
  out.report = positivity_scan(out.spec, A, std::min(1e-3, (t0 - out.t1) / 2000.0), so);
  return out;
}

// ---------------------------------------------------------------------------
// Collapsing the a-sphere

struct CollapseResult {
  WeightedWarpedSpec spec;
  double t3 = 0.0;
  double t_eps = 0.0;
  double smoothing_eps = 0.0;
  double jump_alpha = 0.0;
  double jump_trace = 0.0;
  CurvatureReport report;
};

/**
 * @brief Spec on [t3, 0] with alpha(t3) = 0, alpha'(t3) = 1, alpha(0) = 1, alpha'(0) = 0, beta = mu,
 * f'(0) = -lambda3 and q = infinity.
 *
 * The concave part is the quadratic 1 - eps t^2 / (2T) with slope in [0, eps]; its constant second
 * derivative keeps Ric(dt, dt) bounded away from zero. Below the point where it reaches eps it is
 * replaced by sin(t - t3), f is frozen there, and the corner is smoothed.
 */
inline CollapseResult collapse_profiles(int a, int b, double lambda3, double mu, double eps, int threads = 1) {
  if (a < 1 || b < 0) fail(ErrorCode::InvalidInput, "need a >= 1 and b >= 0");
  if (!(lambda3 > 0.0) || !(mu > 0.0) || !(eps > 0.0 && eps < 1.0)) fail(ErrorCode::InvalidInput, "need lambda3, mu > 0 and eps in (0,1)");
  if (!((a - 1) * (1.0 - eps * eps) - lambda3 * eps > 0.0))
    fail(ErrorCode::EpsilonTooLarge, "(a-1)(1-eps^2) - lambda3*eps must be positive");
  CollapseResult out;
  // alpha~(t) = 1 - eps t^2 / (2T) reaches eps at t = -T with slope eps.
  const double T = 2.0 * (1.0 - eps) / eps;
  out.t_eps = -T;
  const double te = out.t_eps;
  out.t3 = te - std::asin(eps);
  const double t3 = out.t3;
  out.jump_alpha = std::sqrt(1.0 - eps * eps) - eps;
  out.jump_trace = a * out.jump_alpha / eps - lambda3;
  if (!(out.jump_alpha > 0.0) || !(out.jump_trace > 0.0)) fail(ErrorCode::EpsilonTooLarge, "junction slope jumps are not positive");
  WeightedWarpedSpec s;
  s.a = a;
  s.b = b;
  s.q = QValue::infinity();
  const Profile tilde_p(kinds::Polynomial{{1.0, 0.0, -0.5 * eps / T}, 0.0}, te, 0.0);
  s.alpha = concat({sin_profile(t3, te, 1.0, 1.0, -t3), tilde_p});
  s.beta = constant_profile(mu, t3, 0.0);
  s.f = concat({constant_profile(-lambda3 * te, t3, te), linear_profile(0.0, -lambda3, te, 0.0)});
  SmoothCornerOptions opt;
  opt.threads = threads;
  const auto sm = smooth_corner(s, te, ATensorBounds{}, opt);
  out.spec = sm.spec;
  out.smoothing_eps = sm.eps;
  ScanOptions so;
  so.threads = threads;
  out.report = positivity_scan(out.spec, ATensorBounds{}, 1e-3, so);
  return out;
}

// ---------------------------------------------------------------------------
// The profile h_eps

struct HEpsData {
  double eps = 0.0;
  double nu = 0.0;
  int m = 1;
  /** Point where h1' = 0, the constant value h1(t_eps), and the slope of the linear piece. */
  double t_eps = 0.0;
  double h1_at_t_eps = 0.0;
  double h2_slope = 0.0;
  std::vector<double> corners;
  std::vector<double> corner_eps;
  Profile raw;
  Profile h;
};

/** h2'(6 eps/nu) / sin(6 eps/nu) for the unsmoothed profile. */
inline double h_eps_slope_ratio(double eps, double nu);

namespace detail {

inline HEpsData h_eps_raw(double eps, double nu) {
  HEpsData d;
  d.eps = eps;
  d.nu = nu;
  const double a0 = nu * eps;
  d.t_eps = nu * std::atanh(nu * std::tan(nu * eps)) + nu * eps;
  // h'(3 eps) = 0 needs the constant piece to cover 3 eps.
  if (!std::isfinite(d.t_eps) || !(d.t_eps < 3.0 * eps))
    fail(ErrorCode::EpsilonTooLarge, "t_eps must lie below 3*eps");
  const kinds::HyperbolicMix h1{std::cos(a0), -nu * std::sin(a0), nu, a0};
  const Piece h1p{h1, a0, d.t_eps};
  d.h1_at_t_eps = h1p.jet(d.t_eps).v;
  const double t2 = 3.0 * nu * eps, t3 = 6.0 * eps / nu;
  d.h2_slope = (std::cos(t3) - d.h1_at_t_eps) / (t3 - t2);
  d.corners = {a0, d.t_eps, t2, t3};
  d.raw = concat({cos_profile(0.0, a0), Profile(h1, a0, d.t_eps), constant_profile(d.h1_at_t_eps, d.t_eps, t2),
                  linear_profile(d.h1_at_t_eps - d.h2_slope * t2, d.h2_slope, t2, t3), cos_profile(t3, M_PI / 2)});
  return d;
}

inline WeightedWarpedSpec h_eps_spec(const Profile& h, int m) {
  WeightedWarpedSpec s;
  s.a = m;
  s.b = m;
  s.q = QValue::infinity();
  s.alpha = h;
  s.beta = sin_profile(0.0, M_PI / 2);
  s.f = constant_profile(0.0, 0.0, M_PI / 2);
  return s;
}

}  // namespace detail

inline double h_eps_slope_ratio(double eps, double nu) {
  const auto d = detail::h_eps_raw(eps, nu);
  return d.h2_slope / std::sin(6.0 * eps / nu);
}

/** Which Ricci entries of dt^2 + h^2 ds_m^2 + sin^2 t ds_m^2 certify the smoothing windows of h_eps. */
enum class HEpsCheck {
  /** All entries. */
  Full,
  /** Only m(1 - h''/h), the bound the unlinking deformation relies on. */
  TtOnly,
};

/**
 * @brief Profile on [0, pi/2] equal to cos off (eps, 6 eps), with h'(3 eps) = 0, built from a
 * hyperbolic piece, a constant, a linear piece and cosine, with the four corners smoothed in windows that
 * avoid eps, 3 eps and 6 eps.
 *
 * The first three corners must have nonnegative slope jumps. The last one has a small negative jump
 * when nu is above about 1.032; it is then smoothed in the widest window the gap allows and accepted
 * only if that window certifies.
 */
inline HEpsData h_eps_profile(double eps, double nu, int m = 1, HEpsCheck check = HEpsCheck::Full) {
  if (!(nu > 1.0) || !(std::pow(nu, 4) < 1.5)) fail(ErrorCode::InvalidInput, "nu must satisfy nu > 1 and nu^4 < 3/2");
  if (!(eps > 0.0) || !(6.0 * eps < M_PI / 4)) fail(ErrorCode::InvalidInput, "eps must be positive and small");
  if (m < 1) fail(ErrorCode::InvalidInput, "m must be positive");
  HEpsData d = detail::h_eps_raw(eps, nu);
  d.m = m;
  WeightedWarpedSpec spec = detail::h_eps_spec(d.raw, m);
  std::vector<double> forbidden = {eps, 3.0 * eps, 6.0 * eps};
  for (std::size_t k = 0; k < d.corners.size(); ++k) {
    const double c = d.corners[k];
    const GlueJump j = check_glue_jump(spec, c);
    SmoothCornerOptions opt;
    opt.forbidden = forbidden;
    if (check == HEpsCheck::TtOnly) {
      opt.certify = [](const WeightedWarpedSpec& w, double lo, double hi) {
        ScanOptions so;
        so.window_lo = lo;
        so.window_hi = hi;
        double mn = std::numeric_limits<double>::infinity();
        for (const auto& smp : positivity_scan(w, ATensorBounds{}, (hi - lo) / 400.0, so).samples) mn = std::min(mn, smp.values.rtt);
        return mn;
      };
    }
    if (j.dalpha < -1e-12 || j.dtrace < -1e-12) {
      if (k + 1 != d.corners.size()) fail(ErrorCode::JunctionSignViolation, "negative slope jump in h at t=" + std::to_string(c));
      double gap = 6.0 * eps - c;
      for (double x : forbidden)
        if (x < c) gap = std::min(gap, c - x);
      opt.allow_negative_jumps = true;
      opt.initial_eps = 0.95 * gap;
      opt.max_halvings = 2;
    }
    SmoothCornerResult r;
    try {
      r = smooth_corner(spec, c, ATensorBounds{}, opt);
    } catch (const Error& e) {
      if (opt.allow_negative_jumps && e.code() == ErrorCode::NoAdmissibleEps)
        fail(ErrorCode::JunctionSignViolation, "negative slope jump in h at t=" + std::to_string(c) + " does not certify");
      throw;
    }
    spec = r.spec;
    d.corner_eps.push_back(r.eps);
    forbidden.push_back(c - r.eps);
    forbidden.push_back(c + r.eps);
  }
  d.h = spec.alpha;
  return d;
}

/** Positivity scan of dt^2 + h^2 ds_m^2 + sin^2 t ds_m^2. */
inline CurvatureReport h_eps_certify(const Profile& h, int m, double grid_step = 1e-3, int threads = 1) {
  ScanOptions so;
  so.threads = threads;
  return positivity_scan(detail::h_eps_spec(h, m), ATensorBounds{}, grid_step, so);
}

/** Smallest m(1 - h''/h) over the scan grid and the point where it occurs. */
inline std::pair<double, double> h_eps_min_tt(const CurvatureReport& rep) {
  std::pair<double, double> out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& smp : rep.samples)
    if (smp.values.rtt < out.first) out = {smp.values.rtt, smp.t};
  return out;
}

// ---------------------------------------------------------------------------
// The unlinking deformation

/** Smooth cutoff equal to 1 on (-inf, 0] and 0 on [1, inf): one minus the quintic smoothstep. */
inline Jet unlink_chi(double x) {
  if (x <= 0.0) return {1.0, 0.0, 0.0};
  if (x >= 1.0) return {0.0, 0.0, 0.0};
  const double x2 = x * x, x3 = x2 * x;
  return {1.0 - (10 * x3 - 15 * x2 * x2 + 6 * x3 * x2), -30.0 * x2 * (1 - x) * (1 - x), -60.0 * x * (1 - x) * (1 - 2 * x)};
}

struct UnlinkField {
  int m = 1;
  double eps = 0.0;
  double delta = 0.0;
  /** Extent in s of the modified region: sqrt(delta^2 - (6 eps)^2). */
  double delta_s = 0.0;
  double nu = 0.0;
  HEpsData h_eps;

  /** alpha~(t, s) = chi(s/delta_s) h(t) + (1 - chi(s/delta_s)) cos t, with partials. */
  BiJet alpha_tilde(double t, double s) const {
    const Jet c = unlink_chi(s / delta_s);
    const Jet h = (t >= h_eps.h.lo() && t <= h_eps.h.hi()) ? h_eps.h.jet(t, Side::Right) : Jet{std::cos(t), -std::sin(t), -std::cos(t)};
    const double co = std::cos(t), si = std::sin(t);
    BiJet r;
    r.v = c.v * h.v + (1 - c.v) * co;
    r.t = c.v * h.d1 - (1 - c.v) * si;
    r.tt = c.v * h.d2 - (1 - c.v) * co;
    r.s = c.d1 / delta_s * (h.v - co);
    r.ss = c.d2 / (delta_s * delta_s) * (h.v - co);
    r.ts = c.d1 / delta_s * (h.d1 + si);
    return r;
  }

  /** cot(s) * alpha~_s, continued by its limit at s = 0. */
  double cot_alpha_s(double t, double s) const {
    const double x = s / delta_s;
    if (x >= 1.0) return 0.0;
    const Jet h = h_eps.h.jet(t, Side::Right);
    const double ratio = s == 0.0 ? 1.0 : s / std::tan(s);
    return -30.0 * x * (1 - x) * (1 - x) * ratio / (delta_s * delta_s) * (h.v - std::cos(t));
  }
};

/** The five Ricci entries of dt^2 + cos^2 t ds^2 + alpha~^2 cos^2 s ds_m^2 + cos^2 t sin^2 s ds_{m-1}^2. */
inline TripleRicci unlink_ricci(const UnlinkField& u, double t, double s) {
  const int m = u.m;
  const BiJet A = u.alpha_tilde(t, s);
  const double ta = std::tan(t), ts = std::tan(s), ct2 = std::cos(t) * std::cos(t), cs2 = std::cos(s) * std::cos(s);
  const double at = A.t / A.v, att = A.tt / A.v, as = A.s / A.v, ass = A.ss / A.v, ast = A.ts / A.v;
  const double cot_as = t < u.h_eps.h.hi() ? u.cot_alpha_s(t, s) / A.v : 0.0;
  TripleRicci r;
  r.rtt = m * (1.0 - att);
  r.rts = m / std::cos(t) * (-ast + ts * at - ta * as + ts * ta);
  r.rss = m / ct2 * (1.0 - ass + 2.0 * ts * as) + m * (1.0 + ta * at);
  r.ruu = (-ass + 2.0 * m * ts * as - (m - 1) * as * as - (m - 1) * ts * ts - (m - 1) * cot_as + m) / ct2 - att +
          (m - 1) * (1.0 - A.t * A.t * cs2) / (A.v * A.v * cs2) + m * ta * at;
  r.rvv = m > 1 ? m * (1.0 + (1.0 - cot_as) / ct2 + ta * at) : detail::kNaN;
  return r;
}

inline double unlink_margin(const TripleRicci& r) {
  double m = std::min({r.rtt, r.rss, r.ruu});
  if (!std::isnan(r.rvv)) m = std::min(m, r.rvv);
  return std::min(m, r.rtt * r.rss - r.rts * r.rts);
}

struct UnlinkReport {
  double min_margin = 0.0;
  double argmin_t = 0.0;
  double argmin_s = 0.0;
  std::size_t samples = 0;
  std::size_t window_samples_t = 0;
  std::size_t window_samples_s = 0;
  /** rho used in the bound -alpha~_tt/alpha~ >= -1 + rho/(2m), and whether it held at every sample. */
  double rho = 0.0;
  bool tt_bound_holds = false;
  bool pass = false;
  /** Second fundamental form components of S_{3 eps} at (3 eps, 0). */
  double II_t = 0.0;
  double II_s = 0.0;
};

inline UnlinkField make_unlink_field(int m, double eps, double delta, double nu) {
  if (!(delta > 6.0 * eps)) fail(ErrorCode::InvalidInput, "delta must exceed 6*eps");
  UnlinkField u;
  u.m = m;
  u.eps = eps;
  u.delta = delta;
  u.delta_s = std::sqrt(delta * delta - 36.0 * eps * eps);
  u.nu = nu;
  u.h_eps = h_eps_profile(eps, nu, m, HEpsCheck::TtOnly);
  return u;
}

/**
 * @brief Evaluates the Ricci entries of the unlinking deformation on a (t, s) grid over
 * [0, pi/2 - 0.05]^2 refined so that the modified window gets at least 200 x 200 samples.
 */
inline UnlinkReport unlink_certify(const UnlinkField& u, double rho, int threads = 1) {
  const double top = M_PI / 2 - 0.05;
  auto grid = [&](double lo, double hi, double coarse, int fine) {
    std::vector<double> g;
    for (double x = 0.0; x <= top + 1e-15; x += coarse) g.push_back(x);
    for (int i = 0; i <= fine; ++i) g.push_back(lo + (hi - lo) * i / fine);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  };
  std::vector<double> ts = grid(u.eps, 6.0 * u.eps, 0.01, 220);
  const std::vector<double> ss = grid(0.0, u.delta_s, 0.01, 220);
  // The smoothing windows of h can be far narrower than the window grid.
  for (std::size_t k = 0; k < u.h_eps.corner_eps.size(); ++k)
    for (int i = 0; i <= 40; ++i) ts.push_back(u.h_eps.corners[k] + u.h_eps.corner_eps[k] * (i / 20.0 - 1.0));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  UnlinkReport rep;
  for (double t : ts) rep.window_samples_t += (t > u.eps && t < 6.0 * u.eps);
  for (double s : ss) rep.window_samples_s += (s > 0.0 && s < u.delta_s);
  rep.rho = std::min(rho, 0.99 * u.m);
  const double tt_floor = -1.0 + rep.rho / (2.0 * u.m);
  struct Worst {
    double m = std::numeric_limits<double>::infinity(), t = 0, s = 0;
    bool tt_ok = true;
  };
  std::vector<Worst> worst(std::max(1, threads));
  auto work = [&](int k) {
    Worst w;
    for (std::size_t i = k; i < ts.size(); i += worst.size()) {
      for (double s : ss) {
        const double t = ts[i];
        const TripleRicci r = unlink_ricci(u, t, s);
        double mg = unlink_margin(r);
        if (std::isnan(mg)) mg = -std::numeric_limits<double>::infinity();
        if (mg < w.m) w = {mg, t, s, w.tt_ok};
        const BiJet A = u.alpha_tilde(t, s);
        if (-A.tt / A.v < tt_floor - 1e-12) w.tt_ok = false;
      }
    }
    worst[k] = w;
  };
  if (worst.size() == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < worst.size(); ++k) pool.emplace_back(work, static_cast<int>(k));
    for (auto& th : pool) th.join();
  }
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.tt_bound_holds = true;
  for (const auto& w : worst) {
    // Ties resolve to the first worker so the report does not depend on the thread count.
    if (w.m < rep.min_margin || (w.m == rep.min_margin && w.t < rep.argmin_t)) {
      rep.min_margin = w.m;
      rep.argmin_t = w.t;
      rep.argmin_s = w.s;
    }
    rep.tt_bound_holds = rep.tt_bound_holds && w.tt_ok;
  }
  rep.samples = ts.size() * ss.size();
  rep.pass = rep.min_margin > 0.0;
  const BiJet A0 = u.alpha_tilde(3.0 * u.eps, 0.0);
  rep.II_t = A0.t / A0.v;
  rep.II_s = A0.s / A0.v;
  return rep;
}

struct UnlinkResult {
  UnlinkField field;
  UnlinkReport report;
  CurvatureReport h_report;
  int halvings = 0;
};

/** Builds the deformation for eps and certifies it; fails with PositivityFail naming the worst point. */
inline UnlinkResult unlink_field(int m, double eps, double delta, double nu, int threads = 1) {
  UnlinkResult out;
  out.field = make_unlink_field(m, eps, delta, nu);
  out.h_report = h_eps_certify(out.field.h_eps.h, m, 1e-3, threads);
  const auto [rho, rho_at] = h_eps_min_tt(out.h_report);
  if (!(rho > 0.0)) fail(ErrorCode::PositivityFail, "m(1 - h''/h) is not positive at t=" + std::to_string(rho_at));
  out.report = unlink_certify(out.field, rho, threads);
  if (!out.report.pass) {
    std::ostringstream msg;
    msg << "unlink field margin " << out.report.min_margin << " at (t, s) = (" << out.report.argmin_t << ", " << out.report.argmin_s << ")";
    fail(ErrorCode::PositivityFail, msg.str());
  }
  return out;
}

/** Halves eps from eps_start until the unlinking deformation certifies. */
inline UnlinkResult find_unlink_eps(int m, double delta, double nu, double eps_start = 0.05, int max_halvings = 12, int threads = 1) {
  double eps = eps_start;
  for (int k = 0; k <= max_halvings; ++k, eps *= 0.5) {
    try {
      if (!(delta > 6.0 * eps)) continue;
      UnlinkResult r = unlink_field(m, eps, delta, nu, threads);
      r.halvings = k;
      return r;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PositivityFail && e.code() != ErrorCode::NoAdmissibleEps && e.code() != ErrorCode::EpsilonTooLarge &&
          e.code() != ErrorCode::JunctionSignViolation)
        throw;
    }
  }
  fail(ErrorCode::NoAdmissibleEps, "no eps certified for the unlinking deformation");
}

// ---------------------------------------------------------------------------
// Ramp for the isotopy cylinder

/**
 * @brief Ramp chi_a on [0, 3/a] from 0 to 1 with zero end slopes and |chi'|, |chi''| <= a.
 *
 * The C^1 four-piece ramp (quadratic, linear, quadratic, constant) is made C^2 by quintic Hermite
 * blends in windows of width a/10 at its three interior corners.
 */
inline Profile chi_ramp(double a) {
  if (!(a > 0.0 && a < 1.0)) fail(ErrorCode::InvalidInput, "a must lie in (0, 1)");
  const double t1 = 1.0, t2 = 2.0 / a, t3 = (2.0 + a) / a, t4 = 3.0 / a;
  const std::vector<Piece> raw{
      {kinds::Polynomial{{0.0, 0.0, a / 4}, 0.0}, 0.0, t1},
      {kinds::Polynomial{{a / 4, a / 2}, t1}, t1, t2},
      {kinds::Polynomial{{1.0 - a / 4, a / 2, -a / 4}, t2}, t2, t3},
      {kinds::Polynomial{{1.0}, t3}, t3, t4},
  };
  const double w = a / 20.0;
  std::vector<Piece> out;
  double lo = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i + 1 == raw.size()) {
      out.push_back({raw[i].fn, lo, t4});
      break;
    }
    // The last window lies left of the corner; a centred one would overshoot 1.
    const double c = raw[i].hi;
    const bool last = i + 2 == raw.size();
    const double wl = last ? c - 2.0 * w : c - w, wr = last ? c : c + w;
    out.push_back({raw[i].fn, lo, wl});
    out.push_back({quintic_hermite(wl, raw[i].jet(wl), wr, raw[i + 1].jet(wr)), wl, wr});
    lo = wr;
  }
  return Profile(std::move(out));
}

struct IsotopyParams {
  double a = 0.0;
  int k = 0;
  /** Constant C' in Ric_vv >= c - C' a, and its four contributions. */
  double C_prime = 0.0;
  std::vector<double> C_prime_terms;
  /** Lower bounds at the returned a: Ric_tt, |mixed| upper bound, Ric_vv. */
  double ric_tt = 0.0;
  double mixed = 0.0;
  double ric_vv = 0.0;
  /** f(t) = C a t^2 + (lambda - 6C) t on [0, 3/a], so f'(t) = 2 C a (t - 3/a) + lambda and f(0) = 0. */
  Profile f;
};

/**
 * @brief Largest a = 2^-k with C a (c - C' a) > ((n+1) a C / 2)^2 and Ric_tt > C a.
 *
 * For a in (0,1) each negative term of the Ric_vv estimate is bounded by a multiple of a:
 * C(a^2+a)/2 <= C a, n C^2 a^2/2 <= n C^2 a/2, C^2 a^2/4 <= C^2 a/4 and C a (6C + lambda)/2 <= C(6C+|lambda|) a/2.
 */
inline IsotopyParams isotopy_params(double c, double C, int n, double lambda) {
  if (!(c > 0.0) || !(C > 0.0) || n < 1) fail(ErrorCode::InvalidInput, "need c, C > 0 and n >= 1");
  IsotopyParams p;
  p.C_prime_terms = {C, 0.5 * n * C * C, 0.25 * C * C, 0.5 * C * (6.0 * C + std::abs(lambda))};
  p.C_prime = 0.0;
  for (double x : p.C_prime_terms) p.C_prime += x;
  for (int k = 1; k <= 60; ++k) {
    const double a = std::ldexp(1.0, -k);
    const double tt = -0.5 * C * (a * a + a) + 2.0 * C * a;
    const double mixed = 0.5 * (n + 1) * a * C;
    const double vv = c - p.C_prime * a;
    if (tt > C * a && vv > 0.0 && C * a * vv > mixed * mixed) {
      p.a = a;
      p.k = k;
      p.ric_tt = tt;
      p.mixed = mixed;
      p.ric_vv = vv;
      p.f = Profile(kinds::Polynomial{{0.0, lambda - 6.0 * C, C * a}, 0.0}, 0.0, 3.0 / a);
      return p;
    }
  }
  fail(ErrorCode::NoAdmissibleA, "no dyadic a = 2^-k with k <= 60 satisfies the estimates");
}

}  // namespace ricci_forge
