#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ricci_forge/error.hpp"
#include "ricci_forge/profile.hpp"

namespace ricci_forge {

/** Weight parameter q in (0, inf]. Infinity is a sentinel whose inverse is exactly zero. */
class QValue {
 public:
  QValue() = default;
  explicit QValue(double q) : q_(q), inf_(false) {
    if (!(q > 0.0) || std::isinf(q)) fail(ErrorCode::InvalidInput, "q must be a finite positive number (use QValue::infinity())");
  }
  static QValue infinity() {
    QValue v;
    v.inf_ = true;
    return v;
  }
  bool is_infinite() const { return inf_; }
  double value() const { return inf_ ? std::numeric_limits<double>::infinity() : q_; }
  double inverse() const { return inf_ ? 0.0 : 1.0 / q_; }

  friend bool operator==(const QValue& x, const QValue& y) { return x.inf_ == y.inf_ && (x.inf_ || x.q_ == y.q_); }

 private:
  double q_ = 1.0;
  bool inf_ = true;
};

/**
 * @brief Weighted doubly warped cylinder dt^2 + alpha^2 ds_a^2 + beta^2 ds_b^2 with measure e^{-f}.
 *
 * Fiber dimensions may be zero, which drops the corresponding factor. Single-sphere
 * constructions use that to reuse the same evaluators.
 */
struct WeightedWarpedSpec {
  int a = 1;
  int b = 1;
  Profile alpha;
  Profile beta;
  Profile f;
  QValue q = QValue::infinity();

  double lo() const { return alpha.lo(); }
  double hi() const { return alpha.hi(); }

  void validate() const {
    if (a < 0 || b < 0) fail(ErrorCode::InvalidInput, "fiber dimensions must be nonnegative");
    const double tol = 1e-12 * std::max({1.0, std::abs(alpha.lo()), std::abs(alpha.hi())});
    for (const Profile* p : {&beta, &f})
      if (std::abs(p->lo() - alpha.lo()) > tol || std::abs(p->hi() - alpha.hi()) > tol)
        fail(ErrorCode::DomainMismatch, "alpha, beta and f must share one domain");
  }
};

/** Pointwise curvature-relevant scalars of the A-tensor, taken as worst-case constants. */
struct ATensorBounds {
  double AuAu = 0.0;
  double AvAv = 0.0;
  double deltaA = 0.0;

  bool zero() const { return AuAu == 0.0 && AvAv == 0.0 && deltaA == 0.0; }
};

/** Weighted Ricci components in the orthonormal frame (dt, u/alpha, v/beta). Absent fibers give NaN. */
struct RicciValues {
  double rtt = 0.0;
  double ruu = 0.0;
  double rvv = 0.0;
  double ruv = 0.0;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SpecJets {
  Jet alpha, beta, f;
};

inline SpecJets spec_jets(const WeightedWarpedSpec& s, double t, Side side) {
  try {
    return {s.alpha.jet(t, side), s.beta.jet(t, side), s.f.jet(t, side)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AmbiguousAtBreakpoint) fail(ErrorCode::NonSmoothPoint, e.what());
    throw;
  }
}

inline RicciValues doubly_warped_from_jets(int a, int b, double qinv, const SpecJets& j, const ATensorBounds* A) {
  const double al = j.alpha.v, al1 = j.alpha.d1, al2 = j.alpha.d2;
  const double be = j.beta.v, be1 = j.beta.d1, be2 = j.beta.d2;
  const double f1 = j.f.d1, f2 = j.f.d2;
  RicciValues r;
  r.rtt = -a * al2 / al - b * be2 / be + f2 - qinv * f1 * f1;
  r.ruu = a > 0 ? -al2 / al + (a - 1) * (1.0 - al1 * al1) / (al * al) - b * al1 * be1 / (al * be) + f1 * al1 / al : kNaN;
  r.rvv = b > 0 ? -be2 / be + (b - 1) * (1.0 - be1 * be1) / (be * be) - a * al1 * be1 / (al * be) + f1 * be1 / be : kNaN;
  r.ruv = 0.0;
  if (A) {
    const double al4 = al * al * al * al;
    if (a > 0) r.ruu -= 2.0 * (be * be / al4) * A->AuAu;
    if (b > 0) r.rvv += (be * be / al4) * A->AvAv;
    r.ruv = (a > 0 && b > 0) ? -(be / (al * al * al)) * A->deltaA : 0.0;
  }
  return r;
}

}  // namespace detail

/** Weighted Ricci tensor of a doubly warped product with weight depending on t only. */
inline RicciValues weighted_ricci_doubly_warped(const WeightedWarpedSpec& spec, double t, Side side = Side::Auto) {
  return detail::doubly_warped_from_jets(spec.a, spec.b, spec.q.inverse(), detail::spec_jets(spec, t, side), nullptr);
}

/** As weighted_ricci_doubly_warped, with the A-tensor terms of a submersion metric added. */
inline RicciValues weighted_ricci_submersion(const WeightedWarpedSpec& spec, double t, const ATensorBounds& A,
                                             Side side = Side::Auto) {
  if (A.AuAu < 0.0 || A.AvAv < 0.0) fail(ErrorCode::InvalidInput, "A-tensor norms must be nonnegative");
  return detail::doubly_warped_from_jets(spec.a, spec.b, spec.q.inverse(), detail::spec_jets(spec, t, side), &A);
}

// ---------------------------------------------------------------------------
// Triply warped metric dt^2 + gamma(t)^2 ds^2 + alpha(t,s)^2 ds_a^2 + beta(t,s)^2 ds_b^2

/** Value and partial derivatives up to order 2 of a function of (t, s). */
struct BiJet {
  double v = 0.0;
  double t = 0.0;
  double s = 0.0;
  double tt = 0.0;
  double ts = 0.0;
  double ss = 0.0;
};

using Bivariate = std::function<BiJet(double, double)>;

struct TripleRicci {
  double rtt = 0.0;
  double rts = 0.0;
  double rss = 0.0;
  double ruu = 0.0;
  double rvv = 0.0;
};

inline TripleRicci ricci_triple_warped_jets(const BiJet& A, const BiJet& B, const Jet& G, int a, int b) {
  const double g = G.v, g1 = G.d1, g2 = G.d2;
  TripleRicci r;
  const double ta = a > 0 ? A.tt / A.v : 0.0, tb = b > 0 ? B.tt / B.v : 0.0;
  r.rtt = -a * ta - b * tb - g2 / g;
  const double ats = a > 0 ? -A.ts / A.v + A.s * g1 / (A.v * g) : 0.0;
  const double bts = b > 0 ? -B.ts / B.v + B.s * g1 / (B.v * g) : 0.0;
  r.rts = (a * ats + b * bts) / g;
  const double ass = a > 0 ? A.ss / A.v : 0.0, bss = b > 0 ? B.ss / B.v : 0.0;
  const double at = a > 0 ? A.t * g1 / (A.v * g) : 0.0, bt = b > 0 ? B.t * g1 / (B.v * g) : 0.0;
  r.rss = (-a * ass - b * bss) / (g * g) - g2 / g - a * at - b * bt;
  if (a > 0) {
    const double cross_s = b > 0 ? b * A.s * B.s / (A.v * B.v) : 0.0;
    const double cross_t = b > 0 ? b * A.t * B.t / (A.v * B.v) : 0.0;
    r.ruu = (-A.ss / A.v - (a - 1) * A.s * A.s / (A.v * A.v) - cross_s) / (g * g) - A.tt / A.v +
            (a - 1) * (1.0 - A.t * A.t) / (A.v * A.v) - cross_t - A.t * g1 / (A.v * g);
  } else {
    r.ruu = detail::kNaN;
  }
  if (b > 0) {
    const double cross_s = a > 0 ? a * A.s * B.s / (A.v * B.v) : 0.0;
    const double cross_t = a > 0 ? a * A.t * B.t / (A.v * B.v) : 0.0;
    r.rvv = (-B.ss / B.v - (b - 1) * B.s * B.s / (B.v * B.v) - cross_s) / (g * g) - B.tt / B.v +
            (b - 1) * (1.0 - B.t * B.t) / (B.v * B.v) - cross_t - B.t * g1 / (B.v * g);
  } else {
    r.rvv = detail::kNaN;
  }
  return r;
}

inline TripleRicci ricci_triple_warped(const Bivariate& alpha, const Bivariate& beta, const Profile& gamma, double t,
                                       double s, int a, int b) {
  Jet G;
  try {
    G = gamma.jet(t);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AmbiguousAtBreakpoint) fail(ErrorCode::NonSmoothPoint, e.what());
    throw;
  }
  return ricci_triple_warped_jets(alpha(t, s), beta(t, s), G, a, b);
}

// ---------------------------------------------------------------------------
// General cylinder metric dt^2 + g_t

/** Weight data for the general cylinder formula. Fiber parts default to zero (weight depends on t only). */
struct CylinderWeight {
  std::function<double(double)> f;
  std::function<Eigen::VectorXd(double)> fiber_gradient;    ///< df_t on the frame
  std::function<Eigen::VectorXd(double)> fiber_grad_dt;     ///< u(f_t') on the frame
  std::function<Eigen::MatrixXd(double)> fiber_hessian;     ///< Hess^{g_t}(f_t) on the frame
};

struct CylinderRicci {
  Eigen::MatrixXd coordinate;   ///< components on (dt, frame vectors)
  Eigen::MatrixXd orthonormal;  ///< components on a Cholesky-orthonormalized frame
};

/**
 * @brief Weighted Ricci tensor of dt^2 + g_t from the slice metric family and its intrinsic Ricci tensor.
 *
 * t-derivatives of g_t and f are central differences with the given step, Richardson-extrapolated
 * over (step, step/2). mixed_term supplies Ric(v, dt) when the family is not diagonal; default zero.
 */
inline CylinderRicci cylinder_ricci_general(const std::function<Eigen::MatrixXd(double)>& gt,
                                            const std::function<Eigen::MatrixXd(double)>& fiber_ricci,
                                            const CylinderWeight& weight, double t, QValue q, double step = 1e-3,
                                            const std::function<Eigen::VectorXd(double)>& mixed_term = {}) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidInput, "step must be positive");
  const Eigen::MatrixXd g = gt(t);
  const Eigen::Index m = g.rows();
  if (g.cols() != m) fail(ErrorCode::InvalidInput, "g_t must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (m > 0 && !(es.eigenvalues().minCoeff() > 1e-10)) fail(ErrorCode::SingularMetric, "g_t is not positive definite");

  auto d1 = [&](auto&& fn, double h) { return ((fn(t + h) - fn(t - h)) / (2.0 * h)).eval(); };
  auto d2 = [&](auto&& fn, double h) { return ((fn(t + h) - 2.0 * fn(t) + fn(t - h)) / (h * h)).eval(); };
  auto rich = [](const auto& coarse, const auto& fine) { return ((4.0 * fine - coarse) / 3.0).eval(); };

  const Eigen::MatrixXd g1 = rich(d1(gt, step), d1(gt, step / 2));
  const Eigen::MatrixXd g2 = rich(d2(gt, step), d2(gt, step / 2));
  auto fvec = [&](double x) { return Eigen::Matrix<double, 1, 1>(weight.f ? weight.f(x) : 0.0); };
  const double f1 = rich(d1(fvec, step), d1(fvec, step / 2))(0);
  const double f2 = rich(d2(fvec, step), d2(fvec, step / 2))(0);

  const Eigen::MatrixXd ginv = g.inverse();
  const double tr1 = (ginv * g1).trace();
  const double tr2 = (ginv * g2).trace();
  const double norm1 = (ginv * g1 * ginv * g1).trace();

  const double qinv = q.inverse();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m + 1, m + 1);
  R(0, 0) = -0.5 * tr2 + 0.25 * norm1 + f2 - qinv * f1 * f1;
  Eigen::MatrixXd fib = fiber_ricci(t) - 0.5 * g2 + 0.5 * g1 * ginv * g1 - 0.25 * tr1 * g1 + 0.5 * f1 * g1;
  const Eigen::VectorXd df = weight.fiber_gradient ? weight.fiber_gradient(t) : Eigen::VectorXd::Zero(m);
  if (weight.fiber_hessian) fib += weight.fiber_hessian(t);
  fib -= qinv * df * df.transpose();
  R.bottomRightCorner(m, m) = fib;
  Eigen::VectorXd mixed = mixed_term ? mixed_term(t) : Eigen::VectorXd::Zero(m);
  if (weight.fiber_grad_dt) mixed += 0.5 * weight.fiber_grad_dt(t);
  mixed -= qinv * f1 * df;
  R.block(1, 0, m, 1) = mixed;
  R.block(0, 1, 1, m) = mixed.transpose();

  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(m + 1, m + 1);
  G.bottomRightCorner(m, m) = g;
  const Eigen::MatrixXd L = G.llt().matrixL();
  const Eigen::MatrixXd Linv = L.inverse();
  return {R, Linv * R * Linv.transpose()};
}

// ---------------------------------------------------------------------------
// Boundary quantities

struct BoundaryQuantities {
  double II_u = 0.0;
  double II_v = 0.0;
  double H = 0.0;
  double Hf = 0.0;
};

/** Principal curvatures, mean curvature and weighted mean curvature of the slice at t. outward is +1 or -1. */
inline BoundaryQuantities boundary_quantities(const WeightedWarpedSpec& spec, double t, Side side, int outward) {
  if (outward != 1 && outward != -1) fail(ErrorCode::InvalidInput, "outward must be +1 or -1");
  const Jet al = spec.alpha.jet(t, side), be = spec.beta.jet(t, side), f = spec.f.jet(t, side);
  BoundaryQuantities r;
  r.II_u = spec.a > 0 ? outward * al.d1 / al.v : 0.0;
  r.II_v = spec.b > 0 ? outward * be.d1 / be.v : 0.0;
  r.H = spec.a * r.II_u + spec.b * r.II_v;
  r.Hf = r.H - outward * f.d1;
  return r;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle in stereographic coordinates

namespace detail {

/** Metric dt^2 + alpha^2 * sph(x) + beta^2 * sph(y) at (t, x, y), sph = 4(1+|x|^2)^-2 delta. */
inline Eigen::MatrixXd chart_metric(const WeightedWarpedSpec& s, const Eigen::VectorXd& p) {
  const int n = 1 + s.a + s.b;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  g(0, 0) = 1.0;
  const double t = p(0);
  const double al = s.a > 0 ? s.alpha.jet(t).v : 0.0;
  const double be = s.b > 0 ? s.beta.jet(t).v : 0.0;
  const double rx = s.a > 0 ? p.segment(1, s.a).squaredNorm() : 0.0;
  const double ry = s.b > 0 ? p.segment(1 + s.a, s.b).squaredNorm() : 0.0;
  const double cx = al * al * 4.0 / ((1.0 + rx) * (1.0 + rx));
  const double cy = be * be * 4.0 / ((1.0 + ry) * (1.0 + ry));
  for (int i = 1; i <= s.a; ++i) g(i, i) = cx;
  for (int i = 1 + s.a; i < n; ++i) g(i, i) = cy;
  return g;
}

struct ChartDerivatives {
  std::vector<Eigen::MatrixXd> dg;                // dg[k] = d_k g
  std::vector<std::vector<Eigen::MatrixXd>> ddg;  // ddg[k][l] = d_k d_l g
  double df = 0.0;                                // d_t f
  double ddf = 0.0;                               // d_t d_t f
};

inline ChartDerivatives chart_derivatives(const WeightedWarpedSpec& s, double t, double h) {
  const int n = 1 + s.a + s.b;
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
  p0(0) = t;
  auto G = [&](const Eigen::VectorXd& p) { return chart_metric(s, p); };
  auto e = [&](int k) { Eigen::VectorXd v = Eigen::VectorXd::Zero(n); v(k) = 1.0; return v; };
  ChartDerivatives d;
  d.dg.assign(n, Eigen::MatrixXd::Zero(n, n));
  d.ddg.assign(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  const Eigen::MatrixXd g0 = G(p0);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd ek = e(k);
    d.dg[k] = (G(p0 + h * ek) - G(p0 - h * ek)) / (2.0 * h);
    d.ddg[k][k] = (G(p0 + h * ek) - 2.0 * g0 + G(p0 - h * ek)) / (h * h);
    for (int l = 0; l < k; ++l) {
      const Eigen::VectorXd el = e(l);
      d.ddg[k][l] = (G(p0 + h * ek + h * el) - G(p0 + h * ek - h * el) - G(p0 - h * ek + h * el) + G(p0 - h * ek - h * el)) /
                    (4.0 * h * h);
      d.ddg[l][k] = d.ddg[k][l];
    }
  }
  const double fp = s.f.jet(t + h).v, fm = s.f.jet(t - h).v, f0 = s.f.jet(t).v;
  d.df = (fp - fm) / (2.0 * h);
  d.ddf = (fp - 2.0 * f0 + fm) / (h * h);
  return d;
}

inline ChartDerivatives richardson(const ChartDerivatives& c, const ChartDerivatives& f) {
  ChartDerivatives r = f;
  const std::size_t n = c.dg.size();
  for (std::size_t k = 0; k < n; ++k) {
    r.dg[k] = (4.0 * f.dg[k] - c.dg[k]) / 3.0;
    for (std::size_t l = 0; l < n; ++l) r.ddg[k][l] = (4.0 * f.ddg[k][l] - c.ddg[k][l]) / 3.0;
  }
  r.df = (4.0 * f.df - c.df) / 3.0;
  r.ddf = (4.0 * f.ddf - c.ddf) / 3.0;
  return r;
}

}  // namespace detail

/**
 * @brief Weighted Ricci tensor computed from scratch in a coordinate chart, for cross-checking.
 *
 * Metric derivatives are second-order central differences with step h, combined by Richardson
 * extrapolation over (h, h/2). Christoffel symbols and their derivatives are assembled from those,
 * then Ric + Hess f - (1/q) df (x) df is read off in the orthonormal frame at the chart origin.
 */
inline RicciValues finite_difference_oracle(const WeightedWarpedSpec& spec, double t, double h = 1e-3) {
  if (!(h > 0.0)) fail(ErrorCode::InvalidInput, "step must be positive");
  double dist = std::min(t - spec.lo(), spec.hi() - t);
  for (const Profile* p : {&spec.alpha, &spec.beta, &spec.f})
    for (double bp : p->breakpoints()) dist = std::min(dist, std::abs(t - bp));
  if (h > dist / 10.0) fail(ErrorCode::StepTooLarge, "oracle step exceeds a tenth of the distance to the nearest breakpoint or end");

  const int n = 1 + spec.a + spec.b;
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n);
  p0(0) = t;
  const Eigen::MatrixXd g = detail::chart_metric(spec, p0);
  const Eigen::MatrixXd gi = g.inverse();
  const auto D = detail::richardson(detail::chart_derivatives(spec, t, h), detail::chart_derivatives(spec, t, h / 2));

  // Gamma[i](j,k) = Gamma^i_jk ; dGamma[m][i](j,k) = d_m Gamma^i_jk
  std::vector<Eigen::MatrixXd> Gam(n, Eigen::MatrixXd::Zero(n, n));
  std::vector<std::vector<Eigen::MatrixXd>> dGam(n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
  std::vector<Eigen::MatrixXd> dgi(n);
  for (int m = 0; m < n; ++m) dgi[m] = -gi * D.dg[m] * gi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += 0.5 * gi(i, l) * (D.dg[j](l, k) + D.dg[k](l, j) - D.dg[l](j, k));
        Gam[i](j, k) = s;
        for (int m = 0; m < n; ++m) {
          double ds = 0.0;
          for (int l = 0; l < n; ++l) {
            ds += 0.5 * dgi[m](i, l) * (D.dg[j](l, k) + D.dg[k](l, j) - D.dg[l](j, k));
            ds += 0.5 * gi(i, l) * (D.ddg[m][j](l, k) + D.ddg[m][k](l, j) - D.ddg[m][l](j, k));
          }
          dGam[m][i](j, k) = ds;
        }
      }
  Eigen::MatrixXd Ric = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += dGam[i][i](j, k) - dGam[k][i](j, i);
        for (int p = 0; p < n; ++p) s += Gam[i](i, p) * Gam[p](j, k) - Gam[i](k, p) * Gam[p](j, i);
      }
      Ric(j, k) = s;
    }
  // f depends on t only: df = (df, 0, ..., 0).
  Eigen::MatrixXd W = Ric;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) W(j, k) -= Gam[0](j, k) * D.df;
  W(0, 0) += D.ddf - spec.q.inverse() * D.df * D.df;

  RicciValues r;
  r.rtt = W(0, 0);
  r.ruu = spec.a > 0 ? W(1, 1) / g(1, 1) : detail::kNaN;
  r.rvv = spec.b > 0 ? W(1 + spec.a, 1 + spec.a) / g(1 + spec.a, 1 + spec.a) : detail::kNaN;
  r.ruv = (spec.a > 0 && spec.b > 0) ? W(1, 1 + spec.a) / std::sqrt(g(1, 1) * g(1 + spec.a, 1 + spec.a)) : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Positivity scan

struct CurvatureSample {
  double t = 0.0;
  Side side = Side::Auto;
  RicciValues values;
  double margin = 0.0;
};

struct CurvatureReport {
  std::vector<CurvatureSample> samples;
  double min_margin = 0.0;
  double argmin_t = 0.0;
  bool pass = false;
  std::string criterion = "diagonal";
};

struct ScanOptions {
  int threads = 1;
  /** Minimum number of sample intervals inside every piece of every profile. */
  int min_per_piece = 16;
  /**
   * When positive, the local step is grid_step * max(1, |t| / relative_scale). Used for self-similar
   * profiles that span many decades in t.
   */
  double relative_scale = 0.0;
  /** Restrict the scan to [window_lo, window_hi] when window_lo < window_hi. */
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool keep_samples = true;
};

/** Positivity margin: smallest diagonal entry, plus the 2x2 determinant when the mixed term is nonzero. */
inline double positivity_margin(const RicciValues& r) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : {r.rtt, r.ruu, r.rvv})
    if (!std::isnan(v)) m = std::min(m, v);
  if (r.ruv != 0.0 && !std::isnan(r.ruv) && !std::isnan(r.ruu) && !std::isnan(r.rvv)) m = std::min(m, r.ruu * r.rvv - r.ruv * r.ruv);
  return m;
}

namespace detail {

struct SamplePoint {
  double t;
  Side side;
};

inline std::vector<double> union_breakpoints(const WeightedWarpedSpec& s) {
  std::vector<double> b;
  for (const Profile* p : {&s.alpha, &s.beta, &s.f}) {
    const auto pb = p->breakpoints();
    b.insert(b.end(), pb.begin(), pb.end());
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

inline bool collapsed_at(const WeightedWarpedSpec& s, double t, Side side) {
  const double al = s.a > 0 ? s.alpha.jet(t, side).v : 1.0;
  const double be = s.b > 0 ? s.beta.jet(t, side).v : 1.0;
  return std::abs(al) < 1e-12 || std::abs(be) < 1e-12;
}

inline std::vector<SamplePoint> scan_points(const WeightedWarpedSpec& s, double grid_step, const ScanOptions& o) {
  double lo = s.lo(), hi = s.hi();
  if (o.window_lo < o.window_hi) {
    lo = std::max(lo, o.window_lo);
    hi = std::min(hi, o.window_hi);
  }
  std::vector<double> knots{lo};
  for (double b : union_breakpoints(s))
    if (b > lo && b < hi) knots.push_back(b);
  knots.push_back(hi);
  std::vector<SamplePoint> pts;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    double ta = a, tb = b;
    // Collapsed ends are sampled slightly inside.
    const double inset = 1e-3 * std::min(b - a, grid_step);
    if (i == 0 && collapsed_at(s, a, Side::Right)) ta = a + inset;
    if (i + 2 == knots.size() && collapsed_at(s, b, Side::Left)) tb = b - inset;
    pts.push_back({ta, ta == a ? Side::Right : Side::Auto});
    // March with the local step, at least min_per_piece intervals.
    double t = ta;
    const double min_h = (tb - ta) / o.min_per_piece;
    std::vector<double> inner;
    while (true) {
      double h = grid_step;
      if (o.relative_scale > 0.0) h *= std::max(1.0, std::abs(t) / o.relative_scale);
      h = std::min(h, min_h);
      if (t + h == t) fail(ErrorCode::InvalidInput, "scan step underflows at t=" + std::to_string(t));
      t += h;
      if (t >= tb - 1e-3 * h) break;
      inner.push_back(t);
    }
    for (double x : inner) pts.push_back({x, Side::Auto});
    pts.push_back({tb, tb == b ? Side::Left : Side::Auto});
  }
  return pts;
}

}  // namespace detail

/**
 * @brief Samples the weighted Ricci tensor over the spec domain and reports the worst margin.
 *
 * Every breakpoint is sampled from both sides. A breakpoint in the scanned range where some profile
 * is not C^1 raises NonSmoothPoint. Results do not depend on the thread count.
 */
inline CurvatureReport positivity_scan(const WeightedWarpedSpec& spec, const ATensorBounds& A, double grid_step,
                                       const ScanOptions& opt = {}) {
  if (!(grid_step > 0.0)) fail(ErrorCode::InvalidInput, "grid_step must be positive");
  spec.validate();
  const bool windowed = opt.window_lo < opt.window_hi;
  for (const Profile* p : {&spec.alpha, &spec.beta, &spec.f}) {
    const auto bp = p->breakpoints();
    for (std::size_t i = 0; i < bp.size(); ++i)
      if (windowed && (bp[i] < opt.window_lo || bp[i] > opt.window_hi)) continue;
      else if (p->continuity()[i] < 1) fail(ErrorCode::NonSmoothPoint, "profile is not C^1 at t=" + std::to_string(bp[i]));
  }
  const auto pts = detail::scan_points(spec, grid_step, opt);
  std::vector<CurvatureSample> samples(pts.size());
  const double qinv = spec.q.inverse();
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& p = pts[i];
      const auto j = detail::spec_jets(spec, p.t, p.side);
      const RicciValues r = detail::doubly_warped_from_jets(spec.a, spec.b, qinv, j, &A);
      samples[i] = {p.t, p.side, r, positivity_margin(r)};
    }
  };
  const int nt = std::max(1, opt.threads);
  if (nt == 1 || pts.size() < 1024) {
    work(0, pts.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (pts.size() + nt - 1) / nt;
    for (int k = 0; k < nt; ++k) {
      const std::size_t b = k * chunk, e = std::min(pts.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  CurvatureReport rep;
  rep.criterion = A.deltaA != 0.0 ? "diagonal+determinant" : "diagonal";
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    // NaN margins count as failures.
    const double m = std::isnan(s.margin) ? -std::numeric_limits<double>::infinity() : s.margin;
    if (m < rep.min_margin) {
      rep.min_margin = m;
      rep.argmin_t = s.t;
    }
  }
  rep.pass = rep.min_margin > 0.0;
  if (opt.keep_samples) rep.samples = std::move(samples);
  return rep;
}

inline int default_threads() {
  if (const char* env = std::getenv("RICCI_FORGE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace ricci_forge
