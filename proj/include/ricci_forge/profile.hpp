#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ricci_forge/error.hpp"

namespace ricci_forge {

/** Which one-sided limit to take at a breakpoint. */
enum class Side { Auto, Left, Right };

/** Value and first two derivatives of a scalar function at a point. */
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  double operator[](int order) const { return order == 0 ? v : (order == 1 ? d1 : d2); }
};

struct Piece;

namespace kinds {

struct Constant {
  double c = 0.0;
};

/** c0 + c1*t */
struct Linear {
  double c0 = 0.0;
  double c1 = 0.0;
};

/** amplitude*cos(frequency*t + phase) + offset */
struct TrigCos {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

/** amplitude*sin(frequency*t + phase) + offset */
struct TrigSin {
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
};

/** c1*cosh((t-center)/scale) + c2*sinh((t-center)/scale) */
struct HyperbolicMix {
  double c1 = 1.0;
  double c2 = 0.0;
  double scale = 1.0;
  double center = 0.0;
};

/** sum_k c[k]*(t-origin)^k, exactly four coefficients. */
struct CubicPolynomial {
  std::array<double, 4> c{};
  double origin = 0.0;
};

/** sum_k c[k]*(t-origin)^k, any degree. Used for quintic blends. */
struct Polynomial {
  std::vector<double> c;
  double origin = 0.0;
};

/** factor*ln(inner(t)) + offset */
struct LogOfProfile {
  std::shared_ptr<const Piece> inner;
  double factor = 1.0;
  double offset = 0.0;
};

/** Natural cubic spline through (knots, values); m holds the spline second derivatives. */
struct Sampled {
  std::vector<double> knots;
  std::vector<double> values;
  std::vector<double> m;
};

}  // namespace kinds

using PieceFn = std::variant<kinds::Constant, kinds::Linear, kinds::TrigCos, kinds::TrigSin, kinds::HyperbolicMix,
                             kinds::CubicPolynomial, kinds::Polynomial, kinds::LogOfProfile, kinds::Sampled>;

namespace detail {

inline Jet poly_jet(const double* c, std::size_t n, double x) {
  Jet j;
  for (std::size_t k = n; k-- > 0;) {
    j.d2 = j.d2 * x + 2.0 * j.d1;
    j.d1 = j.d1 * x + j.v;
    j.v = j.v * x + c[k];
  }
  return j;
}

inline std::vector<double> natural_spline_moments(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  // Thomas algorithm on the interior unknowns m[1..n-2].
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = x[i] - x[i - 1];
    const double w = lower / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (rhs[i] - (i + 2 < n ? upper[i] * m[i + 1] : 0.0)) / diag[i];
    if (i == 1) break;
  }
  return m;
}

inline Jet sampled_jet(const kinds::Sampled& s, double t) {
  const auto& x = s.knots;
  std::size_t i = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
  i = std::clamp<std::size_t>(i, 1, x.size() - 1);
  const double h = x[i] - x[i - 1];
  const double A = (x[i] - t) / h;
  const double B = (t - x[i - 1]) / h;
  const double y0 = s.values[i - 1], y1 = s.values[i];
  const double m0 = s.m[i - 1], m1 = s.m[i];
  Jet j;
  j.v = A * y0 + B * y1 + ((A * A * A - A) * m0 + (B * B * B - B) * m1) * h * h / 6.0;
  j.d1 = (y1 - y0) / h - (3.0 * A * A - 1.0) / 6.0 * h * m0 + (3.0 * B * B - 1.0) / 6.0 * h * m1;
  j.d2 = A * m0 + B * m1;
  return j;
}

}  // namespace detail

/** One closed-form (or sampled) function on a closed interval [lo, hi]. */
struct Piece {
  PieceFn fn;
  double lo = 0.0;
  double hi = 1.0;

  Jet jet(double t) const {
    return std::visit(
        [t](const auto& k) -> Jet {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, kinds::Constant>) {
            return {k.c, 0.0, 0.0};
          } else if constexpr (std::is_same_v<K, kinds::Linear>) {
            return {k.c0 + k.c1 * t, k.c1, 0.0};
          } else if constexpr (std::is_same_v<K, kinds::TrigCos>) {
            const double x = k.frequency * t + k.phase;
            const double c = std::cos(x), s = std::sin(x);
            return {k.amplitude * c + k.offset, -k.amplitude * k.frequency * s, -k.amplitude * k.frequency * k.frequency * c};
          } else if constexpr (std::is_same_v<K, kinds::TrigSin>) {
            const double x = k.frequency * t + k.phase;
            const double c = std::cos(x), s = std::sin(x);
            return {k.amplitude * s + k.offset, k.amplitude * k.frequency * c, -k.amplitude * k.frequency * k.frequency * s};
          } else if constexpr (std::is_same_v<K, kinds::HyperbolicMix>) {
            const double x = (t - k.center) / k.scale;
            const double ch = std::cosh(x), sh = std::sinh(x);
            const double v = k.c1 * ch + k.c2 * sh;
            return {v, (k.c1 * sh + k.c2 * ch) / k.scale, v / (k.scale * k.scale)};
          } else if constexpr (std::is_same_v<K, kinds::CubicPolynomial>) {
            return detail::poly_jet(k.c.data(), 4, t - k.origin);
          } else if constexpr (std::is_same_v<K, kinds::Polynomial>) {
            return detail::poly_jet(k.c.data(), k.c.size(), t - k.origin);
          } else if constexpr (std::is_same_v<K, kinds::LogOfProfile>) {
            const Jet g = k.inner->jet(t);
            if (!(g.v > 0.0)) fail(ErrorCode::OutOfDomain, "logarithm of a non-positive value");
            const double r = g.d1 / g.v;
            return {k.factor * std::log(g.v) + k.offset, k.factor * r, k.factor * (g.d2 / g.v - r * r)};
          } else {
            return detail::sampled_jet(k, t);
          }
        },
        fn);
  }

  bool exact() const {
    if (std::holds_alternative<kinds::Sampled>(fn)) return false;
    if (const auto* l = std::get_if<kinds::LogOfProfile>(&fn)) return l->inner->exact();
    return true;
  }
};

inline std::string kind_name(const PieceFn& fn) {
  static const char* names[] = {"Constant",        "Linear",     "TrigCos",      "TrigSin", "HyperbolicMix",
                                "CubicPolynomial", "Polynomial", "LogOfProfile", "Sampled"};
  return names[fn.index()];
}

inline kinds::Sampled make_sampled(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() < 2 || knots.size() != values.size()) fail(ErrorCode::InvalidInput, "sampled piece needs >= 2 matching knots and values");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) fail(ErrorCode::InvalidInput, "sampled knots must increase strictly");
  kinds::Sampled s{std::move(knots), std::move(values), {}};
  s.m = detail::natural_spline_moments(s.knots, s.values);
  return s;
}

/** Tolerance for comparing one-sided limits: 1e-12 absolute, relative for magnitudes above one. */
inline bool limits_agree(double l, double r) {
  return std::abs(l - r) <= 1e-12 * std::max({1.0, std::abs(l), std::abs(r)});
}

/**
 * Order-k agreement of two one-sided jets at a breakpoint whose adjacent pieces have minimum length h.
 * Derivatives of a short piece carry roundoff of order |value| / h^k, so that scale is admitted too.
 */
inline bool jets_agree(const Jet& l, const Jet& r, int k, double h) {
  const double v = std::max({1.0, std::abs(l.v), std::abs(r.v)});
  const double scale = std::max({1.0, std::abs(l[k]), std::abs(r[k]), v / std::pow(h, k)});
  return std::abs(l[k] - r[k]) <= 1e-12 * scale;
}

/**
 * @brief Piecewise function on [lo, hi] with exact derivative queries up to order 2.
 *
 * Continuity classes are measured at every interior breakpoint: -1 for a jump in value,
 * otherwise the highest order k <= 2 such that orders 0..k agree.
 */
class Profile {
 public:
  Profile() = default;

  explicit Profile(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) fail(ErrorCode::InvalidInput, "profile needs at least one piece");
    for (const auto& p : pieces_)
      if (!(p.lo < p.hi)) fail(ErrorCode::InvalidInput, "piece domain must satisfy lo < hi");
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      const double gap = pieces_[i].lo - pieces_[i - 1].hi;
      if (std::abs(gap) > 1e-12 * std::max(1.0, std::abs(pieces_[i].lo)))
        fail(ErrorCode::DomainMismatch, "piece domains do not abut at " + std::to_string(pieces_[i - 1].hi));
      pieces_[i].lo = pieces_[i - 1].hi;
    }
    continuity_.reserve(pieces_.size() - 1);
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      const double t = pieces_[i].hi;
      const Jet l = pieces_[i].jet(t), r = pieces_[i + 1].jet(t);
      int cls = -1;
      for (int k = 0; k <= 2 && jets_agree(l, r, k, gap_scale(i)); ++k) cls = k;
      continuity_.push_back(cls);
    }
  }

  Profile(PieceFn fn, double lo, double hi) : Profile(std::vector<Piece>{Piece{std::move(fn), lo, hi}}) {}

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<int>& continuity() const { return continuity_; }

  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) b.push_back(pieces_[i].hi);
    return b;
  }

  /** Minimum continuity class over all breakpoints (2 if there are none). */
  int min_continuity() const {
    int c = 2;
    for (int k : continuity_) c = std::min(c, k);
    return c;
  }

  /** Continuity class at t if t is a breakpoint, 2 otherwise. */
  int continuity_at(double t) const {
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i)
      if (pieces_[i].hi == t) return continuity_[i];
    return 2;
  }

  bool exact() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.exact(); });
  }

  Jet jet(double t, Side side = Side::Auto) const {
    check_domain(t);
    const std::size_t n = pieces_.size();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double x, const Piece& p) { return x < p.hi; }) -
        pieces_.begin());
    if (i >= n) i = n - 1;
    // t == pieces_[i-1].hi is a breakpoint between piece i-1 and i.
    if (i > 0 && t == pieces_[i - 1].hi) {
      if (side == Side::Left) return pieces_[i - 1].jet(t);
      if (side == Side::Right) return pieces_[i].jet(t);
      const Jet l = pieces_[i - 1].jet(t), r = pieces_[i].jet(t);
      Jet out = r;
      for (int k = 0; k <= 2; ++k)
        if (!jets_agree(l, r, k, gap_scale(i - 1)))
          fail(ErrorCode::AmbiguousAtBreakpoint, "one-sided limits of order " + std::to_string(k) + " differ at t=" + fmt_double(t));
      return out;
    }
    return pieces_[i].jet(t);
  }

  double eval(double t, int order = 0) const { return checked_order(jet_order(t, order, Side::Auto), order); }
  double eval_left(double t, int order = 0) const { return checked_order(jet_order(t, order, Side::Left), order); }
  double eval_right(double t, int order = 0) const { return checked_order(jet_order(t, order, Side::Right), order); }

  /** Jet where only orders up to max_order are required to agree at a breakpoint. */
  Jet jet_order(double t, int max_order, Side side) const {
    if (side != Side::Auto) return jet(t, side);
    check_domain(t);
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (pieces_[i].hi == t) {
        const Jet l = pieces_[i].jet(t), r = pieces_[i + 1].jet(t);
        for (int k = 0; k <= max_order; ++k)
          if (!jets_agree(l, r, k, gap_scale(i)))
            fail(ErrorCode::AmbiguousAtBreakpoint, "one-sided limits of order " + std::to_string(k) + " differ at t=" + fmt_double(t));
        return r;
      }
    }
    return jet(t, Side::Auto);
  }

 private:
  /** Shorter of the two pieces meeting at breakpoint i. */
  double gap_scale(std::size_t i) const {
    return std::min(pieces_[i].hi - pieces_[i].lo, pieces_[i + 1].hi - pieces_[i + 1].lo);
  }

  static double checked_order(const Jet& j, int order) {
    if (order < 0 || order > 2) fail(ErrorCode::InvalidInput, "derivative order must be 0, 1 or 2");
    return j[order];
  }

  static std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  void check_domain(double t) const {
    const double tol = 1e-12 * std::max({1.0, std::abs(lo()), std::abs(hi())});
    if (!(t >= lo() - tol && t <= hi() + tol)) fail(ErrorCode::OutOfDomain, "t=" + fmt_double(t) + " outside [" + fmt_double(lo()) + ", " + fmt_double(hi()) + "]");
  }

  std::vector<Piece> pieces_;
  std::vector<int> continuity_;
};

// ---------------------------------------------------------------------------
// Construction helpers

inline Profile constant_profile(double c, double lo, double hi) { return Profile(kinds::Constant{c}, lo, hi); }
inline Profile linear_profile(double c0, double c1, double lo, double hi) { return Profile(kinds::Linear{c0, c1}, lo, hi); }
inline Profile cos_profile(double lo, double hi, double amplitude = 1.0, double frequency = 1.0, double phase = 0.0,
                           double offset = 0.0) {
  return Profile(kinds::TrigCos{amplitude, frequency, phase, offset}, lo, hi);
}
inline Profile sin_profile(double lo, double hi, double amplitude = 1.0, double frequency = 1.0, double phase = 0.0,
                           double offset = 0.0) {
  return Profile(kinds::TrigSin{amplitude, frequency, phase, offset}, lo, hi);
}

/** Concatenate profiles whose domains abut in order. */
inline Profile concat(const std::vector<Profile>& parts) {
  std::vector<Piece> all;
  for (const auto& p : parts) all.insert(all.end(), p.pieces().begin(), p.pieces().end());
  return Profile(std::move(all));
}

/** Restriction to [lo, hi], which must lie inside the domain. */
inline Profile restrict_to(const Profile& p, double lo, double hi) {
  const double tol = 1e-12 * std::max({1.0, std::abs(p.lo()), std::abs(p.hi())});
  if (lo < p.lo() - tol || hi > p.hi() + tol || !(lo < hi)) fail(ErrorCode::OutOfDomain, "restriction interval outside the profile domain");
  std::vector<Piece> out;
  for (const auto& pc : p.pieces()) {
    const double a = std::max(pc.lo, lo), b = std::min(pc.hi, hi);
    if (b > a) out.push_back(Piece{pc.fn, a, b});
  }
  out.front().lo = lo;
  out.back().hi = hi;
  return Profile(std::move(out));
}

namespace detail {

inline PieceFn shift_fn(const PieceFn& fn, double dt);
inline PieceFn rescale_fn(const PieceFn& fn, double mu);
inline PieceFn scale_values_fn(const PieceFn& fn, double c);

inline PieceFn shift_fn(const PieceFn& fn, double dt) {
  return std::visit(
      [dt](const auto& k) -> PieceFn {
        using K = std::decay_t<decltype(k)>;
        K o = k;
        if constexpr (std::is_same_v<K, kinds::Linear>) {
          o.c0 = k.c0 - k.c1 * dt;
        } else if constexpr (std::is_same_v<K, kinds::TrigCos> || std::is_same_v<K, kinds::TrigSin>) {
          o.phase = k.phase - k.frequency * dt;
        } else if constexpr (std::is_same_v<K, kinds::HyperbolicMix>) {
          o.center = k.center + dt;
        } else if constexpr (std::is_same_v<K, kinds::CubicPolynomial> || std::is_same_v<K, kinds::Polynomial>) {
          o.origin = k.origin + dt;
        } else if constexpr (std::is_same_v<K, kinds::LogOfProfile>) {
          o.inner = std::make_shared<const Piece>(Piece{shift_fn(k.inner->fn, dt), k.inner->lo + dt, k.inner->hi + dt});
        } else if constexpr (std::is_same_v<K, kinds::Sampled>) {
          for (auto& x : o.knots) x += dt;
        }
        return o;
      },
      fn);
}

inline PieceFn rescale_fn(const PieceFn& fn, double mu) {
  return std::visit(
      [mu](const auto& k) -> PieceFn {
        using K = std::decay_t<decltype(k)>;
        K o = k;
        if constexpr (std::is_same_v<K, kinds::Constant>) {
          o.c = mu * k.c;
        } else if constexpr (std::is_same_v<K, kinds::Linear>) {
          o.c0 = mu * k.c0;
        } else if constexpr (std::is_same_v<K, kinds::TrigCos> || std::is_same_v<K, kinds::TrigSin>) {
          o.amplitude = mu * k.amplitude;
          o.frequency = k.frequency / mu;
          o.offset = mu * k.offset;
        } else if constexpr (std::is_same_v<K, kinds::HyperbolicMix>) {
          o.c1 = mu * k.c1;
          o.c2 = mu * k.c2;
          o.scale = mu * k.scale;
          o.center = mu * k.center;
        } else if constexpr (std::is_same_v<K, kinds::CubicPolynomial> || std::is_same_v<K, kinds::Polynomial>) {
          o.origin = mu * k.origin;
          double s = mu;
          for (auto& c : o.c) {
            c *= s;
            s /= mu;
          }
        } else if constexpr (std::is_same_v<K, kinds::LogOfProfile>) {
          // mu*(F*ln g(t/mu) + O) = (mu*F)*ln(mu*g(t/mu)) + mu*O - mu*F*ln(mu)
          o.inner = std::make_shared<const Piece>(Piece{rescale_fn(k.inner->fn, mu), mu * k.inner->lo, mu * k.inner->hi});
          o.factor = mu * k.factor;
          o.offset = mu * k.offset - mu * k.factor * std::log(mu);
        } else if constexpr (std::is_same_v<K, kinds::Sampled>) {
          for (auto& x : o.knots) x *= mu;
          for (auto& y : o.values) y *= mu;
          for (auto& m : o.m) m /= mu;
        }
        return o;
      },
      fn);
}

inline PieceFn scale_values_fn(const PieceFn& fn, double c) {
  return std::visit(
      [c](const auto& k) -> PieceFn {
        using K = std::decay_t<decltype(k)>;
        K o = k;
        if constexpr (std::is_same_v<K, kinds::Constant>) {
          o.c = c * k.c;
        } else if constexpr (std::is_same_v<K, kinds::Linear>) {
          o.c0 = c * k.c0;
          o.c1 = c * k.c1;
        } else if constexpr (std::is_same_v<K, kinds::TrigCos> || std::is_same_v<K, kinds::TrigSin>) {
          o.amplitude = c * k.amplitude;
          o.offset = c * k.offset;
        } else if constexpr (std::is_same_v<K, kinds::HyperbolicMix>) {
          o.c1 = c * k.c1;
          o.c2 = c * k.c2;
        } else if constexpr (std::is_same_v<K, kinds::CubicPolynomial> || std::is_same_v<K, kinds::Polynomial>) {
          for (auto& x : o.c) x *= c;
        } else if constexpr (std::is_same_v<K, kinds::LogOfProfile>) {
          o.factor = c * k.factor;
          o.offset = c * k.offset;
        } else if constexpr (std::is_same_v<K, kinds::Sampled>) {
          for (auto& y : o.values) y *= c;
          for (auto& m : o.m) m *= c;
        }
        return o;
      },
      fn);
}

}  // namespace detail

/** t -> p(t - dt) on the shifted domain. */
inline Profile shift(const Profile& p, double dt) {
  std::vector<Piece> out;
  for (const auto& pc : p.pieces()) out.push_back(Piece{detail::shift_fn(pc.fn, dt), pc.lo + dt, pc.hi + dt});
  return Profile(std::move(out));
}

/** t -> mu * p(t / mu) on [mu*lo, mu*hi]. */
inline Profile rescale(const Profile& p, double mu) {
  if (!(mu > 0.0)) fail(ErrorCode::InvalidInput, "rescale factor must be positive");
  std::vector<Piece> out;
  for (const auto& pc : p.pieces()) out.push_back(Piece{detail::rescale_fn(pc.fn, mu), mu * pc.lo, mu * pc.hi});
  return Profile(std::move(out));
}

/** t -> c * p(t). */
inline Profile scale_values(const Profile& p, double c) {
  std::vector<Piece> out;
  for (const auto& pc : p.pieces()) out.push_back(Piece{detail::scale_values_fn(pc.fn, c), pc.lo, pc.hi});
  return Profile(std::move(out));
}

/** t -> p(t / mu) on [mu*lo, mu*hi] (time stretch without value scaling). */
inline Profile stretch(const Profile& p, double mu) { return scale_values(rescale(p, mu), 1.0 / mu); }

/** t -> factor * ln(p(t)) + offset, piece by piece. */
inline Profile log_of(const Profile& p, double factor, double offset = 0.0) {
  std::vector<Piece> out;
  for (const auto& pc : p.pieces())
    out.push_back(Piece{kinds::LogOfProfile{std::make_shared<const Piece>(pc), factor, offset}, pc.lo, pc.hi});
  return Profile(std::move(out));
}

/**
 * Quintic Hermite polynomial on [t0, t1] matching value, first and second derivative at both ends.
 * Coefficients are in powers of (t - t0).
 */
inline kinds::Polynomial quintic_hermite(double t0, const Jet& j0, double t1, const Jet& j1) {
  const double h = t1 - t0;
  const double c0 = j0.v, c1 = j0.d1, c2 = 0.5 * j0.d2;
  // Remaining conditions on c3..c5 at x = h.
  const double r0 = j1.v - (c0 + c1 * h + c2 * h * h);
  const double r1 = j1.d1 - (c1 + 2.0 * c2 * h);
  const double r2 = j1.d2 - 2.0 * c2;
  const double h2 = h * h, h3 = h2 * h;
  const double c3 = (10.0 * r0 - 4.0 * r1 * h + 0.5 * r2 * h2) / h3;
  const double c4 = (-15.0 * r0 + 7.0 * r1 * h - r2 * h2) / (h3 * h);
  const double c5 = (6.0 * r0 - 3.0 * r1 * h + 0.5 * r2 * h2) / (h3 * h2);
  return kinds::Polynomial{{c0, c1, c2, c3, c4, c5}, t0};
}

}  // namespace ricci_forge
