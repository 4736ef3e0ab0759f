#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ricci_forge/error.hpp"

namespace ricci_forge {

using Int = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<Int>>;

inline IntMatrix zero_matrix(std::size_t rows, std::size_t cols) { return IntMatrix(rows, std::vector<Int>(cols, Int(0))); }

inline IntMatrix identity_matrix(std::size_t n) {
  IntMatrix m = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), p = k ? b[0].size() : 0;
  IntMatrix c = zero_matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != k) fail(ErrorCode::InvalidInput, "matrix sizes do not match");
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < p; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  }
  return c;
}

inline IntMatrix transpose(const IntMatrix& a) {
  const std::size_t n = a.size(), p = n ? a[0].size() : 0;
  IntMatrix t = zero_matrix(p, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) t[j][i] = a[i][j];
  return t;
}

/** Exact determinant by fraction-free (Bareiss) elimination. */
inline Int determinant(IntMatrix m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) fail(ErrorCode::InvalidInput, "determinant of a non-square matrix");
  if (n == 0) return 1;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/** Antisymmetric integer matrix with arbitrary-precision entries. */
class SkewIntMatrix {
 public:
  SkewIntMatrix() = default;
  explicit SkewIntMatrix(std::size_t n) : a_(zero_matrix(n, n)) {}
  explicit SkewIntMatrix(IntMatrix rows) : a_(std::move(rows)) {
    const std::size_t n = a_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (a_[i].size() != n) fail(ErrorCode::InvalidInput, "skew matrix must be square");
      if (a_[i][i] != 0) fail(ErrorCode::InvalidInput, "skew matrix must have zero diagonal");
      for (std::size_t j = 0; j < i; ++j)
        if (a_[i][j] != -a_[j][i]) fail(ErrorCode::InvalidInput, "matrix is not antisymmetric");
    }
  }

  std::size_t n() const { return a_.size(); }
  const Int& operator()(std::size_t i, std::size_t j) const { return a_[i][j]; }
  /** Sets entry (i, j) and its mirror (j, i). */
  void set(std::size_t i, std::size_t j, const Int& v) {
    if (i == j) {
      if (v != 0) fail(ErrorCode::InvalidInput, "diagonal of a skew matrix must be zero");
      return;
    }
    a_[i][j] = v;
    a_[j][i] = -v;
  }
  const IntMatrix& rows() const { return a_; }

  bool operator==(const SkewIntMatrix& o) const { return a_ == o.a_; }

 private:
  IntMatrix a_;
};

/** T A T^T for a square integer T of matching size. */
/** Exact inverse of a matrix with determinant +-1, by Gauss-Jordan over the rationals. */
inline IntMatrix unimodular_inverse(const IntMatrix& T) {
  using Q = boost::multiprecision::cpp_rational;
  const std::size_t n = T.size();
  std::vector<std::vector<Q>> a(n, std::vector<Q>(2 * n, Q(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (T[i].size() != n) fail(ErrorCode::InvalidInput, "matrix is not square");
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Q(T[i][j]);
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) fail(ErrorCode::InvalidInput, "matrix is singular");
    std::swap(a[p], a[c]);
    const Q inv = 1 / a[c][c];
    for (auto& x : a[c]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Q f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  IntMatrix out = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (denominator(a[i][n + j]) != 1) fail(ErrorCode::InvalidInput, "matrix is not unimodular");
      out[i][j] = numerator(a[i][n + j]);
    }
  return out;
}

inline SkewIntMatrix congruence(const IntMatrix& T, const SkewIntMatrix& A) {
  return SkewIntMatrix(multiply(multiply(T, A.rows()), transpose(T)));
}

/** Block-diagonal K_{d_1} + ... + K_{d_k} padded with zeros to size n. */
inline SkewIntMatrix diag_form(std::size_t n, const std::vector<Int>& values) {
  if (2 * values.size() > n) fail(ErrorCode::InvalidInput, "too many blocks for the dimension");
  SkewIntMatrix d(n);
  for (std::size_t b = 0; b < values.size(); ++b) d.set(2 * b, 2 * b + 1, values[b]);
  return d;
}

/** Pfaffian by expansion along the first row (exponential; meant for small sizes). */
inline Int pfaffian(const SkewIntMatrix& A) {
  const std::size_t n = A.n();
  if (n % 2) return 0;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  auto rec = [&](auto&& self, const std::vector<std::size_t>& v) -> Int {
    if (v.empty()) return 1;
    Int sum = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (A(v[0], v[j]) == 0) continue;
      std::vector<std::size_t> rest;
      rest.reserve(v.size() - 2);
      for (std::size_t k = 1; k < v.size(); ++k)
        if (k != j) rest.push_back(v[k]);
      const Int term = A(v[0], v[j]) * self(self, rest);
      if (j % 2) sum += term;
      else sum -= term;
    }
    return sum;
  };
  return rec(rec, idx);
}

struct SkewNormalForm {
  /** Positive block values d_1 | d_2 | ... | d_k. */
  std::vector<Int> blocks;
  std::size_t zero_count = 0;

  std::size_t n() const { return 2 * blocks.size() + zero_count; }
  SkewIntMatrix matrix() const { return diag_form(n(), blocks); }
  bool operator==(const SkewNormalForm& o) const { return blocks == o.blocks && zero_count == o.zero_count; }
};

struct SkewNormalFormResult {
  /** Unimodular witness with T A T^T = form.matrix(). */
  IntMatrix T;
  SkewNormalForm form;
};

namespace detail {

inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/** Working copy of A with the accumulated basis change; every move acts on M and T together. */
class SkewReducer {
 public:
  explicit SkewReducer(const SkewIntMatrix& A) : M(A.rows()), T(identity_matrix(A.n())) {}

  /** Basis vector k += c * basis vector j. */
  void add(std::size_t k, std::size_t j, const Int& c) {
    if (c == 0) return;
    const std::size_t n = M.size();
    for (std::size_t i = 0; i < n; ++i) M[k][i] += c * M[j][i];
    for (std::size_t i = 0; i < n; ++i) M[i][k] += c * M[i][j];
    for (std::size_t i = 0; i < n; ++i) T[k][i] += c * T[j][i];
  }

  /**
   * Splits off hyperbolic blocks among the indices in idx, pivoting on the smallest nonzero entry.
   * Returns the blocks as index pairs (p, q) with M[p][q] > 0; the indices left over span a zero block.
   */
  std::vector<std::pair<std::size_t, std::size_t>> reduce(std::vector<std::size_t> idx) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (;;) {
      std::size_t p = 0, q = 0;
      Int best = 0;
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
          const Int v = abs(M[idx[a]][idx[b]]);
          if (v != 0 && (best == 0 || v < best)) best = v, p = idx[a], q = idx[b];
        }
      if (best == 0) return blocks;
      if (M[p][q] < 0) std::swap(p, q);
      const Int d = M[p][q];
      bool clean = true;
      for (std::size_t k : idx) {
        if (k == p || k == q) continue;
        add(k, q, -floor_div(M[p][k], d));
        add(k, p, floor_div(M[q][k], d));
        if (M[p][k] != 0 || M[q][k] != 0) clean = false;
      }
      if (!clean) continue;
      blocks.emplace_back(p, q);
      idx.erase(std::remove_if(idx.begin(), idx.end(), [&](std::size_t k) { return k == p || k == q; }), idx.end());
    }
  }

  IntMatrix M;
  IntMatrix T;
};

}  // namespace detail

/**
 * @brief Congruence normal form T A T^T = K_{d_1} + ... + K_{d_k} + 0 with d_1 | ... | d_k and T unimodular.
 *
 * Blocks are split off by minimal-entry pivoting. Two blocks K_a, K_b with a not dividing b are merged by
 * e_a += e_b followed by a re-reduction of their four basis vectors, which leaves K_gcd + K_lcm.
 */
inline SkewNormalFormResult skew_normal_form(const SkewIntMatrix& A) {
  const std::size_t n = A.n();
  detail::SkewReducer r(A);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  auto blocks = r.reduce(all);

  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j) {
      for (int guard = 0; r.M[blocks[j].first][blocks[j].second] % r.M[blocks[i].first][blocks[i].second] != 0; ++guard) {
        if (guard > 64) fail(ErrorCode::InvalidInput, "block merge did not converge");
        r.add(blocks[i].first, blocks[j].first, 1);
        auto two = r.reduce({blocks[i].first, blocks[i].second, blocks[j].first, blocks[j].second});
        if (two.size() != 2) fail(ErrorCode::InvalidInput, "block merge lost rank");
        if (r.M[two[0].first][two[0].second] > r.M[two[1].first][two[1].second]) std::swap(two[0], two[1]);
        blocks[i] = two[0];
        blocks[j] = two[1];
      }
    }

  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  SkewNormalFormResult out;
  for (const auto& [p, q] : blocks) {
    order.push_back(p);
    order.push_back(q);
    used[p] = used[q] = true;
    out.form.blocks.push_back(r.M[p][q]);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) order.push_back(i);
  out.form.zero_count = n - 2 * blocks.size();
  out.T.reserve(n);
  for (std::size_t i : order) out.T.push_back(r.T[i]);
  return out;
}

/** True iff A and B have the same canonical normal form. */
inline bool congruent(const SkewIntMatrix& A, const SkewIntMatrix& B) {
  return A.n() == B.n() && skew_normal_form(A).form == skew_normal_form(B).form;
}

/** Antisymmetric dim x dim matrix with every entry above the diagonal equal to 1. */
inline SkewIntMatrix build_S(std::size_t dim) {
  if (dim % 2 == 0) fail(ErrorCode::InvalidInput, "S is defined for odd dimensions");
  SkewIntMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) s.set(i, j, 1);
  return s;
}

inline void check_parity_bound(long n, long ell) {
  if (ell < 1 || n < 1) fail(ErrorCode::ParityBoundViolation, "n and ell must be positive");
  const long bound = n % 2 ? 2 * ell - 1 : 2 * ell - 2;
  if (n > bound)
    fail(ErrorCode::ParityBoundViolation, "n = " + std::to_string(n) + " exceeds " + std::to_string(bound) + " for ell = " + std::to_string(ell));
}

/** The vector v_{n,ell} of length 2 ell - 1 with entries in {-1, 0, 1}. */
inline std::vector<Int> build_v(long n, long ell) {
  check_parity_bound(n, ell);
  std::vector<Int> v(2 * ell - 1);
  for (long i = 1; i <= 2 * ell - 1; ++i) {
    if (i <= n) v[i - 1] = i % 2 ? 1 : -1;
    else if (i == 2 * ell - 1 && n % 2 == 0) v[i - 1] = 0;
    else v[i - 1] = 1;
  }
  return v;
}

/** A_{n,ell} = [[S_{2 ell - 1}, v], [-v^T, 0]]. */
inline SkewIntMatrix build_A(long n, long ell) {
  const auto v = build_v(n, ell);
  const std::size_t N = 2 * ell;
  SkewIntMatrix a(N);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    for (std::size_t j = i + 1; j + 1 < N; ++j) a.set(i, j, 1);
    a.set(i, N - 1, v[i]);
  }
  return a;
}

/** Checks 2 ell >= max(n_j + 1, k) and positivity of nu. */
inline void check_ell_bound(const std::vector<long>& nu, long ell) {
  if (nu.empty()) fail(ErrorCode::InvalidInput, "nu must be nonempty");
  long need = static_cast<long>(nu.size());
  for (long n : nu) {
    if (n < 1) fail(ErrorCode::InvalidInput, "entries of nu must be positive");
    need = std::max(need, n + 1);
  }
  if (2 * ell < need)
    fail(ErrorCode::EllTooSmall, "ell = " + std::to_string(ell) + " is below the bound " + std::to_string((need + 1) / 2));
}

/** Smallest ell with 2 ell >= max(n_j + 1, k). */
inline long minimal_ell(const std::vector<long>& nu) {
  long need = static_cast<long>(nu.size());
  for (long n : nu) need = std::max(need, n + 1);
  return std::max(1L, (need + 1) / 2);
}

/**
 * B_{nu,ell}: A_{n_1,ell} for k = 1, else [[B', C], [-C^T, A_{n_k,ell}]] where every column of C is
 * column k - 1 of B' = B_{(n_1..n_{k-1}),ell}.
 */
inline SkewIntMatrix build_B(const std::vector<long>& nu, long ell) {
  check_ell_bound(nu, ell);
  SkewIntMatrix b = build_A(nu[0], ell);
  const std::size_t L = 2 * ell;
  for (std::size_t k = 2; k <= nu.size(); ++k) {
    const std::size_t old = b.n();
    SkewIntMatrix next(old + L);
    for (std::size_t i = 0; i < old; ++i)
      for (std::size_t j = i + 1; j < old; ++j) next.set(i, j, b(i, j));
    for (std::size_t i = 0; i < old; ++i)
      for (std::size_t c = 0; c < L; ++c) next.set(i, old + c, b(i, k - 2));
    const SkewIntMatrix a = build_A(nu[k - 1], ell);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = i + 1; j < L; ++j) next.set(old + i, old + j, a(i, j));
    b = std::move(next);
  }
  return b;
}

struct AnlTrace {
  /** The vector after each split; steps.front() is v, steps.back() has length 1. */
  std::vector<std::vector<Int>> steps;
  /** -sum (-1)^i v_i of the residual, i.e. its single entry. */
  Int residual = 0;
};

/**
 * Splits off K_1 from [[S_{2l-1}, v], [-v^T, 0]] l - 1 times via v'_i = v_{i+2} + (v_1 - v_2) and returns
 * the last block value.
 */
inline AnlTrace anl_reduction_trace(const SkewIntMatrix& A) {
  const std::size_t N = A.n();
  if (N < 2 || N % 2) fail(ErrorCode::InvalidInput, "expected an even-dimensional matrix");
  for (std::size_t i = 0; i + 1 < N; ++i)
    for (std::size_t j = i + 1; j + 1 < N; ++j)
      if (A(i, j) != 1) fail(ErrorCode::InvalidInput, "upper-left block is not S");
  AnlTrace tr;
  std::vector<Int> v(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) v[i] = A(i, N - 1);
  tr.steps.push_back(v);
  while (v.size() > 1) {
    const Int shift = v[0] - v[1];
    std::vector<Int> w(v.begin() + 2, v.end());
    for (auto& x : w) x += shift;
    v = std::move(w);
    tr.steps.push_back(v);
  }
  tr.residual = v[0];
  return tr;
}

/** -sum_{i>=1} (-1)^i v_i. */
inline Int alternating_residual(const std::vector<Int>& v) {
  Int s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i % 2 == 0) s += v[i];
    else s -= v[i];
  }
  return s;
}

/** Finite abelian group given by invariant factors; a factor 0 stands for Z. */
struct AbelianGroup {
  std::vector<Int> factors;

  std::vector<Int> zero() const { return std::vector<Int>(factors.size(), Int(0)); }

  std::vector<Int> reduce(std::vector<Int> x) const {
    if (x.size() != factors.size()) fail(ErrorCode::InvalidInput, "group element has the wrong length");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (factors[i] != 0) {
        x[i] %= factors[i];
        if (x[i] < 0) x[i] += factors[i];
      }
    return x;
  }

  std::vector<Int> add(const std::vector<Int>& x, const std::vector<Int>& y) const {
    std::vector<Int> z = x;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += y.at(i);
    return reduce(std::move(z));
  }

  std::vector<Int> scale(const Int& k, const std::vector<Int>& x) const {
    std::vector<Int> z = x;
    for (auto& c : z) c *= k;
    return reduce(std::move(z));
  }

  bool operator==(const AbelianGroup& o) const { return factors == o.factors; }
};

/** (Z^rank, lambda, mu) with mu(x + y) = mu(x) + mu(y) + p(lambda(x, y)) and p(k) = k * p_image. */
struct ExtendedQuadraticForm {
  std::size_t rank = 0;
  SkewIntMatrix lambda;
  AbelianGroup coeff_group;
  std::vector<Int> p_image;
  /** mu of each basis vector. */
  std::vector<std::vector<Int>> mu;

  void validate() const {
    if (lambda.n() != rank || mu.size() != rank) fail(ErrorCode::InvalidInput, "form components do not match the rank");
    coeff_group.reduce(p_image);
    for (const auto& m : mu) coeff_group.reduce(m);
    // mu(x + y) = mu(y + x) forces p(lambda(x, y)) = p(lambda(y, x)) = -p(lambda(x, y)).
    bool degenerate = true;
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) degenerate = degenerate && lambda(i, j) == 0;
    if (!degenerate && coeff_group.scale(2, p_image) != coeff_group.zero())
      fail(ErrorCode::InvalidInput, "p_image must have order at most 2");
  }

  bool operator==(const ExtendedQuadraticForm& o) const {
    return rank == o.rank && lambda == o.lambda && coeff_group == o.coeff_group && coeff_group.reduce(p_image) == o.coeff_group.reduce(o.p_image) &&
           [&] {
             for (std::size_t i = 0; i < rank; ++i)
               if (coeff_group.reduce(mu[i]) != o.coeff_group.reduce(o.mu[i])) return false;
             return true;
           }();
  }
};

/** The m = 1 preset: trivial coefficient group, mu = 0. */
inline ExtendedQuadraticForm trivial_eqf(const SkewIntMatrix& lambda) {
  ExtendedQuadraticForm f;
  f.rank = lambda.n();
  f.lambda = lambda;
  f.mu.assign(f.rank, {});
  return f;
}

inline Int eqf_pairing(const ExtendedQuadraticForm& f, const std::vector<Int>& x, const std::vector<Int>& y) {
  Int s = 0;
  for (std::size_t i = 0; i < f.rank; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < f.rank; ++j)
      if (y[j] != 0) s += x[i] * f.lambda(i, j) * y[j];
  }
  return s;
}

/** A vector of H together with its mu value; sums follow the quadratic relation. */
struct EqfElement {
  std::vector<Int> x;
  std::vector<Int> mu;
};

inline EqfElement eqf_sum(const ExtendedQuadraticForm& f, const EqfElement& a, const EqfElement& b) {
  EqfElement s;
  s.x = a.x;
  for (std::size_t i = 0; i < f.rank; ++i) s.x[i] += b.x[i];
  s.mu = f.coeff_group.add(f.coeff_group.add(a.mu, b.mu), f.coeff_group.scale(eqf_pairing(f, a.x, b.x), f.p_image));
  return s;
}

/** mu(-x) from 0 = mu(x + (-x)) = mu(x) + mu(-x) + p(lambda(x, -x)). */
inline EqfElement eqf_negate(const ExtendedQuadraticForm& f, const EqfElement& a) {
  EqfElement n;
  n.x = a.x;
  for (auto& c : n.x) c = -c;
  const auto pl = f.coeff_group.scale(eqf_pairing(f, a.x, n.x), f.p_image);
  n.mu = f.coeff_group.scale(-1, f.coeff_group.add(a.mu, pl));
  return n;
}

inline EqfElement eqf_basis(const ExtendedQuadraticForm& f, std::size_t i) {
  EqfElement e;
  e.x.assign(f.rank, 0);
  e.x[i] = 1;
  e.mu = f.coeff_group.reduce(f.mu[i]);
  return e;
}

/** k * a by doubling, each step an application of the relation. */
inline EqfElement eqf_multiple(const ExtendedQuadraticForm& f, EqfElement a, Int k) {
  if (k < 0) {
    a = eqf_negate(f, a);
    k = -k;
  }
  EqfElement acc{std::vector<Int>(f.rank, Int(0)), f.coeff_group.zero()};
  while (k > 0) {
    if (k % 2 == 1) acc = eqf_sum(f, acc, a);
    a = eqf_sum(f, a, a);
    k /= 2;
  }
  return acc;
}

/** mu of sum_i x_i e_i, built by iterated application of the relation. */
inline std::vector<Int> eqf_mu(const ExtendedQuadraticForm& f, const std::vector<Int>& x) {
  if (x.size() != f.rank) fail(ErrorCode::InvalidInput, "vector length does not match the rank");
  EqfElement acc{std::vector<Int>(f.rank, Int(0)), f.coeff_group.zero()};
  for (std::size_t i = 0; i < f.rank; ++i)
    if (x[i] != 0) acc = eqf_sum(f, acc, eqf_multiple(f, eqf_basis(f, i), x[i]));
  return acc.mu;
}

/** New basis e'_r = sum_c T[r][c] e_c: lambda becomes T lambda T^T and mu(e'_r) follows from the relation. */
inline ExtendedQuadraticForm eqf_change_basis(const ExtendedQuadraticForm& form, const IntMatrix& T) {
  form.validate();
  if (T.size() != form.rank) fail(ErrorCode::InvalidInput, "witness size does not match the rank");
  ExtendedQuadraticForm out = form;
  out.lambda = congruence(T, form.lambda);
  for (std::size_t r = 0; r < form.rank; ++r) out.mu[r] = eqf_mu(form, T[r]);
  out.p_image = form.coeff_group.reduce(form.p_image);
  return out;
}

enum class BoundaryType { SphereBundleOverSphere, HomotopySphere, Unclassified };

inline const char* boundary_name(BoundaryType b) {
  switch (b) {
    case BoundaryType::SphereBundleOverSphere: return "SphereBundleOverSphere";
    case BoundaryType::HomotopySphere: return "HomotopySphere";
    case BoundaryType::Unclassified: return "Unclassified";
  }
  return "Unclassified";
}

/** Rank 1: sphere bundle over a sphere; rank 2 with lambda congruent to K_1: homotopy sphere. */
inline BoundaryType classify_boundary(const ExtendedQuadraticForm& f) {
  if (f.rank == 1) return BoundaryType::SphereBundleOverSphere;
  if (f.rank == 2 && congruent(f.lambda, diag_form(2, {Int(1)}))) return BoundaryType::HomotopySphere;
  return BoundaryType::Unclassified;
}

}  // namespace ricci_forge
