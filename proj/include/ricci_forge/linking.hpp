#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ricci_forge/error.hpp"
#include "ricci_forge/skewalg.hpp"

namespace ricci_forge {

using Rational = boost::multiprecision::cpp_rational;
using RatMatrix = std::vector<std::vector<Rational>>;

inline RatMatrix rat_zero(std::size_t rows, std::size_t cols) { return RatMatrix(rows, std::vector<Rational>(cols, Rational(0))); }

inline RatMatrix rat_diag(const std::vector<Rational>& v) {
  RatMatrix m = rat_zero(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) m[i][i] = v[i];
  return m;
}

/** Row echelon form in place; returns the pivot columns. */
inline std::vector<std::size_t> rat_row_reduce(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rat_rank(RatMatrix m) { return rat_row_reduce(m).size(); }

inline Rational rat_det(RatMatrix m) {
  const std::size_t n = m.size();
  Rational d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      const Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return d;
}

/** A basis of {x : M x = 0}, one vector per free column. */
inline std::vector<std::vector<Rational>> rat_kernel(RatMatrix m) {
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  const auto pivots = rat_row_reduce(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> x(cols, Rational(0));
    x[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][f];
    basis.push_back(std::move(x));
  }
  return basis;
}

/** Oriented (2m+1)-planes in R^{4m+2}, plane i spanned by the columns of [P_i; I]. */
struct SubspaceFamily {
  int m = 1;
  Rational eps = 0;
  std::vector<RatMatrix> planes;
  std::vector<long> nu;
  long ell = 0;

  std::size_t dim() const { return 2 * static_cast<std::size_t>(m) + 1; }
};

/** Diagonal entries of P_{i,n}, 1 <= i <= 2 ell. */
inline std::vector<Rational> p_diagonal(long i, long n, long ell, int m) {
  const std::size_t d = 2 * static_cast<std::size_t>(m) + 1;
  std::vector<Rational> v(d, Rational(0));
  auto fill = [&](std::size_t from, const Rational& x) {
    for (std::size_t k = from; k < d; ++k) v[k] = x;
  };
  if (i <= n && i % 2 == 1) {
    fill(0, i);
    v[0] = -i;
  } else if (i <= n) {
    fill(0, i);
    v[1] = -i;
  } else if (i <= 2 * ell - 2 || (i == 2 * ell - 1 && n % 2 == 1)) {
    fill(2, Rational(1, i));
    v[0] = v[1] = i;
  } else if (i == 2 * ell - 1) {
    v[0] = v[1] = i;
  } else if (i == 2 * ell) {
    v[0] = n % 2 ? -2 * ell : -2 * ell + 1;
  } else {
    fail(ErrorCode::InvalidInput, "plane index out of range");
  }
  return v;
}

/** Q_v: upper-left block [[v_1, 1], [v_1 v_2, v_2]], then v_3, ..., v_{2m+1} on the diagonal. */
inline RatMatrix q_matrix(const std::vector<Rational>& v) {
  if (v.size() < 2) fail(ErrorCode::InvalidInput, "Q_v needs at least two entries");
  RatMatrix q = rat_diag(v);
  q[0][1] = 1;
  q[1][0] = v[0] * v[1];
  return q;
}

/**
 * @brief Planes with intersection matrix B_{nu,ell} for small eps.
 *
 * The first 2 ell planes are P_{i,n_1}; block j >= 1 perturbs P_{j,n_1} by eps Q_{i,n_{j+1}}.
 */
inline SubspaceFamily build_subspaces(const std::vector<long>& nu, long ell, int m, const Rational& eps) {
  if (m < 1) fail(ErrorCode::InvalidInput, "m must be positive");
  if (!(eps > 0)) fail(ErrorCode::InvalidInput, "eps must be positive");
  if (nu.empty()) fail(ErrorCode::InvalidInput, "nu must be nonempty");
  for (long n : nu) check_parity_bound(n, ell);
  check_ell_bound(nu, ell);
  SubspaceFamily fam;
  fam.m = m;
  fam.eps = eps;
  fam.nu = nu;
  fam.ell = ell;
  for (long i = 1; i <= 2 * ell; ++i) fam.planes.push_back(rat_diag(p_diagonal(i, nu[0], ell, m)));
  for (std::size_t j = 1; j < nu.size(); ++j) {
    const RatMatrix base = rat_diag(p_diagonal(static_cast<long>(j), nu[0], ell, m));
    for (long i = 1; i <= 2 * ell; ++i) {
      RatMatrix p = q_matrix(p_diagonal(i, nu[j], ell, m));
      for (std::size_t r = 0; r < p.size(); ++r)
        for (std::size_t c = 0; c < p.size(); ++c) p[r][c] = base[r][c] + eps * p[r][c];
      fam.planes.push_back(std::move(p));
    }
  }
  return fam;
}

struct IntersectionTable {
  SkewIntMatrix matrix;
  /** dim(W_i cap W_j); the diagonal holds 2m + 1. */
  std::vector<std::vector<std::size_t>> dim;
  /** Pairs (i < j) meeting in dimension > 1. */
  std::vector<std::pair<std::size_t, std::size_t>> oversized;
};

enum class IntersectionCheck {
  /** Fail on any pair meeting in dimension > 1. */
  Strict,
  /** Fail only on coincident planes; list the other pairs of dimension > 1. */
  Report,
};

/** a_ij = sgn det(P_i - P_j) for i < j, antisymmetric; dimensions from exact ranks. */
inline IntersectionTable intersection_matrix(const SubspaceFamily& fam, IntersectionCheck check = IntersectionCheck::Report) {
  const std::size_t N = fam.planes.size(), d = fam.dim();
  for (const auto& p : fam.planes)
    if (p.size() != d || (d && p[0].size() != d)) fail(ErrorCode::InvalidInput, "plane matrices must be (2m+1) x (2m+1)");
  IntersectionTable t;
  t.matrix = SkewIntMatrix(N);
  t.dim.assign(N, std::vector<std::size_t>(N, d));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      RatMatrix diff = fam.planes[i];
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) diff[r][c] -= fam.planes[j][r][c];
      const Rational det = rat_det(diff);
      t.matrix.set(i, j, det > 0 ? 1 : det < 0 ? -1 : 0);
      const std::size_t k = d - rat_rank(std::move(diff));
      t.dim[i][j] = t.dim[j][i] = k;
      if (k <= 1) continue;
      if (check == IntersectionCheck::Strict || k == d)
        fail(ErrorCode::IntersectionTooLarge,
             "planes " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " meet in dimension " + std::to_string(k));
      t.oversized.emplace_back(i, j);
    }
  return t;
}

using VertexSet = std::vector<std::size_t>;

/** Graph with an edge {i, j} whenever a_ij = 0, i != j; all vertex lists are sorted. */
struct LinkGraph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<bool>> adj;
  /** Maximal cliques, including isolated vertices as singletons. */
  std::vector<VertexSet> cliques;
  /** Vertex sets of the biconnected components (blocks) of the edge set. */
  std::vector<VertexSet> biconnected;
  std::vector<VertexSet> components;

  std::size_t degree(std::size_t v) const { return static_cast<std::size_t>(std::count(adj[v].begin(), adj[v].end(), true)); }
  bool is_clique(const VertexSet& s) const {
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b)
        if (!adj[s[a]][s[b]]) return false;
    return true;
  }
};

namespace detail {

inline void bron_kerbosch(const LinkGraph& g, VertexSet& r, VertexSet p, VertexSet x, std::vector<VertexSet>& out) {
  if (p.empty() && x.empty()) {
    VertexSet c = r;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  // Pivot on the vertex of P u X with the most neighbours in P.
  std::size_t pivot = p.empty() ? x[0] : p[0];
  std::size_t best = 0;
  for (const VertexSet* s : {&p, &x})
    for (std::size_t u : *s) {
      std::size_t cnt = 0;
      for (std::size_t v : p) cnt += g.adj[u][v];
      if (cnt > best) best = cnt, pivot = u;
    }
  VertexSet candidates;
  for (std::size_t v : p)
    if (!g.adj[pivot][v]) candidates.push_back(v);
  for (std::size_t v : candidates) {
    VertexSet np, nx;
    for (std::size_t u : p)
      if (g.adj[v][u]) np.push_back(u);
    for (std::size_t u : x)
      if (g.adj[v][u]) nx.push_back(u);
    r.push_back(v);
    bron_kerbosch(g, r, np, nx, out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

inline void biconnected_dfs(const LinkGraph& g, std::size_t u, std::size_t parent, std::size_t& timer, std::vector<std::size_t>& disc,
                            std::vector<std::size_t>& low, std::vector<std::pair<std::size_t, std::size_t>>& stack,
                            std::vector<VertexSet>& out) {
  disc[u] = low[u] = ++timer;
  for (std::size_t v = 0; v < g.n; ++v) {
    if (!g.adj[u][v] || v == parent) continue;
    if (disc[v] == 0) {
      stack.emplace_back(u, v);
      biconnected_dfs(g, v, u, timer, disc, low, stack, out);
      low[u] = std::min(low[u], low[v]);
      if (low[v] >= disc[u]) {
        std::set<std::size_t> comp;
        for (;;) {
          const auto e = stack.back();
          stack.pop_back();
          comp.insert(e.first);
          comp.insert(e.second);
          if (e == std::make_pair(u, v)) break;
        }
        out.emplace_back(comp.begin(), comp.end());
      }
    } else if (disc[v] < disc[u]) {
      stack.emplace_back(u, v);
      low[u] = std::min(low[u], disc[v]);
    }
  }
}

}  // namespace detail

inline LinkGraph build_graph(const SkewIntMatrix& A) {
  LinkGraph g;
  g.n = A.n();
  g.adj.assign(g.n, std::vector<bool>(g.n, false));
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j)
      if (A(i, j) == 0) {
        g.adj[i][j] = g.adj[j][i] = true;
        g.edges.emplace_back(i, j);
      }

  VertexSet r, all(g.n);
  for (std::size_t i = 0; i < g.n; ++i) all[i] = i;
  detail::bron_kerbosch(g, r, all, {}, g.cliques);
  std::sort(g.cliques.begin(), g.cliques.end());

  std::vector<std::size_t> disc(g.n, 0), low(g.n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  std::size_t timer = 0;
  for (std::size_t v = 0; v < g.n; ++v)
    if (disc[v] == 0) detail::biconnected_dfs(g, v, g.n, timer, disc, low, stack, g.biconnected);
  std::sort(g.biconnected.begin(), g.biconnected.end());

  std::vector<bool> seen(g.n, false);
  for (std::size_t s = 0; s < g.n; ++s) {
    if (seen[s]) continue;
    VertexSet comp, todo{s};
    seen[s] = true;
    while (!todo.empty()) {
      const std::size_t u = todo.back();
      todo.pop_back();
      comp.push_back(u);
      for (std::size_t v = 0; v < g.n; ++v)
        if (g.adj[u][v] && !seen[v]) seen[v] = true, todo.push_back(v);
    }
    std::sort(comp.begin(), comp.end());
    g.components.push_back(std::move(comp));
  }
  std::sort(g.components.begin(), g.components.end());
  return g;
}

/** DOT text with 1-based vertex labels. */
inline std::string graph_to_dot(const LinkGraph& g) {
  std::ostringstream os;
  os << "graph G {\n";
  for (std::size_t v = 0; v < g.n; ++v) os << "  " << v + 1 << ";\n";
  for (const auto& [a, b] : g.edges) os << "  " << a + 1 << " -- " << b + 1 << ";\n";
  os << "}\n";
  return os.str();
}

enum class ComponentKind { Edge, Star, TriangleStar };

inline const char* component_kind_name(ComponentKind k) {
  switch (k) {
    case ComponentKind::Edge: return "G1";
    case ComponentKind::Star: return "G_odd";
    case ComponentKind::TriangleStar: return "G_ev";
  }
  return "?";
}

struct ComponentShape {
  ComponentKind kind = ComponentKind::Edge;
  VertexSet vertices;
  /** Star centre; for a single edge its smaller vertex. */
  std::size_t center = 0;
};

struct ShapeReport {
  std::vector<ComponentShape> components;
  VertexSet singletons;
  std::size_t g1 = 0, g_odd = 0, g_ev = 0;
};

/**
 * @brief Classifies the nontrivial components of the graph of B_{nu,ell} and checks their counts:
 * one single edge iff n_1 is even, one star with 2 ell leaves per odd n_j (j >= 2), and one star with
 * 2 ell - 2 leaves plus a triangle at the centre per even n_j (j >= 2).
 */
inline ShapeReport component_shapes(const LinkGraph& g, const std::vector<long>& nu, long ell) {
  ShapeReport rep;
  const std::size_t L = 2 * static_cast<std::size_t>(ell);
  for (const auto& comp : g.components) {
    if (comp.size() == 1) {
      rep.singletons.push_back(comp[0]);
      continue;
    }
    std::size_t edges = 0, center = comp[0];
    for (std::size_t v : comp) {
      edges += g.degree(v);
      if (g.degree(v) > g.degree(center)) center = v;
    }
    edges /= 2;
    const std::size_t k = comp.size();
    ComponentShape s;
    s.vertices = comp;
    s.center = center;
    std::size_t deg1 = 0, deg2 = 0;
    for (std::size_t v : comp) {
      if (v == center) continue;
      if (g.degree(v) == 1) ++deg1;
      if (g.degree(v) == 2) ++deg2;
    }
    const bool hub = g.degree(center) == k - 1;
    if (k == 2 && edges == 1) {
      s.kind = ComponentKind::Edge;
      ++rep.g1;
    } else if (hub && edges == k - 1 && deg1 == k - 1 && k - 1 == L) {
      s.kind = ComponentKind::Star;
      ++rep.g_odd;
    } else if (hub && edges == k && deg2 == 2 && deg1 == k - 3 && k - 3 == L - 2) {
      s.kind = ComponentKind::TriangleStar;
      ++rep.g_ev;
    } else {
      fail(ErrorCode::ShapeMismatch, "component with " + std::to_string(k) + " vertices and " + std::to_string(edges) + " edges has no known shape");
    }
    rep.components.push_back(std::move(s));
  }
  std::size_t want_odd = 0, want_ev = 0;
  for (std::size_t j = 1; j < nu.size(); ++j) (nu[j] % 2 ? want_odd : want_ev) += 1;
  const std::size_t want_g1 = !nu.empty() && nu[0] % 2 == 0;
  if (rep.g1 != want_g1 || rep.g_odd != want_odd || rep.g_ev != want_ev)
    fail(ErrorCode::ShapeMismatch, "component counts (" + std::to_string(rep.g1) + ", " + std::to_string(rep.g_odd) + ", " +
                                       std::to_string(rep.g_ev) + ") differ from (" + std::to_string(want_g1) + ", " +
                                       std::to_string(want_odd) + ", " + std::to_string(want_ev) + ")");
  return rep;
}

/** Columns [P_i; I] of every plane in the set, side by side: a (4m+2) x (2m+1)|set| matrix. */
inline RatMatrix stacked_planes(const SubspaceFamily& fam, const VertexSet& set) {
  const std::size_t d = fam.dim();
  RatMatrix s = rat_zero(2 * d, d * set.size());
  for (std::size_t b = 0; b < set.size(); ++b) {
    const RatMatrix& p = fam.planes.at(set[b]);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) s[r][b * d + c] = p[r][c];
    for (std::size_t r = 0; r < d; ++r) s[d + r][b * d + r] = 1;
  }
  return s;
}

struct CliqueRank {
  VertexSet clique;
  std::size_t rank = 0;
};

struct HypothesisVerdict {
  /** Every biconnected component with at least 3 vertices is a clique. */
  bool cycles_in_cliques = true;
  /** Every maximal clique spans at most a hyperplane. */
  bool cliques_in_hyperplanes = true;
  std::vector<CliqueRank> ranks;
  std::vector<std::string> failures;

  bool ok() const { return cycles_in_cliques && cliques_in_hyperplanes; }
};

/** Checks only the cycle condition. */
inline HypothesisVerdict check_cycle_hypothesis(const LinkGraph& g) {
  HypothesisVerdict v;
  for (const auto& b : g.biconnected)
    if (b.size() >= 3 && !g.is_clique(b)) {
      v.cycles_in_cliques = false;
      std::string s = "biconnected component {";
      for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i] + 1);
      v.failures.push_back(s + "} is not a clique");
    }
  return v;
}

inline HypothesisVerdict check_hypotheses(const SubspaceFamily& fam, const LinkGraph& g) {
  if (fam.planes.size() != g.n) fail(ErrorCode::InvalidInput, "family and graph sizes differ");
  HypothesisVerdict v = check_cycle_hypothesis(g);
  const std::size_t bound = 4 * static_cast<std::size_t>(fam.m) + 1;
  for (const auto& c : g.cliques) {
    const std::size_t r = rat_rank(stacked_planes(fam, c));
    v.ranks.push_back({c, r});
    if (r > bound) {
      v.cliques_in_hyperplanes = false;
      v.failures.push_back("clique of size " + std::to_string(c.size()) + " spans rank " + std::to_string(r) + " > " + std::to_string(bound));
    }
  }
  return v;
}

struct MovedVertex {
  std::size_t vertex = 0;
  Rational eps = 0;
  Rational delta = 0;
};

struct ScheduleStep {
  VertexSet clique;
  std::size_t fixed = 0;
  std::vector<MovedVertex> moved;
  /** Integer normal of a hyperplane containing every plane of the clique. */
  std::vector<Rational> normal;
};

struct SeparationSchedule {
  std::vector<ScheduleStep> steps;
  /** Root vertex chosen in each connected component with edges. */
  VertexSet roots;
};

/** Kernel vector of the transposed stack, scaled to a primitive integer vector with positive leading entry. */
inline std::vector<Rational> hyperplane_normal(const SubspaceFamily& fam, const VertexSet& clique) {
  const RatMatrix s = stacked_planes(fam, clique);
  RatMatrix st = rat_zero(s[0].size(), s.size());
  for (std::size_t r = 0; r < s.size(); ++r)
    for (std::size_t c = 0; c < s[0].size(); ++c) st[c][r] = s[r][c];
  const auto ker = rat_kernel(std::move(st));
  if (ker.empty()) fail(ErrorCode::HypothesisFail, "clique spans the whole space");
  std::vector<Rational> n = ker.front();
  Int lcm_den = 1, gcd_num = 0;
  for (const auto& x : n) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(x));
  for (auto& x : n) {
    x *= lcm_den;
    gcd_num = boost::multiprecision::gcd(gcd_num, numerator(x));
  }
  for (auto& x : n) x /= gcd_num;
  const auto lead = std::find_if(n.begin(), n.end(), [](const Rational& x) { return x != 0; });
  if (*lead < 0)
    for (auto& x : n) x = -x;
  return n;
}

/**
 * @brief Leaf-first processing of the clique tree of each component.
 *
 * The root is the smallest vertex i0 of the component. Cliques containing i0 hang off the root, and cliques
 * meeting a current leaf hang off that leaf. Leaves are removed deepest first; each step fixes the one
 * vertex the leaf shares with another remaining clique (i0 when none is shared) and moves the rest.
 * Moved vertices get eps = 2^-(c+4), delta = 2^-(c+1), c counting moves, so both strictly decrease.
 */
inline SeparationSchedule separation_schedule(const SubspaceFamily& fam, const LinkGraph& g, bool require_connected = false) {
  const HypothesisVerdict v = check_hypotheses(fam, g);
  if (!v.ok()) fail(ErrorCode::HypothesisFail, v.failures.empty() ? "hypotheses fail" : v.failures.front());
  if (require_connected && g.components.size() > 1) fail(ErrorCode::NotConnected, "graph has " + std::to_string(g.components.size()) + " components");

  SeparationSchedule out;
  std::size_t moves = 0;
  for (const auto& comp : g.components) {
    if (comp.size() == 1) continue;
    const std::size_t i0 = comp.front();
    std::vector<std::size_t> ids;
    for (std::size_t c = 0; c < g.cliques.size(); ++c)
      if (std::binary_search(comp.begin(), comp.end(), g.cliques[c].front())) ids.push_back(c);
    auto contains = [&](std::size_t c, std::size_t vtx) { return std::binary_search(g.cliques[c].begin(), g.cliques[c].end(), vtx); };
    auto meets = [&](std::size_t a, std::size_t b) {
      for (std::size_t x : g.cliques[a])
        if (contains(b, x)) return true;
      return false;
    };

    // Tree over clique ids; the root is represented by parent = npos.
    const std::size_t npos = static_cast<std::size_t>(-1);
    std::map<std::size_t, std::size_t> parent, depth;
    std::map<std::size_t, std::size_t> children;
    for (std::size_t c : ids)
      if (contains(c, i0)) parent[c] = npos, depth[c] = 1, children[c] = 0;
    for (bool grown = true; grown;) {
      grown = false;
      std::vector<std::size_t> leaves;
      for (const auto& [c, n] : children)
        if (n == 0) leaves.push_back(c);
      for (std::size_t c : ids) {
        if (parent.count(c)) continue;
        for (std::size_t leaf : leaves)
          if (meets(c, leaf)) {
            parent[c] = leaf;
            depth[c] = depth[leaf] + 1;
            children[c] = 0;
            ++children[leaf];
            grown = true;
            break;
          }
      }
    }
    if (parent.size() != ids.size()) fail(ErrorCode::NotConnected, "clique tree does not reach every clique of the component");

    std::set<std::size_t> remaining(ids.begin(), ids.end());
    while (!remaining.empty()) {
      std::size_t leaf = npos;
      for (std::size_t c : remaining)
        if (children[c] == 0 && (leaf == npos || depth[c] > depth[leaf])) leaf = c;
      std::vector<std::size_t> shared;
      for (std::size_t x : g.cliques[leaf])
        for (std::size_t c : remaining)
          if (c != leaf && contains(c, x)) {
            shared.push_back(x);
            break;
          }
      std::size_t fixed;
      if (shared.size() == 1) fixed = shared[0];
      else if (shared.empty() && contains(leaf, i0)) fixed = i0;
      else fail(ErrorCode::HypothesisFail, "leaf clique shares " + std::to_string(shared.size()) + " vertices with the remaining cliques");

      ScheduleStep step;
      step.clique = g.cliques[leaf];
      step.fixed = fixed;
      for (std::size_t x : step.clique) {
        if (x == fixed) continue;
        step.moved.push_back({x, Rational(1, Int(1) << (moves + 4)), Rational(1, Int(1) << (moves + 1))});
        ++moves;
      }
      step.normal = hyperplane_normal(fam, step.clique);
      out.steps.push_back(std::move(step));
      remaining.erase(leaf);
      if (parent[leaf] != npos) --children[parent[leaf]];
    }
    out.roots.push_back(i0);
  }
  return out;
}

}  // namespace ricci_forge
