#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ricci_forge/curvature.hpp"
#include "ricci_forge/error.hpp"
#include "ricci_forge/linking.hpp"
#include "ricci_forge/profile.hpp"
#include "ricci_forge/skewalg.hpp"

namespace ricci_forge {

using json = nlohmann::json;

namespace detail {

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline double get_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) fail(ErrorCode::InvalidInput, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace detail

inline json piece_to_json(const Piece& p) {
  json params = std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::Constant>) {
          return {{"c", k.c}};
        } else if constexpr (std::is_same_v<K, kinds::Linear>) {
          return {{"c0", k.c0}, {"c1", k.c1}};
        } else if constexpr (std::is_same_v<K, kinds::TrigCos> || std::is_same_v<K, kinds::TrigSin>) {
          return {{"amplitude", k.amplitude}, {"frequency", k.frequency}, {"phase", k.phase}, {"offset", k.offset}};
        } else if constexpr (std::is_same_v<K, kinds::HyperbolicMix>) {
          return {{"c1", k.c1}, {"c2", k.c2}, {"scale", k.scale}, {"center", k.center}};
        } else if constexpr (std::is_same_v<K, kinds::CubicPolynomial>) {
          return {{"coeffs", std::vector<double>(k.c.begin(), k.c.end())}, {"origin", k.origin}};
        } else if constexpr (std::is_same_v<K, kinds::Polynomial>) {
          return {{"coeffs", k.c}, {"origin", k.origin}};
        } else if constexpr (std::is_same_v<K, kinds::LogOfProfile>) {
          return {{"factor", k.factor}, {"offset", k.offset}, {"inner", piece_to_json(*k.inner)}};
        } else {
          return {{"knots", k.knots}, {"values", k.values}};
        }
      },
      p.fn);
  return {{"kind", kind_name(p.fn)}, {"lo", p.lo}, {"hi", p.hi}, {"params", params}};
}

inline Piece piece_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("params")) fail(ErrorCode::InvalidInput, "piece needs kind and params");
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = j.at("params");
  Piece out;
  out.lo = detail::get_number(j, "lo");
  out.hi = detail::get_number(j, "hi");
  using detail::get_number;
  if (kind == "Constant") {
    out.fn = kinds::Constant{get_number(p, "c")};
  } else if (kind == "Linear") {
    out.fn = kinds::Linear{get_number(p, "c0"), get_number(p, "c1")};
  } else if (kind == "TrigCos") {
    out.fn = kinds::TrigCos{get_number(p, "amplitude"), get_number(p, "frequency"), get_number(p, "phase"), p.value("offset", 0.0)};
  } else if (kind == "TrigSin") {
    out.fn = kinds::TrigSin{get_number(p, "amplitude"), get_number(p, "frequency"), get_number(p, "phase"), p.value("offset", 0.0)};
  } else if (kind == "HyperbolicMix") {
    out.fn = kinds::HyperbolicMix{get_number(p, "c1"), get_number(p, "c2"), get_number(p, "scale"), get_number(p, "center")};
  } else if (kind == "CubicPolynomial") {
    const auto c = p.at("coeffs").get<std::vector<double>>();
    if (c.size() != 4) fail(ErrorCode::InvalidInput, "CubicPolynomial needs exactly 4 coefficients");
    out.fn = kinds::CubicPolynomial{{c[0], c[1], c[2], c[3]}, get_number(p, "origin")};
  } else if (kind == "Polynomial") {
    out.fn = kinds::Polynomial{p.at("coeffs").get<std::vector<double>>(), get_number(p, "origin")};
  } else if (kind == "LogOfProfile") {
    out.fn = kinds::LogOfProfile{std::make_shared<const Piece>(piece_from_json(p.at("inner"))), get_number(p, "factor"),
                                 get_number(p, "offset")};
  } else if (kind == "Sampled") {
    out.fn = make_sampled(p.at("knots").get<std::vector<double>>(), p.at("values").get<std::vector<double>>());
  } else {
    fail(ErrorCode::InvalidInput, "unknown piece kind '" + kind + "'");
  }
  return out;
}

inline json profile_to_json(const Profile& p) {
  json pieces = json::array();
  for (const auto& pc : p.pieces()) pieces.push_back(piece_to_json(pc));
  return {{"version", 1}, {"pieces", pieces}};
}

inline Profile profile_from_json(const json& j) {
  if (!j.is_object() || j.value("version", 0) != 1 || !j.contains("pieces")) fail(ErrorCode::InvalidInput, "profile JSON needs version 1 and pieces");
  std::vector<Piece> pieces;
  for (const auto& pj : j.at("pieces")) pieces.push_back(piece_from_json(pj));
  return Profile(std::move(pieces));
}

inline json q_to_json(const QValue& q) { return q.is_infinite() ? json("inf") : json(q.value()); }

inline QValue q_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return QValue::infinity();
    fail(ErrorCode::InvalidInput, "q must be a positive number or \"inf\"");
  }
  if (!j.is_number()) fail(ErrorCode::InvalidInput, "q must be a positive number or \"inf\"");
  return QValue(j.get<double>());
}

inline json spec_to_json(const WeightedWarpedSpec& s) {
  return {{"version", 1},
          {"a", s.a},
          {"b", s.b},
          {"q", q_to_json(s.q)},
          {"alpha", profile_to_json(s.alpha)},
          {"beta", profile_to_json(s.beta)},
          {"f", profile_to_json(s.f)}};
}

inline WeightedWarpedSpec spec_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "spec JSON must be an object");
  WeightedWarpedSpec s;
  s.a = j.at("a").get<int>();
  s.b = j.at("b").get<int>();
  s.q = q_from_json(j.at("q"));
  s.alpha = profile_from_json(j.at("alpha"));
  s.beta = profile_from_json(j.at("beta"));
  s.f = profile_from_json(j.at("f"));
  s.validate();
  return s;
}

inline json ricci_to_json(const RicciValues& r) {
  return {{"rtt", detail::number_or_null(r.rtt)},
          {"ruu", detail::number_or_null(r.ruu)},
          {"rvv", detail::number_or_null(r.rvv)},
          {"ruv", detail::number_or_null(r.ruv)}};
}

inline json report_to_json(const CurvatureReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    json e = ricci_to_json(s.values);
    e["t"] = s.t;
    samples.push_back(std::move(e));
  }
  return {{"criterion", r.criterion},
          {"min_margin", detail::number_or_null(r.min_margin)},
          {"argmin_t", r.argmin_t},
          {"verdict", r.pass ? "pass" : "fail"},
          {"samples", samples}};
}

/** The report without its samples, for artifacts of long scans. */
inline json report_summary_to_json(const CurvatureReport& r) {
  return {{"criterion", r.criterion},
          {"min_margin", detail::number_or_null(r.min_margin)},
          {"argmin_t", r.argmin_t},
          {"sample_count", r.samples.size()},
          {"verdict", r.pass ? "pass" : "fail"}};
}

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string report_to_csv(const CurvatureReport& r) {
  std::ostringstream out;
  out << "t,rtt,ruu,rvv,ruv,margin\n";
  for (const auto& s : r.samples)
    out << format_double(s.t) << ',' << format_double(s.values.rtt) << ',' << format_double(s.values.ruu) << ','
        << format_double(s.values.rvv) << ',' << format_double(s.values.ruv) << ',' << format_double(s.margin) << '\n';
  return out.str();
}

/** Writes to a temporary sibling and renames, so readers never see a partial file. */
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::InvalidInput, "cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) fail(ErrorCode::InvalidInput, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::InvalidInput, "cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidInput, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Exact algebra

/** Integers that fit in 64 bits become JSON numbers, larger ones decimal strings. */
inline json int_to_json(const Int& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return json(static_cast<std::int64_t>(x));
  return json(x.str());
}

inline Int int_from_json(const json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return Int(j.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  fail(ErrorCode::InvalidInput, "expected an integer, got " + j.dump());
}

inline json int_vector_to_json(const std::vector<Int>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(int_to_json(x));
  return a;
}

inline std::vector<Int> int_vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "expected an array of integers");
  std::vector<Int> v;
  for (const auto& x : j) v.push_back(int_from_json(x));
  return v;
}

inline json int_matrix_to_json(const IntMatrix& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(int_vector_to_json(row));
  return a;
}

inline IntMatrix int_matrix_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, "expected a matrix as an array of rows");
  IntMatrix m;
  for (const auto& row : j) m.push_back(int_vector_from_json(row));
  return m;
}

/** Accepts a bare array of rows or an object with a "matrix" field. */
inline SkewIntMatrix skew_from_json(const json& j) {
  return SkewIntMatrix(int_matrix_from_json(j.is_object() && j.contains("matrix") ? j.at("matrix") : j));
}

inline std::string rational_to_string(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

/** Parses "p", "p/q" or a finite decimal such as "0.001" exactly. */
inline Rational rational_from_string(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const Int q(s.substr(slash + 1));
      if (q == 0) fail(ErrorCode::InvalidInput, "zero denominator in " + s);
      return Rational(Int(s.substr(0, slash)), q);
    }
    const auto dot = s.find('.');
    if (dot != std::string::npos) {
      const std::string frac = s.substr(dot + 1);
      Int den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      const std::string whole = s.substr(0, dot);
      const bool neg = !whole.empty() && whole[0] == '-';
      const Int w(whole.empty() || whole == "-" ? std::string("0") : whole);
      const Rational f(frac.empty() ? Int(0) : Int(frac), den);
      return neg ? Rational(w) - f : Rational(w) + f;
    }
    return Rational(Int(s));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidInput, "not a rational number: " + s);
  }
}

inline json normal_form_to_json(const SkewNormalFormResult& r) {
  return {{"blocks", int_vector_to_json(r.form.blocks)}, {"zero_count", r.form.zero_count}, {"T", int_matrix_to_json(r.T)}};
}

inline json rat_matrix_to_json(const RatMatrix& m) {
  json a = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& x : row) r.push_back(rational_to_string(x));
    a.push_back(std::move(r));
  }
  return a;
}

inline json family_to_json(const SubspaceFamily& f) {
  json planes = json::array();
  for (const auto& p : f.planes) planes.push_back(rat_matrix_to_json(p));
  return {{"m", f.m}, {"eps", rational_to_string(f.eps)}, {"nu", f.nu}, {"ell", f.ell}, {"planes", planes}};
}

namespace detail {

inline json one_based(const VertexSet& s) {
  json a = json::array();
  for (auto v : s) a.push_back(v + 1);
  return a;
}

inline json one_based(const std::vector<VertexSet>& sets) {
  json a = json::array();
  for (const auto& s : sets) a.push_back(one_based(s));
  return a;
}

}  // namespace detail

inline json intersection_to_json(const IntersectionTable& t) {
  json over = json::array();
  for (const auto& [i, j] : t.oversized) over.push_back({i + 1, j + 1, t.dim[i][j]});
  return {{"matrix", int_matrix_to_json(t.matrix.rows())}, {"dim", t.dim}, {"oversized", over}};
}

/** Vertex labels are 1-based, matching the DOT output. */
inline json graph_to_json(const LinkGraph& g) {
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a + 1, b + 1});
  return {{"vertices", g.n},
          {"edges", edges},
          {"cliques", detail::one_based(g.cliques)},
          {"biconnected", detail::one_based(g.biconnected)},
          {"components", detail::one_based(g.components)}};
}

inline json shapes_to_json(const ShapeReport& s) {
  json comps = json::array();
  for (const auto& c : s.components)
    comps.push_back({{"kind", component_kind_name(c.kind)}, {"center", c.center + 1}, {"vertices", detail::one_based(c.vertices)}});
  return {{"G1", s.g1}, {"G_odd", s.g_odd}, {"G_ev", s.g_ev}, {"singletons", detail::one_based(s.singletons)}, {"components", comps}};
}

inline json hypotheses_to_json(const HypothesisVerdict& v) {
  json ranks = json::array();
  for (const auto& r : v.ranks) ranks.push_back({{"clique", detail::one_based(r.clique)}, {"rank", r.rank}});
  return {{"cycles_in_cliques", v.cycles_in_cliques},
          {"cliques_in_hyperplanes", v.cliques_in_hyperplanes},
          {"verdict", v.ok() ? "pass" : "fail"},
          {"clique_ranks", ranks},
          {"failures", v.failures}};
}

inline json schedule_to_json(const SeparationSchedule& s) {
  json steps = json::array();
  for (const auto& st : s.steps) {
    json moved = json::array();
    for (const auto& mv : st.moved)
      moved.push_back({{"vertex", mv.vertex + 1}, {"eps", rational_to_string(mv.eps)}, {"delta", rational_to_string(mv.delta)}});
    json normal = json::array();
    for (const auto& x : st.normal) normal.push_back(rational_to_string(x));
    steps.push_back({{"clique", detail::one_based(st.clique)}, {"fixed", st.fixed + 1}, {"moved", moved}, {"normal", normal}});
  }
  return {{"roots", detail::one_based(s.roots)}, {"steps", steps}};
}

inline json eqf_to_json(const ExtendedQuadraticForm& f) {
  json mu = json::array();
  for (const auto& m : f.mu) mu.push_back(int_vector_to_json(m));
  return {{"rank", f.rank},
          {"lambda", int_matrix_to_json(f.lambda.rows())},
          {"coeff_group", int_vector_to_json(f.coeff_group.factors)},
          {"p_image", int_vector_to_json(f.p_image)},
          {"mu", mu}};
}

inline ExtendedQuadraticForm eqf_from_json(const json& j) {
  ExtendedQuadraticForm f;
  f.lambda = skew_from_json(j.at("lambda"));
  f.rank = f.lambda.n();
  f.coeff_group.factors = j.contains("coeff_group") ? int_vector_from_json(j.at("coeff_group")) : std::vector<Int>{};
  f.p_image = j.contains("p_image") ? int_vector_from_json(j.at("p_image")) : f.coeff_group.zero();
  if (j.contains("mu"))
    for (const auto& m : j.at("mu")) f.mu.push_back(int_vector_from_json(m));
  else
    f.mu.assign(f.rank, f.coeff_group.zero());
  f.validate();
  return f;
}

}  // namespace ricci_forge
