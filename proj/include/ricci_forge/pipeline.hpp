#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ricci_forge/constructions.hpp"
#include "ricci_forge/io.hpp"
#include "ricci_forge/linking.hpp"
#include "ricci_forge/skewalg.hpp"

namespace ricci_forge {

inline constexpr const char* kPipelineSchema = "ricci-forge/pipeline-report/1";

struct TotGeodConfig {
  double r = 1.0;
  double t0 = 1.0;
  double mu = 0.01;
  double f0 = 0.0;
  ATensorBounds A{0.2, 0.2, 0.1};
  QValue q = QValue::infinity();
  int a = 2;
  int b = 2;
};

struct IsotopyConfig {
  double c = 1.0;
  double C = 5.0;
  int n = 5;
  double lambda = 2.0;
};

struct CollapseConfig {
  int a = 2;
  int b = 2;
  double lambda3 = 1.0;
  double mu = 0.1;
  double eps = 0.05;
};

struct UnlinkConfig {
  double nu = 1.05;
  int max_halvings = 12;
};

/** Coefficient data of the extended quadratic form on the basis of B; required when m != 1. */
struct CoefficientData {
  AbelianGroup group;
  std::vector<Int> p_image;
  std::vector<std::vector<Int>> mu;
};

struct PipelineConfig {
  std::vector<long> nu;
  int m = 1;
  /** Unset means the smallest admissible ell. */
  std::optional<long> ell;
  Rational eps_link = Rational(1, 1000);
  TotGeodConfig tot_geod;
  IsotopyConfig isotopy;
  CollapseConfig collapse;
  UnlinkConfig unlink;
  std::optional<CoefficientData> coefficients;
  /** Empty means no artifacts are written. */
  std::filesystem::path out_dir;
  int threads = 1;
};

enum class StageStatus { Pass, Fail, Skipped };

inline const char* stage_status_name(StageStatus s) {
  switch (s) {
    case StageStatus::Pass: return "pass";
    case StageStatus::Fail: return "fail";
    case StageStatus::Skipped: return "skipped";
  }
  return "fail";
}

struct StageResult {
  std::string name;
  StageStatus status = StageStatus::Skipped;
  std::string error;
  std::string message;
  std::vector<std::string> artifacts;
  json summary = json::object();
  double seconds = 0.0;
};

struct PipelineReport {
  std::vector<StageResult> stages;
  bool pass = false;
  std::string first_failure;
  double seconds = 0.0;
  json config = json::object();

  const StageResult* stage(const std::string& name) const {
    for (const auto& s : stages)
      if (s.name == name) return &s;
    return nullptr;
  }

  /** Timings are left out so that the artifact is reproducible byte for byte. */
  json to_json() const {
    json st = json::array();
    for (const auto& s : stages) {
      json e = {{"name", s.name}, {"status", stage_status_name(s.status)}, {"artifacts", s.artifacts}, {"summary", s.summary}};
      if (!s.error.empty()) e["error"] = s.error;
      if (!s.message.empty()) e["message"] = s.message;
      st.push_back(std::move(e));
    }
    json j = {{"schema", kPipelineSchema}, {"config", config}, {"stages", st}, {"verdict", pass ? "pass" : "fail"}};
    if (!first_failure.empty()) j["first_failure"] = first_failure;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Config serialization

inline json pipeline_config_to_json(const PipelineConfig& c) {
  json j = {{"nu", c.nu},
            {"m", c.m},
            {"eps_link", rational_to_string(c.eps_link)},
            {"tot_geod",
             {{"r", c.tot_geod.r},
              {"t0", c.tot_geod.t0},
              {"mu", c.tot_geod.mu},
              {"f0", c.tot_geod.f0},
              {"A", {c.tot_geod.A.AuAu, c.tot_geod.A.AvAv, c.tot_geod.A.deltaA}},
              {"q", q_to_json(c.tot_geod.q)},
              {"a", c.tot_geod.a},
              {"b", c.tot_geod.b}}},
            {"isotopy", {{"c", c.isotopy.c}, {"C", c.isotopy.C}, {"n", c.isotopy.n}, {"lambda", c.isotopy.lambda}}},
            {"collapse",
             {{"a", c.collapse.a}, {"b", c.collapse.b}, {"lambda3", c.collapse.lambda3}, {"mu", c.collapse.mu}, {"eps", c.collapse.eps}}},
            {"unlink", {{"nu", c.unlink.nu}, {"max_halvings", c.unlink.max_halvings}}}};
  j["ell"] = c.ell ? json(*c.ell) : json(nullptr);
  if (c.coefficients) {
    json mu = json::array();
    for (const auto& m : c.coefficients->mu) mu.push_back(int_vector_to_json(m));
    j["coefficients"] = {{"coeff_group", int_vector_to_json(c.coefficients->group.factors)},
                         {"p_image", int_vector_to_json(c.coefficients->p_image)},
                         {"mu", mu}};
  }
  return j;
}

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::InvalidInput, std::string("bad value for config field '") + key + "'");
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(ErrorCode::InvalidInput, "unknown config field '" + key + "' in " + where);
  }
}

}  // namespace detail

/** Reads a config; missing fields keep their defaults, unknown fields are rejected. */
inline PipelineConfig pipeline_config_from_json(const json& j) {
  detail::reject_unknown(j, {"nu", "m", "ell", "eps_link", "tot_geod", "isotopy", "collapse", "unlink", "coefficients", "threads"}, "config");
  PipelineConfig c;
  detail::read_field(j, "nu", c.nu);
  detail::read_field(j, "m", c.m);
  detail::read_field(j, "threads", c.threads);
  if (j.contains("ell") && !j.at("ell").is_null()) {
    long ell = 0;
    detail::read_field(j, "ell", ell);
    c.ell = ell;
  }
  if (j.contains("eps_link")) {
    const json& e = j.at("eps_link");
    c.eps_link = e.is_string() ? rational_from_string(e.get<std::string>()) : rational_from_string(e.dump());
  }
  if (j.contains("tot_geod")) {
    const json& t = j.at("tot_geod");
    detail::reject_unknown(t, {"r", "t0", "mu", "f0", "A", "q", "a", "b"}, "tot_geod");
    detail::read_field(t, "r", c.tot_geod.r);
    detail::read_field(t, "t0", c.tot_geod.t0);
    detail::read_field(t, "mu", c.tot_geod.mu);
    detail::read_field(t, "f0", c.tot_geod.f0);
    detail::read_field(t, "a", c.tot_geod.a);
    detail::read_field(t, "b", c.tot_geod.b);
    if (t.contains("q")) c.tot_geod.q = q_from_json(t.at("q"));
    if (t.contains("A")) {
      std::vector<double> a;
      detail::read_field(t, "A", a);
      if (a.size() != 3) fail(ErrorCode::InvalidInput, "tot_geod.A needs three entries");
      c.tot_geod.A = ATensorBounds{a[0], a[1], a[2]};
    }
  }
  if (j.contains("isotopy")) {
    const json& t = j.at("isotopy");
    detail::reject_unknown(t, {"c", "C", "n", "lambda"}, "isotopy");
    detail::read_field(t, "c", c.isotopy.c);
    detail::read_field(t, "C", c.isotopy.C);
    detail::read_field(t, "n", c.isotopy.n);
    detail::read_field(t, "lambda", c.isotopy.lambda);
  }
  if (j.contains("collapse")) {
    const json& t = j.at("collapse");
    detail::reject_unknown(t, {"a", "b", "lambda3", "mu", "eps"}, "collapse");
    detail::read_field(t, "a", c.collapse.a);
    detail::read_field(t, "b", c.collapse.b);
    detail::read_field(t, "lambda3", c.collapse.lambda3);
    detail::read_field(t, "mu", c.collapse.mu);
    detail::read_field(t, "eps", c.collapse.eps);
  }
  if (j.contains("unlink")) {
    const json& t = j.at("unlink");
    detail::reject_unknown(t, {"nu", "max_halvings"}, "unlink");
    detail::read_field(t, "nu", c.unlink.nu);
    detail::read_field(t, "max_halvings", c.unlink.max_halvings);
  }
  if (j.contains("coefficients")) {
    const json& t = j.at("coefficients");
    detail::reject_unknown(t, {"coeff_group", "p_image", "mu"}, "coefficients");
    CoefficientData d;
    d.group.factors = int_vector_from_json(t.at("coeff_group"));
    d.p_image = t.contains("p_image") ? int_vector_from_json(t.at("p_image")) : d.group.zero();
    if (t.contains("mu"))
      for (const auto& m : t.at("mu")) d.mu.push_back(int_vector_from_json(m));
    c.coefficients = std::move(d);
  }
  return c;
}

/** Checks the config invariants and resolves the default ell. */
inline long resolve_ell(const PipelineConfig& c) {
  if (c.nu.empty()) fail(ErrorCode::InvalidInput, "nu must be nonempty");
  for (long n : c.nu)
    if (n < 1) fail(ErrorCode::InvalidInput, "nu entries must be positive");
  if (c.m < 1) fail(ErrorCode::InvalidInput, "m must be positive");
  if (!(c.eps_link > 0)) fail(ErrorCode::InvalidInput, "eps_link must be positive");
  const long ell = c.ell ? *c.ell : minimal_ell(c.nu);
  check_ell_bound(c.nu, ell);
  return ell;
}

// ---------------------------------------------------------------------------
// Run

namespace detail {

struct PipelineState {
  long ell = 0;
  SkewIntMatrix B;
  SkewNormalFormResult normal;
  SubspaceFamily family;
  LinkGraph graph;
  SeparationSchedule schedule;
};

inline std::string dump_artifact(const json& j) { return j.dump(2) + "\n"; }

inline json unlink_entry(const MovedVertex& mv, double eps, double delta, int halvings, const UnlinkResult& r) {
  return {{"vertex", mv.vertex + 1},
          {"declared_eps", rational_to_string(mv.eps)},
          {"declared_delta", rational_to_string(mv.delta)},
          {"eps", eps},
          {"delta", delta},
          {"halvings", halvings},
          {"delta_s", r.field.delta_s},
          {"rho", r.report.rho},
          {"min_margin", r.report.min_margin},
          {"argmin_t", r.report.argmin_t},
          {"argmin_s", r.report.argmin_s},
          {"tt_bound_holds", r.report.tt_bound_holds},
          {"verdict", r.report.pass ? "pass" : "fail"}};
}

}  // namespace detail

/**
 * Runs the stages in order. A stage whose inputs come from a failed or skipped stage is skipped; the
 * neck suite depends on nothing and always runs.
 */
inline PipelineReport run_pipeline(const PipelineConfig& config) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  PipelineReport rep;
  rep.config = pipeline_config_to_json(config);
  detail::PipelineState st;

  auto write = [&](StageResult& s, const std::string& file, const std::string& content) {
    s.artifacts.push_back(file);
    if (!config.out_dir.empty()) write_atomic(config.out_dir / file, content);
  };

  auto run_stage = [&](const std::string& name, std::vector<std::string> deps, const std::function<void(StageResult&)>& body) {
    StageResult s;
    s.name = name;
    for (const auto& d : deps) {
      const StageResult* dep = rep.stage(d);
      if (!dep || dep->status != StageStatus::Pass) {
        s.status = StageStatus::Skipped;
        s.message = "depends on " + d;
        rep.stages.push_back(std::move(s));
        return;
      }
    }
    const auto t0 = clock::now();
    try {
      body(s);
      s.status = StageStatus::Pass;
    } catch (const Error& e) {
      s.status = StageStatus::Fail;
      s.error = error_name(e.code());
      s.message = e.what();
    } catch (const std::exception& e) {
      s.status = StageStatus::Fail;
      s.error = error_name(ErrorCode::StageFailure);
      s.message = e.what();
    }
    s.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    if (s.status == StageStatus::Fail && rep.first_failure.empty()) rep.first_failure = name + ": " + s.error;
    rep.stages.push_back(std::move(s));
  };

  run_stage("matrix", {}, [&](StageResult& s) {
    st.ell = resolve_ell(config);
    st.B = build_B(config.nu, st.ell);
    s.summary = {{"ell", st.ell}, {"size", st.B.n()}};
    write(s, "B.json", detail::dump_artifact({{"nu", config.nu}, {"ell", st.ell}, {"matrix", int_matrix_to_json(st.B.rows())}}));
  });

  run_stage("normal_form", {"matrix"}, [&](StageResult& s) {
    st.normal = skew_normal_form(st.B);
    if (!(congruence(st.normal.T, st.B) == st.normal.form.matrix()))
      fail(ErrorCode::StageFailure, "witness does not carry B to its normal form");
    const Int det = determinant(st.normal.T);
    if (det != 1 && det != -1) fail(ErrorCode::StageFailure, "witness is not unimodular");
    std::vector<Int> expected(static_cast<std::size_t>(st.ell) * config.nu.size() - config.nu.size(), Int(1));
    for (long n : config.nu) expected.push_back(Int(n));
    const bool matches = congruent(st.normal.form.matrix(), diag_form(st.B.n(), expected));
    if (!matches) fail(ErrorCode::StageFailure, "normal form is not congruent to D(1, ..., 1, n_1, ..., n_k)");
    s.summary = {{"blocks", int_vector_to_json(st.normal.form.blocks)}, {"zero_count", st.normal.form.zero_count}, {"expected", int_vector_to_json(expected)}};
    write(s, "normal_form.json", detail::dump_artifact(normal_form_to_json(st.normal)));
  });

  run_stage("realization", {"matrix"}, [&](StageResult& s) {
    st.family = build_subspaces(config.nu, st.ell, config.m, config.eps_link);
    const IntersectionTable t = intersection_matrix(st.family, IntersectionCheck::Report);
    write(s, "family.json", detail::dump_artifact(family_to_json(st.family)));
    write(s, "intersection.json", detail::dump_artifact(intersection_to_json(t)));
    if (!(t.matrix == st.B)) fail(ErrorCode::StageFailure, "intersection matrix differs from B");
    s.summary = {{"planes", st.family.planes.size()}, {"dim", st.family.dim()}, {"oversized_pairs", t.oversized.size()}};
  });

  run_stage("graph", {"realization"}, [&](StageResult& s) {
    st.graph = build_graph(intersection_matrix(st.family, IntersectionCheck::Report).matrix);
    write(s, "graph.dot", graph_to_dot(st.graph));
    json j = graph_to_json(st.graph);
    const HypothesisVerdict v = check_hypotheses(st.family, st.graph);
    j["hypotheses"] = hypotheses_to_json(v);
    try {
      j["shapes"] = shapes_to_json(component_shapes(st.graph, config.nu, st.ell));
    } catch (const Error& e) {
      j["shapes"] = {{"error", error_name(e.code())}, {"message", e.what()}};
      write(s, "graph.json", detail::dump_artifact(j));
      throw;
    }
    write(s, "graph.json", detail::dump_artifact(j));
    s.summary = {{"edges", st.graph.edges.size()}, {"cliques", st.graph.cliques.size()}, {"shapes", j["shapes"]}, {"hypotheses", v.ok() ? "pass" : "fail"}};
    if (!v.ok()) fail(ErrorCode::HypothesisFail, v.failures.empty() ? "hypotheses fail" : v.failures.front());
  });

  run_stage("schedule", {"graph"}, [&](StageResult& s) {
    st.schedule = separation_schedule(st.family, st.graph);
    std::size_t moved = 0;
    for (const auto& step : st.schedule.steps) moved += step.moved.size();
    s.summary = {{"steps", st.schedule.steps.size()}, {"moved", moved}};
    write(s, "schedule.json", detail::dump_artifact(schedule_to_json(st.schedule)));
  });

  run_stage("unlink", {"schedule"}, [&](StageResult& s) {
    // Outcome per tried (eps, delta); halving keeps delta > 6 eps, so later vertices can hit cached pairs.
    std::map<std::pair<double, double>, std::optional<UnlinkResult>> cache;
    json entries = json::array();
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& step : st.schedule.steps)
      for (const auto& mv : step.moved) {
        double eps = static_cast<double>(mv.eps), delta = static_cast<double>(mv.delta);
        std::string last_error;
        bool done = false;
        for (int h = 0; h <= config.unlink.max_halvings && !done; ++h, eps /= 2, delta /= 2) {
          auto it = cache.find({eps, delta});
          if (it == cache.end()) {
            std::optional<UnlinkResult> r;
            try {
              r = unlink_field(config.m, eps, delta, config.unlink.nu, config.threads);
            } catch (const Error& e) {
              last_error = e.what();
            }
            it = cache.emplace(std::make_pair(eps, delta), std::move(r)).first;
          }
          if (it->second) {
            entries.push_back(detail::unlink_entry(mv, eps, delta, h, *it->second));
            worst = std::min(worst, it->second->report.min_margin);
            done = true;
          }
        }
        if (!done)
          fail(ErrorCode::PositivityFail, "vertex " + std::to_string(mv.vertex + 1) + " did not certify within " +
                                              std::to_string(config.unlink.max_halvings) + " halvings: " + last_error);
      }
    s.summary = {{"certified", entries.size()}, {"min_margin", detail::number_or_null(worst)}};
    write(s, "unlink.json", detail::dump_artifact({{"m", config.m}, {"nu", config.unlink.nu}, {"vertices", entries}}));
  });

  run_stage("neck_suite", {}, [&](StageResult& s) {
    const auto& tg = config.tot_geod;
    const TotGeodResult t = tot_geod_profiles(tg.r, tg.t0, tg.mu, tg.f0, tg.A, tg.q, tg.a, tg.b, config.threads);
    write(s, "tot_geod_spec.json", detail::dump_artifact(spec_to_json(t.spec)));
    json tj = report_summary_to_json(t.report);
    tj["lambda"] = t.lambda;
    tj["t_lambda"] = t.t_lambda;
    write(s, "tot_geod_report.json", detail::dump_artifact(tj));

    const auto& ic = config.isotopy;
    const IsotopyParams iso = isotopy_params(ic.c, ic.C, ic.n, ic.lambda);
    const Profile ramp = chi_ramp(iso.a);
    write(s, "isotopy.json", detail::dump_artifact({{"a", iso.a},
                                                     {"k", iso.k},
                                                     {"C_prime", iso.C_prime},
                                                     {"ric_tt", iso.ric_tt},
                                                     {"mixed", iso.mixed},
                                                     {"ric_vv", iso.ric_vv},
                                                     {"chi", profile_to_json(ramp)}}));

    const auto& cc = config.collapse;
    const CollapseResult col = collapse_profiles(cc.a, cc.b, cc.lambda3, cc.mu, cc.eps, config.threads);
    write(s, "collapse_spec.json", detail::dump_artifact(spec_to_json(col.spec)));
    write(s, "collapse_report.json", detail::dump_artifact(report_summary_to_json(col.report)));

    const bool iso_ok = iso.ric_tt > 0.0 && iso.ric_vv > 0.0 && iso.ric_tt * iso.ric_vv > iso.mixed * iso.mixed;
    s.summary = {{"tot_geod", {{"min_margin", detail::number_or_null(t.report.min_margin)}, {"verdict", t.report.pass ? "pass" : "fail"}}},
                 {"isotopy", {{"a", iso.a}, {"verdict", iso_ok ? "pass" : "fail"}}},
                 {"collapse", {{"min_margin", detail::number_or_null(col.report.min_margin)}, {"verdict", col.report.pass ? "pass" : "fail"}}}};
    if (!t.report.pass) fail(ErrorCode::PositivityFail, "tot_geod profiles fail the positivity scan");
    if (!iso_ok) fail(ErrorCode::PositivityFail, "isotopy estimates are not positive definite");
    if (!col.report.pass) fail(ErrorCode::PositivityFail, "collapse profiles fail the positivity scan");
  });

  run_stage("eqf", {"normal_form"}, [&](StageResult& s) {
    ExtendedQuadraticForm form;
    if (config.coefficients) {
      form.rank = st.B.n();
      form.lambda = st.B;
      form.coeff_group = config.coefficients->group;
      form.p_image = config.coefficients->p_image;
      form.mu = config.coefficients->mu;
    } else if (config.m == 1) {
      form = trivial_eqf(st.B);
    } else {
      fail(ErrorCode::InvalidInput, "m != 1 needs explicit coefficient data");
    }
    form.validate();
    const ExtendedQuadraticForm moved = eqf_change_basis(form, st.normal.T);
    if (!(moved.lambda == st.normal.form.matrix())) fail(ErrorCode::StageFailure, "transported form is not the normal form");
    const ExtendedQuadraticForm back = eqf_change_basis(moved, unimodular_inverse(st.normal.T));
    if (!(back == form)) fail(ErrorCode::StageFailure, "basis change round trip does not return the form");

    json summands = json::array();
    const auto& blocks = st.normal.form.blocks;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      ExtendedQuadraticForm sub;
      sub.rank = 2;
      sub.lambda = diag_form(2, {blocks[b]});
      sub.coeff_group = moved.coeff_group;
      sub.p_image = moved.p_image;
      sub.mu = {moved.mu[2 * b], moved.mu[2 * b + 1]};
      summands.push_back({{"basis", {2 * b + 1, 2 * b + 2}}, {"block", int_to_json(blocks[b])}, {"boundary", boundary_name(classify_boundary(sub))}});
    }
    for (std::size_t z = 0; z < st.normal.form.zero_count; ++z) {
      ExtendedQuadraticForm sub;
      sub.rank = 1;
      sub.lambda = SkewIntMatrix(1);
      sub.coeff_group = moved.coeff_group;
      sub.p_image = moved.p_image;
      sub.mu = {moved.mu[2 * blocks.size() + z]};
      summands.push_back({{"basis", {2 * blocks.size() + z + 1}}, {"block", 0}, {"boundary", boundary_name(classify_boundary(sub))}});
    }
    s.summary = {{"summands", summands}};
    write(s, "eqf.json", detail::dump_artifact({{"form", eqf_to_json(form)}, {"normal_form", eqf_to_json(moved)}, {"summands", summands}}));
  });

  rep.pass = true;
  for (const auto& s : rep.stages) rep.pass = rep.pass && s.status == StageStatus::Pass;
  if (!rep.pass && rep.first_failure.empty())
    for (const auto& s : rep.stages)
      if (s.status != StageStatus::Pass) {
        rep.first_failure = s.name + ": " + stage_status_name(s.status);
        break;
      }
  if (!config.out_dir.empty()) write_atomic(config.out_dir / "report.json", detail::dump_artifact(rep.to_json()));
  rep.seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return rep;
}

}  // namespace ricci_forge
