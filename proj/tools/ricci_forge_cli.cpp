#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ricci_forge/constructions.hpp"
#include "ricci_forge/io.hpp"
#include "ricci_forge/linking.hpp"
#include "ricci_forge/pipeline.hpp"
#include "ricci_forge/skewalg.hpp"
#include "ricci_forge/smoothing.hpp"

namespace rf = ricci_forge;
using rf::json;

namespace {

struct Globals {
  bool json_mode = false;
  int threads = 1;
};

/** Flattens nested objects into dotted keys; leaves arrays as compact JSON. */
void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    return;
  }
  std::string text;
  if (j.is_number_float())
    text = rf::format_double(j.get<double>());
  else if (j.is_string())
    text = j.get<std::string>();
  else
    text = j.dump();
  rows.emplace_back(prefix, text);
}

/** Both modes print the same values: JSON, or one aligned "key value" row per leaf. */
void emit(const Globals& g, const json& summary) {
  if (g.json_mode) {
    std::cout << summary.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(summary, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& [k, v] : rows) std::cout << k << std::string(width - k.size() + 2, ' ') << v << "\n";
}

void write_json(const std::string& path, const json& j) {
  if (!path.empty()) rf::write_atomic(path, j.dump(2) + "\n");
}

rf::Rational parse_rational(const std::string& s, const std::string& flag) {
  try {
    return rf::rational_from_string(s);
  } catch (const rf::Error&) {
    throw CLI::ValidationError(flag, "not a rational number: " + s);
  }
}

rf::QValue parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return rf::QValue::infinity();
  try {
    std::size_t used = 0;
    const double q = std::stod(s, &used);
    if (used == s.size() && q > 0.0 && std::isfinite(q)) return rf::QValue(q);
  } catch (const std::exception&) {
  }
  throw CLI::ValidationError("--q", "expected a positive number or inf, got " + s);
}

json scan_summary(const rf::CurvatureReport& r) { return rf::report_summary_to_json(r); }

// ---------------------------------------------------------------------------

struct CurvatureArgs {
  std::string spec, out, csv;
  double step = 1e-3, relative_scale = 0.0, t = 0.0;
  std::vector<double> A;
};

void add_curvature(CLI::App& app, Globals& g, CurvatureArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("curvature", "Evaluate and scan weighted Ricci curvature of a spec");
  cmd->require_subcommand(1);
  auto add_A = [&](CLI::App* c) {
    c->add_option("--a-tensor", a.A, "A-tensor bounds AuAu,AvAv,deltaA")->delimiter(',')->expected(3);
  };

  auto* scan = cmd->add_subcommand("scan", "Positivity scan over the whole domain");
  scan->add_option("--spec", a.spec, "Spec JSON file")->required()->check(CLI::ExistingFile);
  scan->add_option("--step", a.step, "Grid step")->check(CLI::PositiveNumber);
  scan->add_option("--relative-scale", a.relative_scale, "Grow the step like |t|/scale beyond scale")->check(CLI::NonNegativeNumber);
  scan->add_option("--out", a.out, "Report JSON file");
  scan->add_option("--csv", a.csv, "Sample CSV file for plotting");
  add_A(scan);
  scan->callback([&] {
    const auto spec = rf::spec_from_json(rf::read_json_file(a.spec));
    rf::ATensorBounds A;
    if (!a.A.empty()) A = {a.A[0], a.A[1], a.A[2]};
    rf::ScanOptions so;
    so.threads = g.threads;
    so.relative_scale = a.relative_scale;
    const auto rep = rf::positivity_scan(spec, A, a.step, so);
    write_json(a.out, rf::report_to_json(rep));
    if (!a.csv.empty()) rf::write_atomic(a.csv, rf::report_to_csv(rep));
    emit(g, scan_summary(rep));
    rc = rep.pass ? 0 : 1;
  });

  auto* eval = cmd->add_subcommand("eval", "Ricci entries at one point");
  eval->add_option("--spec", a.spec, "Spec JSON file")->required()->check(CLI::ExistingFile);
  eval->add_option("--t", a.t, "Evaluation point")->required();
  add_A(eval);
  eval->callback([&] {
    const auto spec = rf::spec_from_json(rf::read_json_file(a.spec));
    const rf::RicciValues r = a.A.empty() ? rf::weighted_ricci_doubly_warped(spec, a.t)
                                          : rf::weighted_ricci_submersion(spec, a.t, rf::ATensorBounds{a.A[0], a.A[1], a.A[2]});
    json j = rf::ricci_to_json(r);
    j["t"] = a.t;
    j["margin"] = rf::detail::number_or_null(rf::positivity_margin(r));
    emit(g, j);
    rc = rf::positivity_margin(r) > 0.0 ? 0 : 1;
  });
}

// ---------------------------------------------------------------------------

struct GlueArgs {
  std::string left, right, out, report;
  double at = 0.0;
  std::vector<double> A;
};

void add_glue(CLI::App& app, Globals& g, GlueArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("glue", "Join two specs at a point and smooth the corner");
  cmd->add_option("--left", a.left, "Spec JSON used up to the junction")->required()->check(CLI::ExistingFile);
  cmd->add_option("--right", a.right, "Spec JSON used from the junction on")->required()->check(CLI::ExistingFile);
  cmd->add_option("--at", a.at, "Junction point")->required();
  cmd->add_option("--a-tensor", a.A, "A-tensor bounds AuAu,AvAv,deltaA")->delimiter(',')->expected(3);
  cmd->add_option("--out", a.out, "Glued spec JSON file");
  cmd->add_option("--report", a.report, "Jump report JSON file");
  cmd->callback([&] {
    const auto l = rf::spec_from_json(rf::read_json_file(a.left));
    const auto r = rf::spec_from_json(rf::read_json_file(a.right));
    rf::ATensorBounds A;
    if (!a.A.empty()) A = {a.A[0], a.A[1], a.A[2]};
    const rf::GlueJump jump = rf::check_glue_jump(l, r, a.at);
    json rep = {{"t_i", jump.t_i}, {"dalpha", jump.dalpha}, {"dbeta", jump.dbeta}, {"dtrace", jump.dtrace}, {"admissible", jump.admissible()}};
    rf::WeightedWarpedSpec joined = l;
    joined.alpha = rf::concat({rf::restrict_to(l.alpha, l.lo(), a.at), rf::restrict_to(r.alpha, a.at, r.hi())});
    joined.beta = rf::concat({rf::restrict_to(l.beta, l.lo(), a.at), rf::restrict_to(r.beta, a.at, r.hi())});
    joined.f = rf::concat({rf::restrict_to(l.f, l.lo(), a.at), rf::restrict_to(r.f, a.at, r.hi())});
    try {
      rf::SmoothCornerOptions opt;
      opt.threads = g.threads;
      const auto sm = rf::smooth_corner(joined, a.at, A, opt);
      rep["certified_eps"] = sm.eps;
      rep["window_margin"] = sm.window_margin;
      rep["verdict"] = "pass";
      write_json(a.out, rf::spec_to_json(sm.spec));
      rc = 0;
    } catch (const rf::Error& e) {
      rep["verdict"] = "fail";
      rep["error"] = rf::error_name(e.code());
      rep["message"] = e.what();
      rc = 1;
    }
    write_json(a.report, rep);
    emit(g, rep);
  });
}

// ---------------------------------------------------------------------------

struct ConstructArgs {
  std::string out, report, csv, q = "3";
  int a = 2, b = 2, n = 5, m = 1, max_halvings = 12;
  double lambda3 = 1.0, mu = 0.1, eps = 0.05, r = 1.0, t0 = 1.0, f0 = 0.0, r_cap = 0.3, lambda = 0.9, nu = 1.05, delta = 0.5, step = 1e-3;
  double c = 1.0, C = 5.0, eps_start = 0.05;
  std::string check = "full";
  std::vector<double> A{0.2, 0.2, 0.1};
};

void finish_construction(const Globals& g, const ConstructArgs& a, const json& spec, const rf::CurvatureReport& rep, json summary, int& rc) {
  write_json(a.out, spec);
  write_json(a.report, rf::report_to_json(rep));
  if (!a.csv.empty()) rf::write_atomic(a.csv, rf::report_to_csv(rep));
  summary["report"] = scan_summary(rep);
  emit(g, summary);
  rc = rep.pass ? 0 : 1;
}

void add_construct(CLI::App& app, Globals& g, ConstructArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("construct", "Build and certify a metric construction");
  cmd->require_subcommand(1);
  auto outputs = [&](CLI::App* c) {
    c->add_option("--out", a.out, "Spec JSON file");
    c->add_option("--report", a.report, "Certification report JSON file");
    c->add_option("--csv", a.csv, "Sample CSV file for plotting");
  };

  auto* col = cmd->add_subcommand("collapse", "Collapse profiles");
  col->add_option("--a", a.a)->check(CLI::PositiveNumber);
  col->add_option("--b", a.b)->check(CLI::PositiveNumber);
  col->add_option("--lambda3", a.lambda3);
  col->add_option("--mu", a.mu);
  col->add_option("--eps", a.eps);
  outputs(col);
  col->callback([&] {
    const auto res = rf::collapse_profiles(a.a, a.b, a.lambda3, a.mu, a.eps, g.threads);
    finish_construction(g, a, rf::spec_to_json(res.spec), res.report,
                        {{"t3", res.t3}, {"t_eps", res.t_eps}, {"smoothing_eps", res.smoothing_eps}, {"jump_alpha", res.jump_alpha}, {"jump_trace", res.jump_trace}},
                        rc);
  });

  auto* tg = cmd->add_subcommand("tot-geod", "Totally geodesic transition");
  tg->add_option("--r", a.r);
  tg->add_option("--t0", a.t0);
  tg->add_option("--mu", a.mu)->default_val(0.01);
  tg->add_option("--f0", a.f0);
  tg->add_option("--a-tensor", a.A, "A-tensor bounds AuAu,AvAv,deltaA")->delimiter(',')->expected(3);
  tg->add_option("--q", a.q)->default_val("inf");
  tg->add_option("--a", a.a);
  tg->add_option("--b", a.b);
  outputs(tg);
  tg->callback([&] {
    const auto res = rf::tot_geod_profiles(a.r, a.t0, a.mu, a.f0, rf::ATensorBounds{a.A[0], a.A[1], a.A[2]}, parse_q(a.q), a.a, a.b, g.threads);
    finish_construction(g, a, rf::spec_to_json(res.spec), res.report,
                        {{"q_eff", res.q_eff}, {"lambda", res.lambda}, {"t_lambda", res.t_lambda}, {"t_splice", res.t_splice}, {"splice_eps", res.splice_eps}},
                        rc);
  });

  auto* cap = cmd->add_subcommand("sphere-cap", "Sphere cap with a neck");
  cap->add_option("--q", a.q);
  cap->add_option("--n", a.n)->check(CLI::PositiveNumber);
  cap->add_option("--r-cap", a.r_cap);
  cap->add_option("--eps", a.eps);
  outputs(cap);
  cap->callback([&] {
    const auto res = rf::sphere_cap_extension(parse_q(a.q), a.n, a.r_cap, a.eps, g.threads);
    finish_construction(g, a, rf::spec_to_json(res.spec), res.report,
                        {{"q_eff", res.q_eff},
                         {"t_prime", res.t_prime},
                         {"beta_d1_inner", res.beta_d1_inner},
                         {"gamma_d1_inner", res.gamma_d1_inner},
                         {"beta_d1_outer", res.beta_d1_outer},
                         {"gamma_d1_outer", res.gamma_d1_outer}},
                        rc);
  });

  auto* neck = cmd->add_subcommand("neck", "Neck warping functions");
  neck->add_option("--q", a.q);
  neck->add_option("--b", a.b);
  neck->add_option("--lambda", a.lambda);
  neck->add_option("--eps", a.eps)->default_val(0.1);
  neck->add_option("--r", a.r)->default_val(0.5);
  neck->add_option("--out", a.out, "Spec JSON file");
  neck->callback([&] {
    const rf::QValue q = parse_q(a.q);
    if (q.is_infinite()) throw CLI::ValidationError("--q", "neck profiles need a finite q");
    const auto res = rf::neck_profiles(rf::NeckParams{q.value(), a.b, a.lambda, a.eps, a.r});
    write_json(a.out, rf::spec_to_json(rf::neck_spec(res.beta, res.gamma, a.b, q.value())));
    emit(g, {{"t0", res.t0},
             {"psi0", res.psi0},
             {"pcap", res.pcap},
             {"margin", res.margin},
             {"scaled_margin", res.scaled_margin},
             {"evaluations", res.evaluations},
             {"verdict", res.margin > 0.0 ? "pass" : "fail"}});
    rc = res.margin > 0.0 ? 0 : 1;
  });

  auto* he = cmd->add_subcommand("h-eps", "The piecewise function h_eps, smoothed and certified");
  he->add_option("--eps", a.eps)->default_val(0.01);
  he->add_option("--nu", a.nu);
  he->add_option("--m", a.m)->check(CLI::PositiveNumber);
  he->add_option("--check", a.check, "full or tt")->check(CLI::IsMember({"full", "tt"}));
  he->add_option("--step", a.step)->check(CLI::PositiveNumber);
  he->add_option("--out", a.out, "Profile JSON file");
  he->add_option("--report", a.report, "Certification report JSON file");
  he->add_option("--csv", a.csv, "Sample CSV file for plotting");
  he->callback([&] {
    const auto d = rf::h_eps_profile(a.eps, a.nu, a.m, a.check == "tt" ? rf::HEpsCheck::TtOnly : rf::HEpsCheck::Full);
    const auto rep = rf::h_eps_certify(d.h, a.m, a.step, g.threads);
    const auto [rho, rho_at] = rf::h_eps_min_tt(rep);
    write_json(a.out, rf::profile_to_json(d.h));
    write_json(a.report, rf::report_to_json(rep));
    if (!a.csv.empty()) rf::write_atomic(a.csv, rf::report_to_csv(rep));
    const bool pass = a.check == "tt" ? rho > 0.0 : rep.pass;
    emit(g, {{"t_eps", d.t_eps}, {"corners", d.corners}, {"corner_eps", d.corner_eps}, {"rho", rho}, {"rho_at", rho_at}, {"report", scan_summary(rep)},
             {"verdict", pass ? "pass" : "fail"}});
    rc = pass ? 0 : 1;
  });

  auto* un = cmd->add_subcommand("unlink", "Triply warped unlinking deformation");
  auto* eps_opt = un->add_option("--eps", a.eps, "Fixed eps; without it eps is halved from --eps-start");
  un->add_option("--eps-start", a.eps_start);
  un->add_option("--delta", a.delta);
  un->add_option("--nu", a.nu);
  un->add_option("--m", a.m)->check(CLI::PositiveNumber);
  un->add_option("--max-halvings", a.max_halvings)->check(CLI::NonNegativeNumber);
  un->add_option("--report", a.report, "Report JSON file");
  un->callback([&] {
    const auto res = eps_opt->count() ? rf::unlink_field(a.m, a.eps, a.delta, a.nu, g.threads)
                                      : rf::find_unlink_eps(a.m, a.delta, a.nu, a.eps_start, a.max_halvings, g.threads);
    const json j = {{"m", a.m},
                    {"eps", res.field.eps},
                    {"delta", res.field.delta},
                    {"delta_s", res.field.delta_s},
                    {"halvings", res.halvings},
                    {"rho", res.report.rho},
                    {"min_margin", res.report.min_margin},
                    {"argmin_t", res.report.argmin_t},
                    {"argmin_s", res.report.argmin_s},
                    {"tt_bound_holds", res.report.tt_bound_holds},
                    {"verdict", res.report.pass ? "pass" : "fail"}};
    write_json(a.report, j);
    emit(g, j);
    rc = res.report.pass ? 0 : 1;
  });

  auto* iso = cmd->add_subcommand("isotopy", "Ramp parameter for the isotopy concatenation");
  iso->add_option("--c", a.c);
  iso->add_option("--C", a.C);
  iso->add_option("--n", a.n)->check(CLI::PositiveNumber);
  iso->add_option("--lambda", a.lambda)->default_val(2.0);
  iso->add_option("--out", a.out, "Ramp profile JSON file");
  iso->callback([&] {
    const auto p = rf::isotopy_params(a.c, a.C, a.n, a.lambda);
    write_json(a.out, rf::profile_to_json(rf::chi_ramp(p.a)));
    const bool pass = p.ric_tt > 0.0 && p.ric_vv > 0.0 && p.ric_tt * p.ric_vv > p.mixed * p.mixed;
    emit(g, {{"a", p.a}, {"k", p.k}, {"C_prime", p.C_prime}, {"ric_tt", p.ric_tt}, {"mixed", p.mixed}, {"ric_vv", p.ric_vv}, {"verdict", pass ? "pass" : "fail"}});
    rc = pass ? 0 : 1;
  });
}

// ---------------------------------------------------------------------------

struct AlgebraArgs {
  std::string in, out, eps = "1/1000";
  std::vector<long> nu;
  long ell = 0;
  int m = 1;
};

long ell_or_minimal(const AlgebraArgs& a) { return a.ell > 0 ? a.ell : rf::minimal_ell(a.nu); }

void add_skew(CLI::App& app, Globals& g, AlgebraArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("skew", "Exact skew-symmetric integer matrices");
  cmd->require_subcommand(1);

  auto* nf = cmd->add_subcommand("normal-form", "Normal form and unimodular witness");
  nf->add_option("--in", a.in, "Matrix JSON (array of integer rows)")->required()->check(CLI::ExistingFile);
  nf->add_option("--out", a.out, "Result JSON file");
  nf->callback([&] {
    const auto A = rf::skew_from_json(rf::read_json_file(a.in));
    const auto res = rf::skew_normal_form(A);
    json j = rf::normal_form_to_json(res);
    j["pfaffian"] = rf::int_to_json(rf::pfaffian(A));
    write_json(a.out, j);
    json shown = {{"size", A.n()}, {"blocks", j["blocks"]}, {"zero_count", j["zero_count"]}, {"pfaffian", j["pfaffian"]}};
    if (g.json_mode) shown["T"] = j["T"];
    emit(g, shown);
    rc = 0;
  });

  auto* bb = cmd->add_subcommand("build-b", "The block matrix B for nu and ell");
  bb->add_option("--nu", a.nu, "Comma separated positive integers")->required()->delimiter(',')->check(CLI::PositiveNumber);
  bb->add_option("--ell", a.ell, "Defaults to the smallest admissible value")->check(CLI::PositiveNumber);
  bb->add_option("--out", a.out, "Matrix JSON file");
  bb->callback([&] {
    const long ell = ell_or_minimal(a);
    const auto B = rf::build_B(a.nu, ell);
    const json m = rf::int_matrix_to_json(B.rows());
    write_json(a.out, m);
    if (g.json_mode) {
      emit(g, {{"nu", a.nu}, {"ell", ell}, {"matrix", m}});
    } else {
      std::cout << "nu " << json(a.nu).dump() << "  ell " << ell << "\n";
      for (const auto& row : B.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? " " : "") << std::setw(3) << row[c].str();
        std::cout << "\n";
      }
    }
    rc = 0;
  });
}

void add_linking(CLI::App& app, Globals& g, AlgebraArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("linking", "Subspace realization of B and its zero-intersection graph");
  cmd->require_subcommand(1);
  auto* re = cmd->add_subcommand("realize", "Build the subspaces, intersection matrix, graph and schedule");
  re->add_option("--nu", a.nu, "Comma separated positive integers")->required()->delimiter(',')->check(CLI::PositiveNumber);
  re->add_option("--ell", a.ell, "Defaults to the smallest admissible value")->check(CLI::PositiveNumber);
  re->add_option("--m", a.m)->check(CLI::PositiveNumber);
  re->add_option("--eps", a.eps, "Rational perturbation, e.g. 1/1000");
  re->add_option("--out", a.out, "Output directory for family.json, matrix.json, graph.dot, schedule.json");
  re->callback([&] {
    const rf::Rational eps = parse_rational(a.eps, "--eps");
    const long ell = ell_or_minimal(a);
    const auto fam = rf::build_subspaces(a.nu, ell, a.m, eps);
    const auto t = rf::intersection_matrix(fam);
    const auto B = rf::build_B(a.nu, ell);
    const auto graph = rf::build_graph(t.matrix);
    const auto hyp = rf::check_hypotheses(fam, graph);
    json summary = {{"nu", a.nu}, {"ell", ell}, {"m", a.m}, {"eps", rf::rational_to_string(eps)}, {"matches_B", t.matrix == B}};
    summary["hypotheses"] = hyp.ok() ? "pass" : "fail";
    bool ok = t.matrix == B && hyp.ok();
    try {
      const auto shapes = rf::component_shapes(graph, a.nu, ell);
      summary["shapes"] = {{"G1", shapes.g1}, {"G_odd", shapes.g_odd}, {"G_ev", shapes.g_ev}};
    } catch (const rf::Error& e) {
      summary["shapes"] = rf::error_name(e.code());
      ok = false;
    }
    json schedule;
    try {
      schedule = rf::schedule_to_json(rf::separation_schedule(fam, graph));
      summary["schedule_steps"] = schedule["steps"].size();
    } catch (const rf::Error& e) {
      summary["schedule_steps"] = rf::error_name(e.code());
      ok = false;
    }
    if (!a.out.empty()) {
      const std::filesystem::path dir = a.out;
      write_json((dir / "family.json").string(), rf::family_to_json(fam));
      write_json((dir / "matrix.json").string(), rf::intersection_to_json(t));
      rf::write_atomic(dir / "graph.dot", rf::graph_to_dot(graph));
      if (!schedule.is_null()) write_json((dir / "schedule.json").string(), schedule);
    }
    emit(g, summary);
    rc = ok ? 0 : 1;
  });
}

// ---------------------------------------------------------------------------

struct PipelineArgs {
  std::string config, out = "pipeline-out", eps_link;
  std::vector<long> nu;
  long ell = 0;
  int m = 0;
};

void add_pipeline(CLI::App& app, Globals& g, PipelineArgs& a, int& rc) {
  auto* cmd = app.add_subcommand("pipeline", "End-to-end verification run");
  cmd->require_subcommand(1);
  auto* run = cmd->add_subcommand("run", "Run every stage and write the artifacts");
  run->add_option("--config", a.config, "Config JSON; flags override its fields")->check(CLI::ExistingFile);
  run->add_option("--nu", a.nu, "Comma separated positive integers")->delimiter(',')->check(CLI::PositiveNumber);
  run->add_option("--m", a.m)->check(CLI::PositiveNumber);
  run->add_option("--ell", a.ell, "Defaults to the smallest admissible value")->check(CLI::PositiveNumber);
  run->add_option("--eps-link", a.eps_link, "Rational subspace perturbation, default 1/1000");
  run->add_option("--out", a.out, "Artifact directory");
  run->callback([&] {
    rf::PipelineConfig c = a.config.empty() ? rf::PipelineConfig{} : rf::pipeline_config_from_json(rf::read_json_file(a.config));
    if (!a.nu.empty()) c.nu = a.nu;
    if (a.m > 0) c.m = a.m;
    if (a.ell > 0) c.ell = a.ell;
    if (!a.eps_link.empty()) c.eps_link = parse_rational(a.eps_link, "--eps-link");
    if (c.nu.empty()) throw CLI::RequiredError("--nu");
    c.out_dir = a.out;
    c.threads = g.threads;
    const auto rep = rf::run_pipeline(c);
    if (g.json_mode) {
      std::cout << rep.to_json().dump(2) << "\n";
    } else {
      // Stages in run order; the report JSON holds the same fields.
      for (const auto& s : rep.stages) {
        std::cout << std::left << std::setw(13) << s.name << std::setw(9) << rf::stage_status_name(s.status);
        if (!s.message.empty()) std::cout << s.message;
        std::cout << "\n";
      }
      std::cout << "verdict      " << (rep.pass ? "pass" : "fail") << "\n";
      if (!rep.first_failure.empty()) std::cout << "first_failure " << rep.first_failure << "\n";
      std::cout << "artifacts    " << a.out << "\n";
    }
    std::cerr << "pipeline finished in " << rep.seconds << " s\n";
    rc = rep.pass ? 0 : 1;
  });
}

/** The most deeply parsed subcommand, so a usage error shows the flags of the command that was meant. */
const CLI::App* deepest(const CLI::App& app) {
  for (const auto* sub : app.get_subcommands())
    if (sub->parsed()) return deepest(*sub);
  return &app;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ricci-forge: weighted Ricci curvature constructions and exact surgery algebra"};
  app.require_subcommand(1);
  Globals g;
  g.threads = rf::default_threads();
  app.add_flag("--json", g.json_mode, "Machine-readable output");
  app.add_option("--threads", g.threads, "Worker threads for grid scans (fallback: RICCI_FORGE_THREADS)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  int rc = 0;
  CurvatureArgs curvature;
  GlueArgs glue;
  ConstructArgs construct;
  AlgebraArgs algebra;
  PipelineArgs pipeline;
  add_curvature(app, g, curvature, rc);
  add_glue(app, g, glue, rc);
  add_construct(app, g, construct, rc);
  add_skew(app, g, algebra, rc);
  add_linking(app, g, algebra, rc);
  add_pipeline(app, g, pipeline, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << deepest(app)->help();
    return 2;
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
