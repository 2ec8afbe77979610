#include "cli.hpp"

#include "hens/hens.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace hens::cli {

namespace {

struct Options {
  double tol = -1.0;  // negative: command default
  std::uint64_t seed = 0;

  std::string algebra;
  std::string algebra2;
  std::string profile = "homogeneous_ensemble";
  std::string x, y, from, to, point, u;
  std::string eps_list;
  std::string generators;
  std::string out_path;
  std::string kind = "metric";
  std::string mode = "bound";
  std::string f_path, h_path, check_f;
  std::string family;
  std::string params;
  std::string alpha;
  int segments = 32;
  int restarts = 8;
  int samples = 24;
  int sweep = 20;
  unsigned degree_bound = 2;
  double eps = 1.0;
  double rho = 0.0, phi = 0.0, gamma = 0.0;
  double a = 1.0, b = 1.0;
};

std::vector<double> parse_list(const std::string& s) {
  Vec v = parse_vector(s);
  return {v.data(), v.data() + v.size()};
}

Vec algebra_vector(const GradedAlgebra& alg, const std::string& s, const char* what) {
  if (s.empty()) return Vec::Zero(alg.dim());
  Vec v = parse_vector(s);
  if (v.size() != alg.dim()) {
    throw DimensionError(fmt::format("{}: expected {} components, got {}", what, alg.dim(), v.size()));
  }
  return v;
}

double tol_or(const Options& o, double fallback) { return o.tol >= 0.0 ? o.tol : fallback; }

Mat load_matrix(const std::string& path) {
  Json j = read_json_file(path);
  if (j.is_object() && j.contains("matrix")) return mat_from_json(j.at("matrix"));
  return mat_from_json(j);
}

Json report_json(const GradedAlgebra& alg, const ValidationReport& rep) {
  Json j;
  j["algebra"] = alg.name();
  j["profile"] = to_string(rep.profile);
  j["tolerance"] = rep.tolerance;
  j["passed"] = rep.passed();
  j["failures"] = rep.failures();
  j["checks"] = Json::array();
  for (const auto& c : rep.checks) {
    Json cj{{"label", c.label}, {"status", to_string(c.status)}, {"residual", c.residual}, {"detail", c.detail}};
    if (c.worst) cj["worst"] = {(*c.worst)[0], (*c.worst)[1], (*c.worst)[2]};
    j["checks"].push_back(cj);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_validate(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  auto rep = validate_ensemble(alg, parse_profile(o.profile), tol_or(o, kDefaultTolerance));
  out << dump_json(report_json(alg, rep)) << "\n";
  return rep.passed() ? kOk : kValidation;
}

int cmd_bch(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  Vec x = algebra_vector(alg, o.x, "--x"), y = algebra_vector(alg, o.y, "--y");
  auto r = bch(alg, x, y);
  Json j{{"algebra", alg.name()},
         {"x", to_json(x)},
         {"y", to_json(y)},
         {"value", to_json(r.value)},
         {"approximate", r.approximate},
         {"outside_convergence", r.outside_convergence},
         {"conical", to_json(conical_product(alg, x, y))}};
  out << dump_json(j) << "\n";
  return kOk;
}

int cmd_conical(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  Vec x = algebra_vector(alg, o.x, "--x"), y = algebra_vector(alg, o.y, "--y");
  auto eps = parse_list(o.eps_list.empty() ? "0.1,0.05,0.025" : o.eps_list);
  auto r = conical_limit(alg, x, y, eps, tol_or(o, 1e-4));
  Json values = Json::array();
  for (const auto& v : r.values) values.push_back(to_json(v));
  Json j{{"algebra", alg.name()},
         {"eps", r.eps},
         {"errors", r.errors},
         {"values", values},
         {"closed_form", to_json(r.closed_form)},
         {"extrapolated", to_json(r.extrapolated)},
         {"extrapolation_error", r.extrapolation_error},
         {"agrees", r.agrees},
         {"observed_order", observed_order(r.eps, r.errors)}};
  out << dump_json(j) << "\n";
  return r.agrees ? kOk : kNumeric;
}

int cmd_frame(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  std::vector<int> idx;
  if (o.generators.empty()) {
    for (int i = 0; i < alg.v1_dim(); ++i) idx.push_back(alg.d0_dim() + i);
  } else {
    for (double v : parse_list(o.generators)) idx.push_back(static_cast<int>(v));
  }
  std::vector<Vec> gens;
  Mat leaf(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  const int h = alg.horizontal_dim();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] < alg.d0_dim() || idx[a] >= h) {
      throw DomainError(fmt::format("--generators: index {} is not a V1 basis index", idx[a]));
    }
    gens.push_back(Vec::Unit(alg.dim(), idx[a]));
    for (std::size_t b = 0; b < idx.size(); ++b)
      leaf(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = alg.metric()(idx[a], idx[b]);
  }
  auto tree = build_normal_frame(alg, gens);
  Mat g = extend_metric(tree, leaf);
  Json nodes = Json::array();
  for (int k = 0; k < tree.size(); ++k) {
    const auto& n = tree.nodes[static_cast<std::size_t>(k)];
    nodes.push_back({{"word", n.word},
                     {"label", tree.word_string(k)},
                     {"degree", n.degree},
                     {"left", n.left},
                     {"right", n.right},
                     {"vector", to_json(n.vector)}});
  }
  Json j{{"algebra", alg.name()},
         {"generators", idx},
         {"nodes", nodes},
         {"degrees", tree.degrees()},
         {"frame_metric", to_json(g)},
         {"ambient_metric", to_json(frame_metric_in_ambient(tree, g))}};
  out << dump_json(j) << "\n";
  return kOk;
}

int cmd_ccdist(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  CcOptions cc;
  cc.segments = o.segments;
  cc.restarts = o.restarts;
  cc.seed = o.seed;
  if (o.tol >= 0.0) cc.feasibility_tol = o.tol;
  auto r = cc_distance(alg, algebra_vector(alg, o.from, "--from"), algebra_vector(alg, o.to, "--to"), cc);
  Json j{{"algebra", alg.name()},
         {"upper", r.upper},
         {"lower_projection", r.lower_projection},
         {"endpoint_residual", r.endpoint_residual},
         {"feasible", r.feasible},
         {"approximate_integration", r.approximate_integration},
         {"status", r.status},
         {"segments", cc.segments},
         {"restarts", cc.restarts},
         {"seed", cc.seed}};
  out << dump_json(j) << "\n";
  return r.feasible ? kOk : kNumeric;
}

int cmd_profile(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  auto eps = parse_list(o.eps_list.empty() ? "1,0.5,0.25" : o.eps_list);
  ProfileOptions po;
  po.samples = o.samples;
  po.seed = o.seed;
  po.cc.segments = o.segments;
  po.cc.restarts = o.restarts;
  if (o.tol >= 0.0) po.cc.feasibility_tol = o.tol;
  ProfileCurve curve;
  if (o.kind == "metric") {
    curve = metric_profile(alg, algebra_vector(alg, o.point, "--point"), eps, po);
  } else if (o.kind == "dilatation") {
    curve = dilatation_profile(alg, eps, po);
  } else {
    throw DomainError("--kind must be metric or dilatation");
  }
  if (!o.out_path.empty()) {
    std::ostringstream csv;
    csv << "eps,pair_i,pair_j,rescaled_distance\n";
    for (const auto& s : curve.samples)
      for (int i = 0; i < s.size(); ++i)
        for (int j = i + 1; j < s.size(); ++j)
          csv << fmt::format("{:.17g},{},{},{:.17g}\n", s.eps, i, j, s.distances(i, j));
    write_text_file(o.out_path, csv.str());
  }
  Json samples = Json::array();
  for (const auto& s : curve.samples) samples.push_back(sample_to_json(s));
  Json j{{"algebra", alg.name()}, {"kind", to_string(curve.kind)}, {"scales", curve.scales()},
         {"samples", samples},    {"points", o.samples},             {"seed", o.seed}};
  if (!o.out_path.empty()) j["csv"] = o.out_path;
  out << dump_json(j) << "\n";
  return kOk;
}

int cmd_gh(const Options& o, std::ostream& out) {
  auto a = sample_from_json(read_json_file(o.algebra));
  auto b = sample_from_json(read_json_file(o.algebra2));
  GhOptions gh;
  if (o.mode == "exact") {
    gh.mode = GhMode::exact;
  } else if (o.mode != "bound") {
    throw DomainError("--mode must be exact or bound");
  }
  gh.restarts = o.restarts;
  gh.seed = o.seed;
  auto r = gh_distance(a, b, gh);
  Json j{{"lower", r.lower}, {"upper", r.upper}, {"exact", r.exact}, {"mode", o.mode}};
  out << dump_json(j) << "\n";
  return kOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  Json j;
  std::optional<GradedAlgebra> alg;
  Profile prof = Profile::homogeneous_ensemble;
  if (o.family == "contact3") {
    alg = contact3_normal_form(o.rho, o.phi, o.gamma);
    j["nilpotentization"] = algebra_to_json(nilpotentize(*alg));
  } else if (o.family == "surface") {
    alg = surface_family(o.a, o.b);
    prof = Profile::homogeneous_space;
  } else if (o.family == "contact4-invariants") {
    auto v = parse_list(o.params);
    if (v.size() != 5) throw DomainError("--params takes lambda1,lambda2,b12,d,e12");
    Contact4Params p{v[0], v[1], v[2], v[3], v[4]};
    auto inv = contact4_invariants(p);
    j["invariants"] = {inv.first, inv.second};
    if (!o.alpha.empty()) {
      auto al = parse_list(o.alpha);
      if (al.size() != 2) throw DomainError("--alpha takes alpha1,alpha2");
      auto r = contact4_reduce(p, al[0], al[1]);
      j["reduced"] = {r.lambda1, r.lambda2, r.b12, r.d, r.e12};
      auto inv2 = contact4_invariants(r);
      j["reduced_invariants"] = {inv2.first, inv2.second};
    }
    alg = contact4_algebra(p);
    prof = Profile::homogeneous_space;
  } else if (o.family == "constraints") {
    ParamBracket pb = o.params == "contact4_general" ? contact4_family_general()
                      : o.params == "contact4_solved" ? contact4_family_solved()
                      : o.params == "contact3"        ? contact3_family(o.phi)
                      : o.params == "surface_general" || o.params.empty()
                          ? surface_family_general()
                          : throw DomainError("--params: unknown family '" + o.params + "'");
    auto system = jacobi_constraints(pb);
    std::vector<std::string> polys;
    for (const auto& p : system) polys.push_back(p.to_string(pb.params()));
    j["family"] = pb.name();
    j["parameters"] = pb.params();
    j["constraints"] = polys;
    out << dump_json(j) << "\n";
    return kOk;
  } else {
    throw DomainError("classify: unknown family '" + o.family + "'");
  }
  auto rep = validate_ensemble(*alg, prof, tol_or(o, kDefaultTolerance));
  j["algebra"] = algebra_to_json(*alg);
  j["validation"] = report_json(*alg, rep);
  if (!o.out_path.empty()) {
    save_algebra(*alg, o.out_path);
    j["written"] = o.out_path;
  }
  out << dump_json(j) << "\n";
  return kOk;
}

Json candidate_json(const SymmetryCandidate& c) {
  return {{"member", c.member},
          {"tolerance", c.tolerance},
          {"residuals",
           {{"a_filtration", c.filtration},
            {"b_fixes_d0", c.fixes_d0},
            {"c_commutes_q", c.commutes_q},
            {"d_isometry", c.isometry}}}};
}

int cmd_coadjoint(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  const double tol = tol_or(o, 1e-10);
  auto gbar = extended_metric(alg);
  Json j{{"algebra", alg.name()}, {"gbar", to_json(gbar.matrix)}, {"frame_fallback", gbar.frame_fallback}};
  if (!o.check_f.empty()) {
    Mat F = load_matrix(o.check_f);
    auto cand = in_symmetry_group(alg, F, tol);
    j["candidate"] = candidate_json(cand);
    if (!cand.member) {
      out << dump_json(j) << "\n";
      return kValidation;
    }
    double r = coadjoint_check(alg, F, tol);
    j["coadjoint_residual"] = r;
    out << dump_json(j) << "\n";
    return r < tol ? kOk : kNumeric;
  }
  std::vector<double> res(static_cast<std::size_t>(o.sweep));
  parallel_for(res.size(), [&](std::size_t i) {
    res[i] = coadjoint_check(alg, sample_member(alg, derive_seed(o.seed, i)), tol);
  });
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  j["sampled_members"] = o.sweep;
  j["residuals"] = res;
  j["max_residual"] = worst;
  out << dump_json(j) << "\n";
  return worst < tol ? kOk : kNumeric;
}

int cmd_wpoly(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  auto gbar = extended_metric(alg);
  auto w = w_polynomial(alg, gbar.matrix, algebra_vector(alg, o.x, "--x"));
  Json coeffs = Json::array();
  for (const auto& c : w.coeffs) coeffs.push_back(to_json(c));
  Json j{{"algebra", alg.name()},  {"coefficients", coeffs}, {"degree", w.degree()},
         {"gbar", to_json(gbar.matrix)}, {"frame_fallback", gbar.frame_fallback}};
  if (o.eps_list.size()) j["at_eps"] = to_json(w.evaluate(parse_list(o.eps_list).front()));
  out << dump_json(j) << "\n";
  return kOk;
}

int cmd_prequant(const Options& o, std::ostream& out) {
  auto alg = load_algebra(o.algebra);
  Mat f = load_matrix(o.f_path);
  Poly h = polynomial_from_json(read_json_file(o.h_path));
  Vec u = algebra_vector(alg, o.u, "--u");
  auto w = w_polynomial(alg, u);
  PrequantOptions po;
  po.degree_bound = o.degree_bound;
  if (o.tol >= 0.0) po.algebra_tol = o.tol;
  auto r = prequant_apply(alg, f, h, w, u, o.eps, po);
  Json j{{"algebra", alg.name()},
         {"eps", o.eps},
         {"u", to_json(u)},
         {"real", r.first},
         {"imag", r.second},
         {"moment", moment_map(w.evaluate(o.eps), f)}};
  out << dump_json(j) << "\n";
  return kOk;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "Tolerance (command specific default)");
  sub->add_option("--seed", o.seed, "Random seed");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hens: homogeneous ensembles, CC distances, metric profiles and coadjoint data"};
  app.require_subcommand(1);
  Options o;
  std::function<int()> action;
  const std::string alg_help = "Algebra JSON file or built-in name";

  auto* validate = app.add_subcommand("validate", "Check the homogeneous space/ensemble/Carnot axioms");
  validate->add_option("algebra", o.algebra, alg_help)->required();
  validate->add_option("--profile", o.profile, "homogeneous_space | homogeneous_ensemble | carnot")
      ->check(CLI::IsMember({"homogeneous_space", "homogeneous_ensemble", "carnot"}));
  add_common(validate, o);
  validate->callback([&] { action = [&] { return cmd_validate(o, out); }; });

  auto* bchc = app.add_subcommand("bch", "Group product log(e^x e^y)");
  bchc->add_option("algebra", o.algebra, alg_help)->required();
  bchc->add_option("--x", o.x, "Comma separated coordinates")->required();
  bchc->add_option("--y", o.y, "Comma separated coordinates")->required();
  add_common(bchc, o);
  bchc->callback([&] { action = [&] { return cmd_bch(o, out); }; });

  auto* conical = app.add_subcommand("conical", "Numerical conical product against the nilpotentized product");
  conical->add_option("algebra", o.algebra, alg_help)->required();
  conical->add_option("--x", o.x)->required();
  conical->add_option("--y", o.y)->required();
  conical->add_option("--eps", o.eps_list, "Decreasing eps ladder, e.g. 0.1,0.05,0.025");
  add_common(conical, o);
  conical->callback([&] { action = [&] { return cmd_conical(o, out); }; });

  auto* frame = app.add_subcommand("frame", "Normal frame and extended metric");
  frame->add_option("algebra", o.algebra, alg_help)->required();
  frame->add_option("--generators", o.generators, "V1 basis indices, e.g. 0,1 (default: all of V1)");
  add_common(frame, o);
  frame->callback([&] { action = [&] { return cmd_frame(o, out); }; });

  auto* ccd = app.add_subcommand("ccdist", "Upper bound on the CC distance");
  ccd->add_option("algebra", o.algebra, alg_help)->required();
  ccd->add_option("--from", o.from, "Start point (default 0)");
  ccd->add_option("--to", o.to, "End point")->required();
  ccd->add_option("--segments", o.segments)->check(CLI::PositiveNumber);
  ccd->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  add_common(ccd, o);
  ccd->callback([&] { action = [&] { return cmd_ccdist(o, out); }; });

  auto* prof = app.add_subcommand("profile", "Metric or dilatation profile samples");
  prof->add_option("algebra", o.algebra, alg_help)->required();
  prof->add_option("--point", o.point, "Ball center (metric profile, default 0)");
  prof->add_option("--eps", o.eps_list, "Strictly decreasing scales (default 1,0.5,0.25)");
  prof->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  prof->add_option("--segments", o.segments)->check(CLI::PositiveNumber);
  prof->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  prof->add_option("--kind", o.kind, "metric | dilatation")->check(CLI::IsMember({"metric", "dilatation"}));
  prof->add_option("--out", o.out_path, "CSV output (eps,pair_i,pair_j,rescaled_distance)");
  add_common(prof, o);
  prof->callback([&] {
    if (prof->count("--segments") == 0) o.segments = 16;
    if (prof->count("--restarts") == 0) o.restarts = 2;
    if (prof->count("--seed") == 0) o.seed = 1;
    action = [&] { return cmd_profile(o, out); };
  });

  auto* gh = app.add_subcommand("gh", "Pointed GH bounds between two sample files");
  gh->add_option("first", o.algebra, "Sample JSON {distances, base}")->required();
  gh->add_option("second", o.algebra2, "Sample JSON {distances, base}")->required();
  gh->add_option("--mode", o.mode, "exact | bound")->check(CLI::IsMember({"exact", "bound"}));
  gh->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
  add_common(gh, o);
  gh->callback([&] { action = [&] { return cmd_gh(o, out); }; });

  auto* classify = app.add_subcommand("classify", "Normal forms, invariants and Jacobi constraints");
  classify->add_option("family", o.family, "contact3 | surface | contact4-invariants | constraints")
      ->required()
      ->check(CLI::IsMember({"contact3", "surface", "contact4-invariants", "constraints"}));
  classify->add_option("--rho", o.rho);
  classify->add_option("--phi", o.phi);
  classify->add_option("--gamma", o.gamma);
  classify->add_option("--a", o.a);
  classify->add_option("--b", o.b);
  classify->add_option("--params", o.params,
                       "contact4-invariants: lambda1,lambda2,b12,d,e12; constraints: family name");
  classify->add_option("--alpha", o.alpha, "Rescaling alpha1,alpha2 for contact4-invariants");
  classify->add_option("-o,--output", o.out_path, "Write the algebra JSON here");
  add_common(classify, o);
  classify->callback([&] { action = [&] { return cmd_classify(o, out); }; });

  auto* coad = app.add_subcommand("coadjoint", "Symmetry group membership and the coadjoint relation");
  coad->add_option("algebra", o.algebra, alg_help)->required();
  coad->add_option("--check-f", o.check_f, "Dense matrix JSON");
  coad->add_option("--samples", o.sweep, "Random members to sweep when --check-f is absent")
      ->check(CLI::PositiveNumber);
  add_common(coad, o);
  coad->callback([&] { action = [&] { return cmd_coadjoint(o, out); }; });

  auto* wp = app.add_subcommand("w-poly", "W_eps(x) coefficients");
  wp->add_option("algebra", o.algebra, alg_help)->required();
  wp->add_option("--x", o.x)->required();
  wp->add_option("--eps", o.eps_list, "Also evaluate at this eps");
  add_common(wp, o);
  wp->callback([&] { action = [&] { return cmd_wpoly(o, out); }; });

  auto* pq = app.add_subcommand("prequant", "Q(f)h at the bunch point of u");
  pq->set_help_flag("--help", "Print this help message and exit");
  pq->add_option("algebra", o.algebra, alg_help)->required();
  pq->add_option("--f", o.f_path, "Dense matrix JSON (element of Lie G)")->required();
  pq->add_option("--h", o.h_path, "Monomial list JSON")->required();
  pq->add_option("--eps", o.eps);
  pq->add_option("--u", o.u, "Bunch parameter u (default 0)");
  pq->add_option("--degree-bound", o.degree_bound);
  add_common(pq, o);
  pq->callback([&] { action = [&] { return cmd_prequant(o, out); }; });

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  if (!action) {
    err << app.help();
    return kUsage;
  }
  try {
    return action();
  } catch (const ValidationError& e) {
    err << "validation failure: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace hens::cli
