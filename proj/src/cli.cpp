#include "jhess/cli.hpp"

#include "jhess/geometry.hpp"
#include "jhess/random.hpp"
#include "jhess/spec_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace jhess {

namespace {

struct CommonOptions {
  std::uint64_t seed = 0;
  int samples = 20;
  double tol_third = 1e-6;
  double tol_first = 1e-6;
  double fd_step = 1e-2;
  int fd_levels = 3;
  std::string out;
};

struct Options {
  CommonOptions common;
  std::string spec;
  std::string points_file;
  std::string point;
  std::string anchor;
  std::string path;
  std::string algebra_out;
  std::string require = "both";
  double radius_fraction = 0.3;
  double tol_algebra = 1e-10;
  double tol_iso = 1e-5;
  double tol_metric = 1e-6;
  int steps = 200;
  int order = 2;
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--seed", c.seed, "Random seed for sampled checks and points");
  sub->add_option("--samples", c.samples, "Number of samples / sampled points")->check(CLI::PositiveNumber);
  sub->add_option("--tol-third", c.tol_third, "Tolerance for the normalized third-parallel residual");
  sub->add_option("--tol-first", c.tol_first, "Tolerance for the normalized first-parallel residual");
  sub->add_option("--fd-step", c.fd_step, "Base finite-difference step (scaled by 1+|x|)")->check(CLI::PositiveNumber);
  sub->add_option("--fd-levels", c.fd_levels, "Richardson extrapolation levels")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Write the JSON report to this file instead of stdout");
}

Json manifest(const std::string& command, const Options& o) {
  return {{"command", command},
          {"spec", o.spec},
          {"seed", o.common.seed},
          {"samples", o.common.samples},
          {"tolerances", {{"third", o.common.tol_third}, {"first", o.common.tol_first}}},
          {"fd", {{"step", o.common.fd_step}, {"levels", o.common.fd_levels}}}};
}

StencilConfig stencil_of(const Options& o) {
  StencilConfig s;
  s.base_step = o.common.fd_step;
  s.richardson_levels = o.common.fd_levels;
  return s;
}

VerificationConfig verification_of(const Options& o) {
  VerificationConfig v;
  v.tol_third = o.common.tol_third;
  v.tol_first = o.common.tol_first;
  v.tol_isomorphism = o.tol_iso;
  v.tol_metric = o.tol_metric;
  v.transport_steps = o.steps;
  v.sampling = {o.common.samples, o.common.seed};
  return v;
}

void emit(const Json& report, const Options& o, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (o.common.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.common.out);
  if (!f) throw InputError("cannot write " + o.common.out);
  f << text;
}

std::vector<Vec> parse_points(const Json& j, int dim) {
  if (!j.is_array()) throw InputError("points: expected an array of points");
  std::vector<Vec> pts;
  for (const auto& p : j) {
    Vec v = vec_from_json(p);
    if (v.size() != dim) throw InputError("points: point has wrong dimension");
    pts.push_back(v);
  }
  return pts;
}

Vec parse_point(const std::string& text, int dim) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("--point: ") + e.what());
  }
  Vec v = vec_from_json(j);
  if (v.size() != dim) throw InputError("--point: wrong dimension");
  return v;
}

double distance_estimate(const LoadedPotential& lp, const Vec& anchor) {
  if (lp.barrier) return barrier_boundary_distance(*lp.barrier, anchor);
  if (lp.algebra) {
    double cnorm = 0.0;
    for (double c : lp.algebra->algebra().structure()) cnorm += c * c;
    if (cnorm == 0.0) return 1.0;
    return std::max(0.0, 1.0 - spectral_radius(lp.algebra->algebra(), anchor)) / std::sqrt(cnorm);
  }
  return 1.0;
}

std::vector<Vec> points_for(const LoadedPotential& lp, const Options& o) {
  const int d = lp.field.dim();
  if (!o.points_file.empty()) return parse_points(load_json_file(o.points_file), d);
  if (!o.point.empty()) return {parse_point(o.point, d)};
  const Vec anchor = o.anchor.empty() ? lp.anchor : parse_point(o.anchor, d);
  const double radius = o.radius_fraction * distance_estimate(lp, anchor);
  Rng rng(o.common.seed);
  std::vector<Vec> pts;
  for (int i = 0; i < o.common.samples; ++i) pts.push_back(random_in_ball(rng, anchor, radius));
  return pts;
}

// Accepts a bare algebra spec, a series spec or a barrier spec (checked as
// the weighted direct sum of its factors).
MetrisedAlgebra algebra_from_document(const Json& doc) {
  if (doc.is_object() && doc.contains("algebra")) return parse_algebra_spec(doc.at("algebra"));
  if (doc.is_object() && doc.contains("factors") && doc.at("factors").is_array() && !doc.at("factors").empty() &&
      doc.at("factors").at(0).is_object() && doc.at("factors").at(0).contains("algebra")) {
    const BarrierSpec b = parse_barrier_spec(doc);
    std::vector<MetrisedAlgebra> parts;
    std::vector<double> weights;
    for (const auto& f : b.factors) {
      parts.emplace_back(f.algebra, trace_form(f.algebra));
      weights.push_back(f.weight);
    }
    return direct_sum(parts, weights);
  }
  return parse_algebra_spec(doc);
}

int cmd_algebra_check(const Options& o, std::ostream& out) {
  const MetrisedAlgebra m = algebra_from_document(load_json_file(o.spec));
  const JordanAlgebra& a = m.algebra();
  const Sampling s{o.common.samples, o.common.seed};
  const double scale = std::max(1.0, a.structure_tensor().max_abs());
  const double tol = o.tol_algebra * scale * scale * scale;

  double jordan = jordan_residual(a, s);
  double integ = integrability_residual(a, s);
  double invar = invariance_residual(a, m.form(), s);
  const bool exhaustive = a.dim() <= 8;
  Json ex = nullptr;
  if (exhaustive) {
    const double je = jordan_residual_exhaustive(a);
    const double ie = integrability_residual_exhaustive(a);
    const double ve = invariance_residual_exhaustive(a, m.form());
    ex = {{"jordan_residual", je}, {"integrability_residual", ie}, {"invariance_residual", ve}};
    jordan = std::max(jordan, je);
    integ = std::max(integ, ie);
    invar = std::max(invar, ve);
  }
  const double comm = commutativity_residual(a);
  const auto unit = find_unit(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(m.form().matrix());
  const bool pd = es.eigenvalues().minCoeff() > 0.0;
  const double form_scale = std::max(1.0, m.form().matrix().cwiseAbs().maxCoeff());

  Json checks = {
      {"commutativity", {{"residual", comm}, {"pass", comm <= o.tol_algebra * scale}}},
      {"jordan", {{"residual", jordan}, {"pass", jordan <= tol}}},
      {"integrability", {{"residual", integ}, {"pass", integ <= tol}}},
      {"invariance", {{"residual", invar}, {"pass", invar <= tol * form_scale}}},
  };
  bool pass = true;
  for (const auto& [k, v] : checks.items()) pass = pass && v.at("pass").get<bool>();

  Json report = manifest("algebra-check", o);
  report["dim"] = a.dim();
  report["family"] = a.family().describe();
  report["checks"] = checks;
  report["exhaustive"] = ex;
  report["unit"] = unit ? to_json(*unit) : Json(nullptr);
  report["form_positive_definite"] = pd;
  report["tolerance"] = tol;
  report["pass"] = pass;
  emit(report, o, out);
  return pass ? kExitPass : kExitCheckFailed;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const LoadedPotential lp = load_potential(load_json_file(o.spec), stencil_of(o));
  const auto pts = points_for(lp, o);
  const VerificationReport rep = verify_points(lp.field, pts, verification_of(o));
  Json report = manifest("verify", o);
  report["require"] = o.require;
  report["verification"] = to_json(rep);
  if (lp.barrier) report["nu_expected"] = homogeneity_parameter(*lp.barrier);
  bool pass = rep.skipped < static_cast<int>(pts.size());
  if (o.require == "third" || o.require == "both") pass = pass && rep.third.pass;
  if (o.require == "first" || o.require == "both") pass = pass && rep.first.pass;
  report["pass"] = pass;
  emit(report, o, out);
  return pass ? kExitPass : kExitCheckFailed;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const LoadedPotential lp = load_potential(load_json_file(o.spec), stencil_of(o));
  const int d = lp.field.dim();
  std::vector<Vec> pts;
  if (!o.points_file.empty())
    pts = parse_points(load_json_file(o.points_file), d);
  else
    pts = {o.point.empty() ? lp.anchor : parse_point(o.point, d)};
  Json evals = Json::array();
  for (const auto& x : pts) {
    if (!lp.field.contains(x)) throw DomainError("eval: point outside the domain");
    Json j = {{"point", to_json(x)}, {"value", lp.field.value(x)}};
    if (o.order >= 1) j["gradient"] = to_json(lp.field.gradient(x));
    if (o.order >= 2) j["hessian"] = to_json(lp.field.hessian(x));
    if (o.order >= 3) j["third"] = to_json(lp.field.third(x));
    if (o.order >= 4) j["fourth"] = to_json(lp.field.fourth(x));
    evals.push_back(j);
  }
  Json tags = Json::array();
  for (int k = 1; k <= 4; ++k) tags.push_back(to_string(lp.field.source(k)));
  Json report = manifest("eval", o);
  report["field"] = lp.field.label();
  report["provenance"] = to_string(lp.field.provenance());
  report["source_tags"] = tags;
  report["evaluations"] = evals;
  emit(report, o, out);
  return kExitPass;
}

int cmd_reconstruct(const Options& o, std::ostream& out) {
  const LoadedPotential lp = load_potential(load_json_file(o.spec), stencil_of(o));
  const Vec x = o.point.empty() ? lp.anchor : parse_point(o.point, lp.field.dim());
  const VerificationConfig cfg = verification_of(o);
  const TensorSample s = sample_tensors(lp.field, x, true, cfg.degeneracy);
  const Residual r3 = residual_third_parallel(s);
  Json report = manifest("reconstruct", o);
  report["point"] = to_json(x);
  report["residual_third"] = {{"raw", r3.raw}, {"normalized", r3.normalized}};
  if (r3.normalized > cfg.reconstruct_gate) {
    report["error"] = "third-parallel residual exceeds the reconstruction gate";
    report["pass"] = false;
    emit(report, o, out);
    return kExitCheckFailed;
  }
  const MetrisedAlgebra m = reconstruct_algebra(lp.field, x, cfg);
  const auto unit = find_unit(m.algebra());
  const Json alg = algebra_to_json(m);
  report["algebra"] = alg;
  report["unital"] = unit.has_value();
  report["unit"] = unit ? to_json(*unit) : Json(nullptr);
  report["pass"] = true;
  if (!o.algebra_out.empty()) {
    std::ofstream f(o.algebra_out);
    if (!f) throw InputError("cannot write " + o.algebra_out);
    f << alg.dump(2) << "\n";
  }
  emit(report, o, out);
  return kExitPass;
}

int cmd_transport(const Options& o, std::ostream& out) {
  const LoadedPotential lp = load_potential(load_json_file(o.spec), stencil_of(o));
  const int d = lp.field.dim();
  Json pj;
  if (o.path.empty()) throw InputError("transport: --path is required");
  if (o.path.front() == '[') {
    try {
      pj = Json::parse(o.path);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("--path: ") + e.what());
    }
  } else {
    pj = load_json_file(o.path);
  }
  const auto path = parse_points(pj, d);
  if (path.empty()) throw InputError("transport: empty path");
  const VerificationConfig cfg = verification_of(o);
  const Mat j = parallel_transport(lp.field, path, o.steps);
  const double metric = metric_preservation_residual(lp.field, path, j);
  Json report = manifest("transport", o);
  report["path"] = pj;
  report["steps"] = o.steps;
  report["transport"] = to_json(j);
  report["metric_residual"] = metric;
  bool pass = metric <= cfg.tol_metric;
  try {
    const MetrisedAlgebra m0 = reconstruct_algebra(lp.field, path.front(), cfg);
    const MetrisedAlgebra m1 = reconstruct_algebra(lp.field, path.back(), cfg);
    const double iso = isomorphism_residual(j, m0, m1, cfg.sampling);
    report["isomorphism_residual"] = iso;
    pass = pass && iso <= cfg.tol_isomorphism;
  } catch (const NumericalError& e) {
    report["isomorphism_residual"] = nullptr;
    report["error"] = e.what();
    pass = false;
  }
  report["tolerances"]["isomorphism"] = cfg.tol_isomorphism;
  report["tolerances"]["metric"] = cfg.tol_metric;
  report["pass"] = pass;
  emit(report, o, out);
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hessian potentials with parallel derivatives and metrised Jordan algebras"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("algebra-check", "Check Jordan, integrability and invariance identities");
  check->add_option("spec", o.spec, "Algebra spec (JSON)")->required();
  check->add_option("--tol-algebra", o.tol_algebra, "Tolerance for algebraic identities");
  add_common(check, o.common);

  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--points", o.points_file, "JSON file with an array of points");
    sub->add_option("--point", o.point, "Single point as a JSON array");
    sub->add_option("--anchor", o.anchor, "Center of the sampling ball as a JSON array");
    sub->add_option("--radius-fraction", o.radius_fraction, "Sampling radius as a fraction of the boundary distance");
  };

  auto* verify = app.add_subcommand("verify", "Evaluate the parallel-derivative residuals at sampled points");
  verify->add_option("spec", o.spec, "Potential spec (JSON)")->required();
  verify->add_option("--require", o.require, "Checks that decide the exit code")
      ->check(CLI::IsMember({"third", "first", "both"}));
  add_sampling(verify);
  add_common(verify, o.common);

  auto* eval = app.add_subcommand("eval", "Evaluate a potential and its derivatives");
  eval->add_option("spec", o.spec, "Potential spec (JSON)")->required();
  eval->add_option("--order", o.order, "Highest derivative order to report (0..4)")->check(CLI::Range(0, 4));
  add_sampling(eval);
  add_common(eval, o.common);

  auto* recon = app.add_subcommand("reconstruct", "Reconstruct the metrised algebra at a point");
  recon->add_option("spec", o.spec, "Potential spec (JSON)")->required();
  recon->add_option("--point", o.point, "Point as a JSON array (default: anchor)");
  recon->add_option("--algebra-out", o.algebra_out, "Write the reconstructed algebra spec to this file");
  add_common(recon, o.common);

  auto* transport = app.add_subcommand("transport", "Parallel transport along a polyline");
  transport->add_option("spec", o.spec, "Potential spec (JSON)")->required();
  transport->add_option("--path", o.path, "Polyline as a JSON array of points or a JSON file")->required();
  transport->add_option("--steps", o.steps, "RK4 substeps per segment")->check(CLI::PositiveNumber);
  transport->add_option("--tol-iso", o.tol_iso, "Tolerance for the isomorphism residual");
  transport->add_option("--tol-metric", o.tol_metric, "Tolerance for metric preservation");
  add_common(transport, o.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (check->parsed()) return cmd_algebra_check(o, out);
    if (verify->parsed()) return cmd_verify(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (recon->parsed()) return cmd_reconstruct(o, out);
    if (transport->parsed()) return cmd_transport(o, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const Json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace jhess
