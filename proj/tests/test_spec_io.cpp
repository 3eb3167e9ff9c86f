#include "jhess/errors.hpp"
#include "jhess/spec_io.hpp"

#include <doctest.h>

#include <string>

using namespace jhess;

namespace {

std::string spec_path(const std::string& name) { return std::string(JHESS_SPECS_DIR) + "/" + name; }

}  // namespace

TEST_CASE("family specs default to the trace form") {
  const auto m = parse_algebra_spec(Json::parse(R"({"family": {"kind": "sym", "n": 2}})"));
  CHECK(m.dim() == 3);
  CHECK((m.form().matrix() - 1.5 * Mat::Identity(3, 3)).norm() < 1e-14);
  const auto back = parse_algebra_spec(algebra_to_json(m));
  CHECK(back.algebra().structure() == m.algebra().structure());
  CHECK(back.algebra().family().describe() == "sym(2)");
}

TEST_CASE("structure specs with an explicit form") {
  const auto m = parse_algebra_spec(load_json_file(spec_path("nonjordan.json")));
  CHECK(m.algebra().structure(1, 0, 0) == 1.0);
  CHECK(m.algebra().structure(0, 1, 1) == 1.0);
  CHECK(m.form().matrix()(0, 1) == 1.0);
  const auto back = parse_algebra_spec(algebra_to_json(m));
  CHECK(back.algebra().structure() == m.algebra().structure());
}

TEST_CASE("factor specs") {
  const auto m = parse_algebra_spec(load_json_file(spec_path("sym2_spin3_series.json")).at("algebra"));
  CHECK(m.dim() == 6);
  CHECK(m.weights() == std::vector<double>{1.0, 2.0});
  CHECK(m.form().matrix()(3, 3) == doctest::Approx(6.0));
  const auto back = parse_algebra_spec(algebra_to_json(m));
  CHECK((back.form().matrix() - m.form().matrix()).norm() < 1e-14);
}

TEST_CASE("malformed algebra specs") {
  CHECK_THROWS_WITH_AS(parse_algebra_spec(load_json_file(spec_path("zero_form.json"))),
                       doctest::Contains("degenerate form"), InputError);
  CHECK_THROWS_WITH_AS(parse_algebra_spec(Json::parse(R"({"structure": [[[0]]], "form": [[0]]})")),
                       doctest::Contains("degenerate form"), InputError);
  CHECK_THROWS_AS(parse_algebra_spec(Json::parse(R"({})")), InputError);
  CHECK_THROWS_AS(parse_algebra_spec(Json::parse(R"({"family": {"kind": "octonion", "n": 3}})")), InputError);
  CHECK_THROWS_AS(parse_algebra_spec(Json::parse(R"({"structure": [[[1, 2]]]})")), InputError);
  CHECK_THROWS_AS(
      parse_algebra_spec(Json::parse(R"({"structure": [[[0, 1], [0, 0]], [[0, 0], [0, 0]]], "form": [[1, 0], [0, 1]]})")),
      InputError);
  CHECK_THROWS_AS(load_json_file(spec_path("missing.json")), InputError);
}

TEST_CASE("barrier specs") {
  const BarrierSpec b = parse_barrier_spec(load_json_file(spec_path("product_barrier.json")));
  CHECK(b.factors.size() == 2);
  CHECK(b.dim() == 5);
  CHECK(b.offset == 1.0);
  CHECK(homogeneity_parameter(b) == doctest::Approx(-7.0));
  const BarrierSpec back = parse_barrier_spec(barrier_to_json(b));
  CHECK(back.factors[1].weight == 0.5);
  CHECK(back.center == b.center);

  CHECK_THROWS_AS(parse_barrier_spec(Json::parse(R"({"factors": []})")), InputError);
  CHECK_THROWS_AS(
      parse_barrier_spec(Json::parse(R"({"factors": [{"algebra": {"family": {"kind": "sym", "n": 2}}, "weight": -1}]})")),
      InputError);
}

TEST_CASE("potential loading") {
  const auto barrier = load_potential(load_json_file(spec_path("sym2_barrier.json")));
  CHECK(barrier.barrier.has_value());
  CHECK(barrier.field.provenance() == Provenance::canonical_barrier);
  CHECK((barrier.anchor - (Vec(3) << 1, 1, 0).finished()).norm() < 1e-14);

  const auto series = load_potential(load_json_file(spec_path("spin4_series.json")));
  CHECK(series.algebra.has_value());
  CHECK(series.field.provenance() == Provenance::series);
  CHECK(series.anchor.norm() == 0.0);

  const auto bare = load_potential(Json::parse(R"({"family": {"kind": "componentwise", "n": 2}})"));
  CHECK(bare.field.provenance() == Provenance::series);

  const auto quad = load_potential(load_json_file(spec_path("quadratic.json")));
  CHECK(quad.field.provenance() == Provenance::user_expression);
  CHECK(quad.field.hessian(Vec::Zero(3))(2, 2) == 3.0);

  CHECK_THROWS_AS(load_potential(Json::parse(R"({"kind": "mystery"})")), InputError);
}

TEST_CASE("report serialization") {
  const auto lp = load_potential(load_json_file(spec_path("log_barrier.json")));
  Vec good(1), bad(1);
  good << 2.0;
  bad << -1.0;
  const Json j = to_json(verify_points(lp.field, {good, bad}));
  CHECK(j.at("points").size() == 2);
  CHECK(j.at("points")[0].contains("residual_third"));
  CHECK(j.at("points")[0].at("nu").get<double>() == doctest::Approx(-1.0));
  CHECK(j.at("points")[0].at("source_tags")[0] == "exact");
  CHECK(j.at("points")[1].contains("skipped"));
  CHECK(j.at("summary").at("skipped") == 1);
  CHECK(j.at("summary").at("residual_first").at("pass") == true);
}
