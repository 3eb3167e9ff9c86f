#pragma once

#include "jhess/algebra.hpp"
#include "jhess/geometry.hpp"
#include "jhess/potential.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace jhess {

using Json = nlohmann::json;

/// Algebra spec document:
///   {"family": {"kind": "sym"|"spin"|"componentwise", "n": int}}
/// | {"structure": C[γ][α][β]}
/// | {"factors": [<algebra spec>...], "weights": [...]}
/// each optionally with "form": [[...]] (default: trace form, weighted for factors).
MetrisedAlgebra parse_algebra_spec(const Json& doc);
Json algebra_to_json(const MetrisedAlgebra& m);

/// {"factors": [{"algebra": <algebra spec>, "weight": α}], "center": [...], "offset": f}
BarrierSpec parse_barrier_spec(const Json& doc);
Json barrier_to_json(const BarrierSpec& spec);

/// Potential loaded from a spec document together with the data needed to
/// sample points around it.
struct LoadedPotential {
  PotentialField field;
  std::optional<BarrierSpec> barrier;
  std::optional<MetrisedAlgebra> algebra;  // series potentials
  Vec anchor;
  double boundary_distance = 1.0;  // estimate at the anchor
};

/// Accepts a barrier spec, {"kind": "series", "algebra": ...}, a bare algebra
/// spec (series potential) or {"quadratic": [[...]]}.
LoadedPotential load_potential(const Json& doc, const StencilConfig& stencil = {});

Json load_json_file(const std::string& path);

Vec vec_from_json(const Json& j);
Mat mat_from_json(const Json& j);
Json to_json(const Vec& v);
Json to_json(const Mat& m);
Json to_json(const Tensor& t);
Json to_json(const VerificationReport& r);

}  // namespace jhess
