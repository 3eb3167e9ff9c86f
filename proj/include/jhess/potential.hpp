#pragma once

#include "jhess/algebra.hpp"
#include "jhess/numdiff.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace jhess {

enum class DerivativeSource { exact, finite_difference };
enum class Provenance { series, logdet_closed, canonical_barrier, user_expression };

const char* to_string(DerivativeSource s);
const char* to_string(Provenance p);

using GradientFn = std::function<Vec(const Vec&)>;
using HessianFn = std::function<Mat(const Vec&)>;

/// Raw evaluators handed to PotentialField. Only `value` is mandatory; missing
/// derivative orders are filled in by finite differences of the highest
/// available lower order. `sources` tags the provided evaluators (orders 1..4).
struct FieldEvaluators {
  ScalarFn value;
  GradientFn gradient;
  HessianFn hessian;
  TensorFn third;
  TensorFn fourth;
  DomainFn domain;
  std::array<DerivativeSource, 4> sources{DerivativeSource::exact, DerivativeSource::exact,
                                          DerivativeSource::exact, DerivativeSource::exact};
};

/// Scalar field with derivative access up to order 4. Immutable; evaluation is
/// pure and safe to call concurrently.
class PotentialField {
 public:
  PotentialField(int dim, FieldEvaluators ev, Provenance provenance, std::string label,
                 StencilConfig stencil = {});

  int dim() const { return dim_; }
  Provenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }
  const StencilConfig& stencil() const { return stencil_; }

  bool contains(const Vec& x) const;
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Mat hessian(const Vec& x) const;
  Tensor third(const Vec& x) const;
  Tensor fourth(const Vec& x) const;

  /// Tag of the evaluator for derivative order 1..4.
  DerivativeSource source(int order) const;

 private:
  void require(const Vec& x) const;
  void fill_gaps();

  int dim_;
  FieldEvaluators ev_;
  Provenance provenance_;
  std::string label_;
  StencilConfig stencil_;
};

// ---------------------------------------------------------------------------
// Series potential F(x) = Σ_{k≥2} (−1)ᵏ/k σ(x, x^{k−1})

struct SeriesOptions {
  double rel_tol = 1e-15;
  int max_terms = 500;
};

/// Spectral radius of L_x.
double spectral_radius(const JordanAlgebra& a, const Vec& x);

/// Truncated power series. Throws DomainError when the spectral radius of L_x is
/// ≥ 1 and NumericalError when the term cap is reached.
double series_potential(const MetrisedAlgebra& m, const Vec& x, SeriesOptions opt = {});
/// u ↦ σ((I+L_x)⁻¹x, u)
Vec series_gradient(const MetrisedAlgebra& m, const Vec& x);
/// Column v: σ((I+L_x)⁻¹v, ·) − σ((I+L_x)⁻¹L_v(I+L_x)⁻¹x, ·)
Mat series_hessian(const MetrisedAlgebra& m, const Vec& x);
/// Polarization of v ↦ ∇_v²∇_uF over pairs of basis directions; index order (u, v, w).
Tensor series_third(const MetrisedAlgebra& m, const Vec& x);
/// Covector u ↦ ∇_v³∇_uF from the closed-form directional fourth derivative.
Vec series_fourth_directional(const MetrisedAlgebra& m, const Vec& x, const Vec& v);

/// Field of the series potential on {x : spectral radius of L_x < 1}. Exact
/// derivatives (orders 1–3) rely on power-associativity and are used only when
/// the algebra passes the Jordan check; otherwise every derivative is taken by
/// finite differences of the truncated series.
PotentialField series_field(const MetrisedAlgebra& m, StencilConfig stencil = {});

// ---------------------------------------------------------------------------
// Log-determinant potential −log det(e + x)

double logdet_potential(const JordanAlgebra& a, const Vec& x);
/// u ↦ −tr L_{(e+x)⁻¹•u}
Vec logdet_gradient(const JordanAlgebra& a, const Vec& x);
/// Finite differences of logdet_gradient.
Mat logdet_hessian(const JordanAlgebra& a, const Vec& x, const StencilConfig& stencil = {});

PotentialField logdet_field(const JordanAlgebra& a, StencilConfig stencil = {});

// ---------------------------------------------------------------------------
// Canonical barriers F(x) = −Σ αⱼ log det (x − c)ⱼ + offset

struct BarrierFactor {
  JordanAlgebra algebra;
  double weight = 1.0;
};

struct BarrierSpec {
  std::vector<BarrierFactor> factors;
  Vec center;
  double offset = 0.0;

  int dim() const;
  /// Throws InputError on empty factor lists, nonpositive weights, non-Euclidean
  /// factors or a center of the wrong size.
  void validate() const;
};

/// Factors of a metrised direct sum with their recorded weights.
BarrierSpec barrier_from_algebra(const MetrisedAlgebra& m, Vec center, double offset = 0.0);

/// Barrier field, assembled blockwise per factor. Gradient, Hessian and third
/// derivative are exact (quadratic representation of δ⁻¹); the fourth is a
/// finite difference of the exact third.
PotentialField canonical_barrier(const BarrierSpec& spec, StencilConfig stencil = {});

/// ν = −Σⱼ αⱼ·dim Aⱼ
double homogeneity_parameter(const BarrierSpec& spec);

/// Interior point c + Σⱼ eⱼ (the unit element shifted to the center).
Vec barrier_anchor(const BarrierSpec& spec);

/// Conservative lower bound on the Euclidean distance from x to the cone boundary.
double barrier_boundary_distance(const BarrierSpec& spec, const Vec& x);

// ---------------------------------------------------------------------------
// User fields

/// ½xᵀQx with exact derivatives of every order.
PotentialField quadratic_field(const Mat& q);

/// Arbitrary scalar expression; every derivative by finite differences.
PotentialField user_field(int dim, ScalarFn value, DomainFn domain = {}, std::string label = "user",
                          StencilConfig stencil = {});

}  // namespace jhess
