#pragma once

#include "jhess/errors.hpp"
#include "jhess/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jhess {

/// Closed-form family tag. `raw` algebras only support the algebraic operations;
/// the others additionally carry spectral calculus.
struct Family {
  enum class Kind { raw, componentwise, spin, sym, direct_sum };

  Kind kind = Kind::raw;
  int n = 0;  // parameter of componentwise(n), spin(n), sym(n)

  // direct_sum only: factor tags and the coordinate offset of each factor.
  std::vector<Family> factors;
  std::vector<int> offsets;
  std::vector<int> dims;

  bool euclidean() const;
  std::string describe() const;
};

/// Dimension of the underlying space of sym(n): n(n+1)/2.
int sym_dim(int n);

/// Finite-dimensional algebra given by structure constants
/// (u•v)^γ = C^γ_{αβ} u^α v^β, stored dense as C[γ][α][β].
class JordanAlgebra {
 public:
  JordanAlgebra(int dim, std::vector<double> structure, Family family = {});

  /// ℝⁿ with the componentwise product.
  static JordanAlgebra componentwise(int n);
  /// Spin factor on ℝⁿ = ℝ × ℝⁿ⁻¹: u•v = (u₀v₀ + ū·v̄, u₀v̄ + v₀ū). Requires n ≥ 2.
  static JordanAlgebra spin(int n);
  /// Real symmetric n×n matrices with X∘Y = (XY + YX)/2 in the Frobenius-orthonormal
  /// basis {E_ii} ∪ {(E_ij + E_ji)/√2, i<j}; diagonal entries first.
  static JordanAlgebra sym(int n);

  int dim() const { return dim_; }
  const Family& family() const { return family_; }
  const std::vector<double>& structure() const { return c_; }
  double structure(int gamma, int alpha, int beta) const {
    return c_[(static_cast<std::size_t>(gamma) * dim_ + alpha) * dim_ + beta];
  }
  Tensor structure_tensor() const;

  Vec multiply(const Vec& u, const Vec& v) const;
  /// (L_u)^γ_β = C^γ_{αβ} u^α
  Mat left_mult(const Vec& u) const;
  /// u¹ = u, u^{k+1} = u•uᵏ; k = 0 yields the unit element when one exists.
  Vec power(const Vec& u, int k) const;

  /// t_α = tr L_{b_α}; tr L_u = t·u.
  const Vec& trace_vector() const { return trace_; }
  double trace(const Vec& u) const;

  Vec basis(int i) const;

 private:
  void check_dim(const Vec& u, const char* what) const;

  int dim_;
  std::vector<double> c_;
  Family family_;
  Vec trace_;
};

/// Symmetric bilinear form σ_{αβ}.
class BilinearForm {
 public:
  explicit BilinearForm(Mat matrix);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(const Vec& u, const Vec& v) const { return u.dot(m_ * v); }
  /// |det σ| < 1e-12·‖σ‖^dim (max-norm).
  bool degenerate() const;

 private:
  Mat m_;
};

/// Pair (algebra, form) with a non-degenerate form. Invariance is checked by
/// `checked`; the plain constructor only validates shapes and non-degeneracy so
/// that diagnostic tools can report on candidates that fail invariance.
class MetrisedAlgebra {
 public:
  MetrisedAlgebra(JordanAlgebra algebra, BilinearForm form, std::vector<double> weights = {});

  static MetrisedAlgebra checked(JordanAlgebra algebra, BilinearForm form, double tol = 1e-8);

  const JordanAlgebra& algebra() const { return algebra_; }
  const BilinearForm& form() const { return form_; }
  int dim() const { return algebra_.dim(); }
  /// Factor weights recorded by direct_sum; empty when not assembled from parts.
  const std::vector<double>& weights() const { return weights_; }

 private:
  JordanAlgebra algebra_;
  BilinearForm form_;
  std::vector<double> weights_;
};

struct SpectralDecomposition {
  std::vector<Vec> idempotents;
  std::vector<double> eigenvalues;
  std::vector<double> multiplicities;  // d_j = tr L_{e^j}

  Vec reconstruct() const;
};

struct Sampling {
  int samples = 64;
  std::uint64_t seed = 0;
};

// Identity checks. Sampled variants take unit-norm random vectors; exhaustive
// variants evaluate the fully linearized identity on basis tuples and are exact
// certificates (intended for dim ≤ 8).
double commutativity_residual(const JordanAlgebra& a);
double jordan_residual(const JordanAlgebra& a, Sampling s);
double jordan_residual_exhaustive(const JordanAlgebra& a);
double integrability_residual(const JordanAlgebra& a, Sampling s);
double integrability_residual_exhaustive(const JordanAlgebra& a);
double invariance_residual(const JordanAlgebra& a, const BilinearForm& form, Sampling s);
double invariance_residual_exhaustive(const JordanAlgebra& a, const BilinearForm& form);

/// Unit element by least squares on L_e = I, accepted when ‖L_e − I‖_F ≤ 1e-8·dim.
std::optional<Vec> find_unit(const JordanAlgebra& a);

/// τ_{αβ} = tr L_{b_α•b_β}
BilinearForm trace_form(const JordanAlgebra& a);

/// Block-diagonal sum with form Σ w_j σ_j. A single part with weight 1 is returned unchanged.
MetrisedAlgebra direct_sum(const std::vector<MetrisedAlgebra>& parts, const std::vector<double>& weights);

/// Declared direct-sum factors as standalone algebras (the algebra itself when
/// it is not a declared direct sum).
std::vector<JordanAlgebra> declared_factors(const JordanAlgebra& a);

/// Spectral decomposition for Euclidean family tags; throws UnsupportedError otherwise.
SpectralDecomposition spectral(const JordanAlgebra& a, const Vec& x);
/// Π λ_j^{d_j}
double determinant(const JordanAlgebra& a, const Vec& x);
/// Σ d_j log λ_j; requires all λ_j > 0.
double logdet(const JordanAlgebra& a, const Vec& x);
/// Σ λ_j⁻¹ e^j; requires all λ_j ≠ 0.
Vec inverse(const JordanAlgebra& a, const Vec& x);

// sym(n) coordinate maps.
Vec sym_coordinates(const Mat& symmetric);
Mat sym_matrix(const Vec& coords, int n);

}  // namespace jhess
