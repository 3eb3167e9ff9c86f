#pragma once

#include "jhess/algebra.hpp"
#include "jhess/potential.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace jhess {

/// Tolerances shared by the verification routines.
struct VerificationConfig {
  double tol_third = 1e-6;         // normalized third-parallel residual
  double tol_first = 1e-6;         // normalized first-parallel residual
  double reconstruct_gate = 1e-4;  // reconstruction refused above this third-parallel residual
  double degeneracy = 1e-12;       // |det g| < degeneracy·‖g‖^dim is degenerate
  double tol_isomorphism = 1e-5;
  double tol_metric = 1e-6;
  int transport_steps = 200;       // RK4 substeps per polyline segment
  Sampling sampling{64, 0};
};

/// Derivatives of a potential at one point: value, F_{,α}, g = F_{,αβ}, g⁻¹,
/// F_{,αβγ} and (optionally) F_{,αβγδ}.
struct TensorSample {
  Vec point;
  double value = 0.0;
  Vec gradient;
  Mat g;
  Mat g_inv;
  Tensor t3;
  Tensor t4;
  bool has_fourth = false;
  std::array<DerivativeSource, 4> sources{};
};

TensorSample sample_tensors(const PotentialField& p, const Vec& x, bool with_fourth = true,
                            double degeneracy = 1e-12);

/// K^γ_{αβ} = −½ F_{,αβδ} F^{,γδ}, stored with index order (γ, α, β).
struct DifferenceTensor {
  Tensor k;

  Vec apply(const Vec& u, const Vec& v) const;
  /// (L_u)^γ_β = K^γ_{αβ} u^α
  Mat contract(const Vec& u) const;
};

DifferenceTensor difference_tensor(const TensorSample& s);

struct Residual {
  double raw = 0.0;
  double normalized = 0.0;
};

/// F_{,αβγδ} − ½F^{,ρσ}(F_{,αβρ}F_{,γδσ} + F_{,αγρ}F_{,βδσ} + F_{,αδρ}F_{,βγσ}) in max-norm;
/// normalized by 1 + ‖F''''‖.
Residual residual_third_parallel(const TensorSample& s);
Residual residual_third_parallel(const PotentialField& p, const Vec& x);

/// F_{,δ}F^{,γδ}F_{,αβγ} − 2F_{,αβ} in max-norm; normalized by ‖F''‖.
Residual residual_first_parallel(const TensorSample& s);
Residual residual_first_parallel(const PotentialField& p, const Vec& x);

/// e = −g⁻¹∇F
Vec recover_unit(const TensorSample& s);
/// c = x − e
Vec recover_center(const PotentialField& p, const Vec& x);
/// ν = ⟨∇F, e⟩
double recover_nu(const PotentialField& p, const Vec& x);

/// Metrised algebra on the tangent space at x: product K, form g. Throws
/// NumericalError when the third-parallel residual exceeds the gate.
MetrisedAlgebra reconstruct_algebra(const PotentialField& p, const Vec& x, const VerificationConfig& cfg = {});

/// Levi-Civita transport matrix along a polyline, classical RK4 with `steps`
/// substeps per segment.
Mat parallel_transport(const PotentialField& p, const std::vector<Vec>& path, int steps = 200);

/// max over samples of ‖J(u•₁v) − (Ju)•₂(Jv)‖ + |σ₂(Ju,Jv) − σ₁(u,v)|
double isomorphism_residual(const Mat& j, const MetrisedAlgebra& m1, const MetrisedAlgebra& m2, Sampling s);

/// ‖Jᵀ g(end) J − g(start)‖ (max-norm)
double metric_preservation_residual(const PotentialField& p, const std::vector<Vec>& path, const Mat& j);

// ---------------------------------------------------------------------------
// Point-wise verification sweeps

struct PointRecord {
  Vec point;
  bool evaluated = false;
  std::string error;  // set when the point was skipped
  Residual third;
  Residual first;
  std::optional<Vec> unit;
  std::optional<Vec> center;
  std::optional<double> nu;
  std::array<DerivativeSource, 4> sources{};
};

struct ResidualSummary {
  double max = 0.0;
  double mean = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string field;
  std::vector<PointRecord> points;
  int skipped = 0;
  ResidualSummary third;
  ResidualSummary first;
};

/// Evaluates both residuals (and unit/center/ν where the first-parallel residual
/// passes) at every point. Points outside the domain are skipped and counted.
VerificationReport verify_points(const PotentialField& p, const std::vector<Vec>& points,
                                 const VerificationConfig& cfg = {});

}  // namespace jhess
