// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "jhess/geometry.hpp"
#include "jhess/random.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace jhess;

namespace {

struct Named {
  std::string name;
  MetrisedAlgebra m;
};

MetrisedAlgebra with_trace(const JordanAlgebra& a) { return MetrisedAlgebra(a, trace_form(a)); }

std::vector<Named> family_list() {
  return {
      {"componentwise(3)", with_trace(JordanAlgebra::componentwise(3))},
      {"spin(4)", with_trace(JordanAlgebra::spin(4))},
      {"sym(2)", with_trace(JordanAlgebra::sym(2))},
      {"sym(3)", with_trace(JordanAlgebra::sym(3))},
      {"sym(2)+2*spin(3)",
       direct_sum({with_trace(JordanAlgebra::sym(2)), with_trace(JordanAlgebra::spin(3))}, {1.0, 2.0})},
  };
}

struct NamedBarrier {
  std::string name;
  BarrierSpec spec;
};

// Same algebra list, used as barrier factors; some with shifted centers and offsets.
std::vector<NamedBarrier> barrier_list() {
  std::vector<NamedBarrier> out;
  Rng rng(101);
  int k = 0;
  for (const auto& f : family_list()) {
    BarrierSpec b = barrier_from_algebra(f.m, Vec::Zero(f.m.dim()));
    if (k % 2 == 1) {
      b.center = 0.5 * random_unit(rng, b.dim());
      b.offset = 0.25 * k;
    }
    out.push_back({f.name, b});
    ++k;
  }
  return out;
}

// Random point whose left multiplication has spectral radius in (0.05, rho].
Vec series_point(Rng& rng, const JordanAlgebra& a, double rho) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const Vec dir = random_unit(rng, a.dim());
  return dir * (rho * u(rng) / spectral_radius(a, dir));
}

// Random point whose eigenvalues (spectral decomposition) lie in (−bound, bound).
Vec eigen_bounded_point(Rng& rng, const JordanAlgebra& a, double bound) {
  std::uniform_real_distribution<double> u(0.05, 0.999);
  const Vec dir = random_unit(rng, a.dim());
  double lmax = 0.0;
  for (double l : spectral(a, dir).eigenvalues) lmax = std::max(lmax, std::abs(l));
  return dir * (bound * u(rng) / lmax);
}

std::vector<Vec> barrier_points(const BarrierSpec& b, int n, std::uint64_t seed) {
  Rng rng(seed);
  const Vec anchor = barrier_anchor(b);
  const double r = 0.3 * barrier_boundary_distance(b, anchor);
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(random_in_ball(rng, anchor, r));
  return pts;
}

Tensor as_tensor(const Vec& v) {
  Tensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) t(i) = v(i);
  return t;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(int id, const std::string& what, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

// 1. Series potentials solve the third-parallel equation.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::ostringstream per;
  Rng rng(1);
  for (const auto& f : family_list()) {
    const auto field = series_field(f.m);
    double w = 0.0;
    for (int i = 0; i < 20; ++i)
      w = std::max(w, residual_third_parallel(field, series_point(rng, f.m.algebra(), 0.5)).normalized);
    per << f.name << "=" << fmt(w) << " ";
    worst = std::max(worst, w);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  per << "time=" << fmt(secs) << "s";
  report(1, worst <= 1e-6 && secs <= 60.0, "series third-parallel residual <= 1e-6 at 20 points, <= 60 s", per.str());
}

// 2. Canonical barriers satisfy both conditions.
void criterion2() {
  double w3 = 0.0, w1 = 0.0;
  int skipped = 0;
  for (const auto& b : barrier_list()) {
    const auto rep = verify_points(canonical_barrier(b.spec), barrier_points(b.spec, 20, 2), {});
    w3 = std::max(w3, rep.third.max);
    w1 = std::max(w1, rep.first.max);
    skipped += rep.skipped;
  }
  report(2, w3 <= 1e-6 && w1 <= 1e-6 && skipped == 0, "barrier third- and first-parallel residuals <= 1e-6",
         "third=" + fmt(w3) + " first=" + fmt(w1) + " skipped=" + std::to_string(skipped));
}

// 3. A -> F -> A: reconstruction of the series field at 0 returns the input.
void criterion3() {
  double worst = 0.0;
  for (const auto& f : family_list()) {
    const auto r = reconstruct_algebra(series_field(f.m), Vec::Zero(f.m.dim()));
    worst = std::max(worst, max_abs_diff(r.algebra().structure_tensor(), f.m.algebra().structure_tensor()));
    worst = std::max(worst, (r.form().matrix() - f.m.form().matrix()).cwiseAbs().maxCoeff());
  }
  report(3, worst <= 1e-9, "round trip A->F->A within 1e-9", "max gap=" + fmt(worst));
}

// 4. F -> A -> F: the series potential of the reconstructed algebra, centred at
// the base point, has the same second and third derivatives near it.
void criterion4() {
  struct Case {
    std::string name;
    PotentialField field;
    Vec base;
    double radius;
  };
  BarrierSpec sym2 = barrier_from_algebra(with_trace(JordanAlgebra::sym(2)), Vec::Zero(3));
  const auto spin4 = with_trace(JordanAlgebra::spin(4));
  Rng rng(4);
  const Vec spin_base = series_point(rng, spin4.algebra(), 0.2);
  std::vector<Case> cases{
      {"sym(2) barrier", canonical_barrier(sym2), barrier_anchor(sym2), 0.1},
      {"spin(4) series", series_field(spin4), spin_base, 0.05},
  };
  double worst2 = 0.0, worst3 = 0.0;
  for (const auto& c : cases) {
    const MetrisedAlgebra m = reconstruct_algebra(c.field, c.base);
    const auto regen = series_field(m);
    for (int i = 0; i < 5; ++i) {
      const Vec x = random_in_ball(rng, c.base, c.radius);
      const Vec local = x - c.base;
      worst2 = std::max(worst2, (c.field.hessian(x) - regen.hessian(local)).cwiseAbs().maxCoeff());
      worst3 = std::max(worst3, max_abs_diff(c.field.third(x), regen.third(local)));
    }
  }
  report(4, worst2 <= 1e-6 && worst3 <= 1e-6, "round trip F->A->F, 2nd/3rd derivatives within 1e-6 at 5 points",
         "hessian=" + fmt(worst2) + " third=" + fmt(worst3));
}

// 5. The Jordan identity and the integrability condition vanish together.
void criterion5() {
  const double zero_tol = 1e-10;
  bool agree = true, families_zero = true;
  std::ostringstream detail;
  for (const auto& f : family_list()) {
    const double j = jordan_residual_exhaustive(f.m.algebra());
    const double i = integrability_residual_exhaustive(f.m.algebra());
    agree = agree && (j <= zero_tol) == (i <= zero_tol);
    families_zero = families_zero && j <= zero_tol && i <= zero_tol;
  }
  Rng rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double min_perturbed = 1e300;
  const std::vector<JordanAlgebra> bases{JordanAlgebra::sym(2), JordanAlgebra::spin(3), JordanAlgebra::componentwise(3)};
  for (int trial = 0; trial < 10; ++trial) {
    const JordanAlgebra& base = bases[trial % bases.size()];
    const int d = base.dim();
    std::vector<double> c = base.structure();
    for (int g = 0; g < d; ++g)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          const double p = 0.05 * gauss(rng);
          c[(g * d + a) * d + b] += p;
          if (b != a) c[(g * d + b) * d + a] += p;
        }
    const JordanAlgebra pert(d, c);
    const double j = std::max(jordan_residual_exhaustive(pert), jordan_residual(pert, {64, 5}));
    const double i = std::max(integrability_residual_exhaustive(pert), integrability_residual(pert, {64, 5}));
    agree = agree && (j <= zero_tol) == (i <= zero_tol);
    min_perturbed = std::min(min_perturbed, std::min(j, i));
  }
  std::vector<double> wc(8, 0.0);
  wc[(1 * 2 + 0) * 2 + 0] = 1.0;
  wc[(0 * 2 + 1) * 2 + 1] = 1.0;
  const JordanAlgebra witness(2, wc);
  const double wj = jordan_residual(witness, {64, 0});
  const double wi = integrability_residual(witness, {64, 0});
  detail << "families " << (families_zero ? "zero" : "NONZERO") << ", perturbed min=" << fmt(min_perturbed) << " witness jordan=" << fmt(wj)
         << " integrability=" << fmt(wi);
  report(5, agree && families_zero && wj > 1e-3 && wi > 1e-3, "Jordan identity <=> integrability condition", detail.str());
}

// 6. Homogeneity parameter, center recovery and logarithmic homogeneity.
void criterion6() {
  double nu_gap = 0.0, center_gap = 0.0, homog = 0.0;
  for (const auto& b : barrier_list()) {
    const auto field = canonical_barrier(b.spec);
    const double nu = homogeneity_parameter(b.spec);
    for (const auto& x : barrier_points(b.spec, 5, 6)) {
      nu_gap = std::max(nu_gap, std::abs(recover_nu(field, x) - nu));
      center_gap = std::max(center_gap, (recover_center(field, x) - b.spec.center).cwiseAbs().maxCoeff());
      const double fx = field.value(x);
      for (double alpha : {0.5, 2.0, 10.0}) {
        const double gap = field.value(b.spec.center + alpha * (x - b.spec.center)) - nu * std::log(alpha) - fx;
        homog = std::max(homog, std::abs(gap) / (1.0 + std::abs(fx)));
      }
    }
  }
  report(6, nu_gap <= 1e-8 && center_gap <= 1e-8 && homog <= 1e-9, "nu, center and log-homogeneity recovery",
         "nu=" + fmt(nu_gap) + " center=" + fmt(center_gap) + " homogeneity=" + fmt(homog));
}

// 7. Barrier reconstructions are unital; the quadratic potential's is not.
void criterion7() {
  double worst = 0.0;
  bool all_found = true;
  for (const auto& b : barrier_list()) {
    const auto field = canonical_barrier(b.spec);
    for (const auto& x : barrier_points(b.spec, 3, 7)) {
      const MetrisedAlgebra m = reconstruct_algebra(field, x);
      const int d = m.dim();
      const Vec e = recover_unit(sample_tensors(field, x, false));
      worst = std::max(worst, (m.algebra().left_mult(e) - Mat::Identity(d, d)).norm());
      all_found = all_found && find_unit(m.algebra()).has_value();
    }
  }
  Mat q(3, 3);
  q << 2, 0.5, 0, 0.5, 1, 0, 0, 0, 3;
  const MetrisedAlgebra zero = reconstruct_algebra(quadratic_field(q), Vec::Zero(3));
  const bool zero_ok = zero.algebra().structure_tensor().max_abs() == 0.0 && !find_unit(zero.algebra());
  report(7, worst <= 1e-7 && all_found && zero_ok, "barrier algebras unital, quadratic gives non-unital zero algebra",
         "|L_e - I|=" + fmt(worst) + (zero_ok ? " zero algebra: no unit" : " zero algebra check failed"));
}

// Σ_j α_j (−log det(e+x_j) + tr L_{x_j}) over the declared factors; for a
// single factor with the trace form this is −log det(e+x) + tr L_x.
double closed_form(const MetrisedAlgebra& m, const Vec& x) {
  const auto parts = declared_factors(m.algebra());
  const auto& w = m.weights();
  double f = 0.0;
  int off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Vec xk = x.segment(off, parts[k].dim());
    f += (w.empty() ? 1.0 : w[k]) * (logdet_potential(parts[k], xk) + parts[k].trace(xk));
    off += parts[k].dim();
  }
  return f;
}

// 8. Series potential against the closed form −log det(e+x) + tr L_x.
void criterion8() {
  double worst = 0.0;
  std::ostringstream per;
  Rng rng(8);
  for (const auto& f : family_list()) {
    double w = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec x = eigen_bounded_point(rng, f.m.algebra(), 0.5);
      const double closed = closed_form(f.m, x);
      w = std::max(w, std::abs(series_potential(f.m, x) - closed) / (1.0 + std::abs(closed)));
    }
    per << f.name << "=" << fmt(w) << " ";
    worst = std::max(worst, w);
  }
  report(8, worst <= 1e-8, "series vs closed form within 1e-8 relative at 100 points per family", per.str());
}

// 9. Parallel transport is an isometric algebra isomorphism.
void criterion9() {
  const BarrierSpec sym2 = barrier_from_algebra(with_trace(JordanAlgebra::sym(2)), Vec::Zero(3));
  const auto field = canonical_barrier(sym2);
  Vec p0(3), p1(3), p2(3), p3(3);
  p0 << 1.0, 1.0, 0.0;
  p1 << 2.0, 1.0, 0.3;
  p2 << 1.5, 2.0, -0.2;
  p3 << 1.0, 3.0, 0.0;
  const std::vector<Vec> path{p0, p1, p2, p3};
  const Mat j = parallel_transport(field, path, 200);
  const double metric = metric_preservation_residual(field, path, j);
  const double iso = isomorphism_residual(j, reconstruct_algebra(field, p0), reconstruct_algebra(field, p3), {64, 9});
  report(9, iso <= 1e-5 && metric <= 1e-6, "transport on sym(2) barrier, 3 segments x 200 substeps",
         "isomorphism=" + fmt(iso) + " metric=" + fmt(metric));
}

// 10. Exact evaluators agree with the independent finite-difference oracle.
void criterion10() {
  double series_gap = 0.0, barrier_gap = 0.0, fourth_gap = 0.0;
  Rng rng(10);
  for (const auto& f : family_list()) {
    ScalarFn value = [&](const Vec& p) { return series_potential(f.m, p); };
    for (int i = 0; i < 3; ++i) {
      const Vec x = series_point(rng, f.m.algebra(), 0.5);
      series_gap = std::max(series_gap, fd_consistency(value, as_tensor(series_gradient(f.m, x)), x, 1));
      series_gap = std::max(series_gap, fd_consistency(value, Tensor::from_matrix(series_hessian(f.m, x)), x, 2));
      series_gap = std::max(series_gap, fd_consistency(value, series_third(f.m, x), x, 3));
    }
    // fourth derivative at 0: ∇_v⁴F = 6σ(v³, v)
    const auto field = series_field(f.m);
    const Tensor t4 = field.fourth(Vec::Zero(f.m.dim()));
    for (int i = 0; i < 5; ++i) {
      const Vec v = random_unit(rng, f.m.dim());
      const int d = f.m.dim();
      double contracted = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) contracted += t4(a, b, c, e) * v(a) * v(b) * v(c) * v(e);
      fourth_gap = std::max(fourth_gap, std::abs(contracted - 6.0 * f.m.form()(f.m.algebra().power(v, 3), v)));
    }
  }
  for (const auto& b : barrier_list()) {
    const auto field = canonical_barrier(b.spec);
    ScalarFn value = [&](const Vec& p) { return field.value(p); };
    DomainFn dom = [&](const Vec& p) { return field.contains(p); };
    for (const auto& x : barrier_points(b.spec, 3, 10)) {
      barrier_gap = std::max(barrier_gap, fd_consistency(value, as_tensor(field.gradient(x)), x, 1, {}, dom));
      barrier_gap = std::max(barrier_gap, fd_consistency(value, Tensor::from_matrix(field.hessian(x)), x, 2, {}, dom));
    }
  }
  report(10, series_gap <= 1e-6 && barrier_gap <= 1e-6 && fourth_gap <= 1e-7,
         "fd_consistency of exact evaluators, fourth derivative at 0",
         "series=" + fmt(series_gap) + " barrier=" + fmt(barrier_gap) + " fourth@0=" + fmt(fourth_gap));
}

}  // namespace

int main() {
  guarded(1, "series third-parallel residual", criterion1);
  guarded(2, "barrier residuals", criterion2);
  guarded(3, "round trip A->F->A", criterion3);
  guarded(4, "round trip F->A->F", criterion4);
  guarded(5, "Jordan <=> integrability", criterion5);
  guarded(6, "homogeneity and recovery", criterion6);
  guarded(7, "unitality", criterion7);
  guarded(8, "series vs closed form", criterion8);
  guarded(9, "transport isomorphism", criterion9);
  guarded(10, "oracle independence", criterion10);
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
